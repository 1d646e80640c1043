#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

// Small 2-D helpers for the track model and the rangefinder rays.

namespace rplatoon {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(Vec2 a, double k) { return {a.x * k, a.y * k}; }
  friend Vec2 operator*(double k, Vec2 a) { return a * k; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline Vec2 normalized(Vec2 v) {
  double n = norm(v);
  return n > 0.0 ? Vec2{v.x / n, v.y / n} : Vec2{1.0, 0.0};
}
inline Vec2 perp_left(Vec2 v) { return {-v.y, v.x}; }
inline Vec2 unit_from_angle(double a) { return {std::cos(a), std::sin(a)}; }

/// Wraps an angle into [-pi, pi).
inline double wrap_pi(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a + std::numbers::pi, two_pi);
  if (a < 0.0) a += two_pi;
  return a - std::numbers::pi;
}

/// Distance along the ray (origin, unit dir) to segment [a,b], or nullopt.
inline std::optional<double> ray_segment_distance(Vec2 origin, Vec2 dir, Vec2 a, Vec2 b) {
  Vec2 e = b - a;
  double denom = cross(dir, e);
  if (denom == 0.0) return std::nullopt;  // parallel (collinear treated as miss)
  Vec2 ao = a - origin;
  double t = cross(ao, e) / denom;
  double u = cross(ao, dir) / denom;
  if (t < 0.0 || u < 0.0 || u > 1.0) return std::nullopt;
  return t;
}

/// Distance along the ray to a circle boundary, or nullopt. Origins inside
/// the circle report 0.
inline std::optional<double> ray_circle_distance(Vec2 origin, Vec2 dir, Vec2 center,
                                                 double radius) {
  Vec2 oc = center - origin;
  double along = dot(oc, dir);
  double closest_sq = dot(oc, oc) - along * along;
  double r_sq = radius * radius;
  if (closest_sq > r_sq) return std::nullopt;
  double half_chord = std::sqrt(r_sq - closest_sq);
  double t = along - half_chord;
  if (t < 0.0) {
    if (along + half_chord < 0.0) return std::nullopt;  // circle behind the origin
    return 0.0;
  }
  return t;
}

/// Parameter in [0,1] of the point on [a,b] closest to p.
inline double project_on_segment(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 e = b - a;
  double len_sq = dot(e, e);
  if (len_sq == 0.0) return 0.0;
  double t = dot(p - a, e) / len_sq;
  return t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
}

/// True when the closed segments [a,b] and [c,d] touch or cross.
inline bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  auto orient = [](Vec2 p, Vec2 q, Vec2 r) {
    double v = cross(q - p, r - p);
    return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
  };
  auto on_segment = [](Vec2 p, Vec2 q, Vec2 r) {
    return std::min(p.x, r.x) <= q.x && q.x <= std::max(p.x, r.x) &&
           std::min(p.y, r.y) <= q.y && q.y <= std::max(p.y, r.y);
  };
  int o1 = orient(a, b, c), o2 = orient(a, b, d);
  int o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, c, b)) return true;
  if (o2 == 0 && on_segment(a, d, b)) return true;
  if (o3 == 0 && on_segment(c, a, d)) return true;
  if (o4 == 0 && on_segment(c, b, d)) return true;
  return false;
}

}  // namespace rplatoon
