#pragma once

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rplatoon/geometry.hpp"
#include "rplatoon/text.hpp"

// ============================================================================
//  Closed 2-D track: a simple closed centerline polyline with a constant
//  corridor half width. The corridor edges are precomputed as miter-offset
//  polylines, so on straight sections they are exact parallels of the
//  centerline.
// ============================================================================

namespace rplatoon {

struct Segment {
  Vec2 a;
  Vec2 b;
};

class Track {
 public:
  /// Validates and takes ownership of a closed centerline. The polyline must
  /// be simple (no two non-adjacent segments touching) with at least three
  /// vertices; vertex i connects to vertex (i+1) mod n.
  Track(std::vector<Vec2> centerline, double half_width)
      : verts_(std::move(centerline)), half_width_(half_width) {
    if (verts_.size() < 3)
      throw std::invalid_argument("Track: centerline needs at least 3 vertices");
    if (!(half_width_ > 0.0))
      throw std::invalid_argument("Track: half width must be positive");
    const std::size_t n = verts_.size();
    cum_.resize(n + 1);
    cum_[0] = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double seg = norm(verts_[(i + 1) % n] - verts_[i]);
      if (!(seg > 0.0))
        throw std::invalid_argument("Track: degenerate centerline segment");
      cum_[i + 1] = cum_[i] + seg;
    }
    length_ = cum_[n];
    check_simple();
    build_edges();
  }

  const std::vector<Vec2>& centerline() const { return verts_; }
  double half_width() const { return half_width_; }
  double length() const { return length_; }
  const std::vector<Segment>& edge_segments() const { return edges_; }

  /// Centerline point at arc length s (wrapped into [0, length)).
  Vec2 point_at(double s) const {
    auto [i, local] = locate(s);
    Vec2 a = verts_[i];
    Vec2 b = verts_[(i + 1) % verts_.size()];
    double seg_len = cum_[i + 1] - cum_[i];
    return a + (b - a) * (local / seg_len);
  }

  /// Unit tangent (direction of increasing arc) at arc length s.
  Vec2 tangent_at(double s) const {
    auto [i, local] = locate(s);
    return normalized(verts_[(i + 1) % verts_.size()] - verts_[i]);
  }

  struct Projection {
    double s_arc = 0.0;     // arc length of the nearest centerline point
    double track_pos = 0.0; // signed lateral offset / half width, left positive
  };

  /// Projects a position onto the centerline.
  Projection project(Vec2 p) const {
    const std::size_t n = verts_.size();
    double best_d2 = std::numeric_limits<double>::max();
    std::size_t best_i = 0;
    double best_t = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Vec2 a = verts_[i];
      Vec2 b = verts_[(i + 1) % n];
      double t = project_on_segment(p, a, b);
      Vec2 q = a + (b - a) * t;
      Vec2 d = p - q;
      double d2 = dot(d, d);
      if (d2 < best_d2) {
        best_d2 = d2;
        best_i = i;
        best_t = t;
      }
    }
    Vec2 a = verts_[best_i];
    Vec2 b = verts_[(best_i + 1) % n];
    Vec2 q = a + (b - a) * best_t;
    Vec2 tangent = normalized(b - a);
    Vec2 offset = p - q;
    double lateral = norm(offset);
    double side = cross(tangent, offset) >= 0.0 ? 1.0 : -1.0;
    double s = cum_[best_i] + best_t * (cum_[best_i + 1] - cum_[best_i]);
    if (s >= length_) s -= length_;
    return {s, side * lateral / half_width_};
  }

 private:
  std::pair<std::size_t, double> locate(double s) const {
    s = std::fmod(s, length_);
    if (s < 0.0) s += length_;
    // cum_ is strictly increasing; find the segment containing s
    std::size_t lo = 0, hi = verts_.size();
    while (lo + 1 < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (cum_[mid] <= s) lo = mid;
      else hi = mid;
    }
    return {lo, s - cum_[lo]};
  }

  void check_simple() const {
    const std::size_t n = verts_.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
        if (adjacent) continue;
        if (segments_intersect(verts_[i], verts_[(i + 1) % n], verts_[j],
                               verts_[(j + 1) % n]))
          throw std::invalid_argument("Track: centerline is self-intersecting");
      }
    }
  }

  // Miter joins place each offset vertex on the intersection of the adjacent
  // offset lines, so straight runs stay exactly half_width from the
  // centerline. The miter length is capped for near-reversal corners.
  void build_edges() {
    const std::size_t n = verts_.size();
    std::vector<Vec2> left(n), right(n);
    for (std::size_t i = 0; i < n; ++i) {
      Vec2 prev = verts_[(i + n - 1) % n];
      Vec2 cur = verts_[i];
      Vec2 next = verts_[(i + 1) % n];
      Vec2 nl_in = perp_left(normalized(cur - prev));
      Vec2 nl_out = perp_left(normalized(next - cur));
      Vec2 m = nl_in + nl_out;
      double mlen = norm(m);
      Vec2 dir;
      double scale;
      if (mlen < 1e-9) {
        dir = nl_in;
        scale = half_width_;
      } else {
        dir = m * (1.0 / mlen);
        double cos_half = dot(dir, nl_in);
        scale = half_width_ / std::max(cos_half, 0.05);
      }
      left[i] = cur + dir * scale;
      right[i] = cur - dir * scale;
    }
    edges_.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
      edges_.push_back({left[i], left[(i + 1) % n]});
      edges_.push_back({right[i], right[(i + 1) % n]});
    }
  }

  std::vector<Vec2> verts_;
  double half_width_;
  double length_ = 0.0;
  std::vector<double> cum_;
  std::vector<Segment> edges_;
};

/// Stadium-shaped closed track: two straights of `straight_len` joined by
/// semicircles of `corner_radius`, sampled at `vertices_per_arc` chords each.
inline Track make_oval(double straight_len, double corner_radius, double half_width,
                       int vertices_per_arc) {
  if (!(straight_len >= 0.0))
    throw std::invalid_argument("make_oval: straight length must be >= 0");
  if (!(half_width > 0.0))
    throw std::invalid_argument("make_oval: half width must be positive");
  if (!(corner_radius > half_width))
    throw std::invalid_argument("make_oval: corner radius must exceed half width");
  if (vertices_per_arc < 8)
    throw std::invalid_argument("make_oval: need at least 8 vertices per arc");

  const double pi = std::numbers::pi;
  std::vector<Vec2> pts;
  pts.reserve(2 * static_cast<std::size_t>(vertices_per_arc) + 2);
  // bottom straight, left to right, then the right arc, top straight, left arc
  pts.push_back({0.0, -corner_radius});
  pts.push_back({straight_len, -corner_radius});
  for (int i = 1; i <= vertices_per_arc; ++i) {
    double phi = -pi / 2 + pi * i / vertices_per_arc;
    pts.push_back({straight_len + corner_radius * std::cos(phi),
                   corner_radius * std::sin(phi)});
  }
  pts.push_back({0.0, corner_radius});
  for (int i = 1; i < vertices_per_arc; ++i) {
    double phi = pi / 2 + pi * i / vertices_per_arc;
    pts.push_back({corner_radius * std::cos(phi), corner_radius * std::sin(phi)});
  }
  return Track(std::move(pts), half_width);
}

inline Track::Projection progress(const Track& track, Vec2 position) {
  return track.project(position);
}

/// Lap transition for an arc-length jump across the datum: +1 when the
/// vehicle wrapped forward past 0, -1 when it backed across, 0 otherwise.
inline int lap_wrap_delta(double track_length, double prev_s, double new_s) {
  double d = new_s - prev_s;
  double half = track_length / 2.0;
  if (d < -half) return 1;
  if (d > half) return -1;
  return 0;
}

// ----------------------------------------------------------------------------
// Track file format: '#' starts a comment, the first data line is
// "halfwidth <w>", every following data line is one "x y" centerline vertex.
// ----------------------------------------------------------------------------

inline Track load_track(std::istream& in) {
  double half_width = 0.0;
  bool have_width = false;
  std::vector<Vec2> pts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;  // blank line
    if (!have_width) {
      if (first != "halfwidth")
        throw std::invalid_argument("track file: expected 'halfwidth <w>' first");
      std::string w;
      if (!(ls >> w) || !parse_real(w))
        throw std::invalid_argument("track file: bad halfwidth value");
      half_width = *parse_real(w);
      have_width = true;
      continue;
    }
    std::string second;
    if (!(ls >> second) || !parse_real(first) || !parse_real(second))
      throw std::invalid_argument("track file: bad vertex on line " +
                                  std::to_string(line_no));
    pts.push_back({*parse_real(first), *parse_real(second)});
  }
  if (!have_width) throw std::invalid_argument("track file: missing halfwidth");
  return Track(std::move(pts), half_width);
}

inline Track load_track_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("track file: cannot open " + path);
  return load_track(in);
}

inline void save_track(const Track& track, std::ostream& out) {
  out << "# reactive-platoon track\n";
  out << "halfwidth " << format_real(track.half_width()) << "\n";
  for (const auto& v : track.centerline())
    out << format_real(v.x) << " " << format_real(v.y) << "\n";
}

}  // namespace rplatoon
