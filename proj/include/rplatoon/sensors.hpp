#pragma once

#include <cmath>
#include <numbers>

#include "rplatoon/geometry.hpp"
#include "rplatoon/scrc_types.hpp"
#include "rplatoon/track.hpp"
#include "rplatoon/vehicle.hpp"

// Sensor synthesis: the 19-beam rangefinder fan (-90..+90 deg in 10 deg
// steps, 200 m cap) plus track-relative pose fields.

namespace rplatoon {

/// World-frame bearing of beam i for a vehicle heading `heading`.
inline double beam_bearing(double heading, int beam_index) {
  double body_deg = -90.0 + kRangeBeamSpacingDeg * beam_index;
  return heading + body_deg * std::numbers::pi / 180.0;
}

/// Ray-cast distance from origin to the nearest corridor edge, capped at the
/// sensor range. The origin is assumed to lie inside the corridor.
inline double rangefinder(const Track& track, Vec2 origin, double bearing) {
  Vec2 dir = unit_from_angle(bearing);
  double best = kRangeCapMeters;
  for (const auto& seg : track.edge_segments()) {
    auto hit = ray_segment_distance(origin, dir, seg.a, seg.b);
    if (hit && *hit < best) best = *hit;
  }
  return best;
}

/// Builds the sensor sample for one vehicle. The communications field is left
/// empty; the harness fills it from the bus. Off the corridor (|trackPos|>1)
/// every rangefinder reads -1.
inline CarState sense(const Track& track, const VehicleState& v, double lap_time_s,
                      double dist_raced_m = 0.0) {
  auto proj = track.project(v.position);
  Vec2 tangent = track.tangent_at(proj.s_arc);

  CarState cs;
  cs.angle = wrap_pi(std::atan2(tangent.y, tangent.x) - v.heading);
  cs.gear = v.gear;
  cs.rpm = v.rpm;
  cs.speed_x = v.speed * 3.6;  // m/s -> km/h
  cs.speed_y = 0.0;            // the bicycle model has no lateral slip
  cs.track_pos = proj.track_pos;
  cs.dist_raced = dist_raced_m;
  cs.dist_from_start = proj.s_arc;
  cs.lap_time = lap_time_s;
  if (std::abs(proj.track_pos) > 1.0) {
    cs.track.fill(kOffTrackReading);
  } else {
    for (int i = 0; i < kRangeBeamCount; ++i)
      cs.track[static_cast<std::size_t>(i)] =
          rangefinder(track, v.position, beam_bearing(v.heading, i));
  }
  return cs;
}

/// Vehicle at rest on the centerline at arc offset s, facing along the track.
inline VehicleState place_on_track(const Track& track, double s_arc,
                                   const VehicleParams& p) {
  double s = std::fmod(s_arc, track.length());
  if (s < 0.0) s += track.length();
  VehicleState v;
  v.position = track.point_at(s);
  Vec2 t = track.tangent_at(s);
  v.heading = std::atan2(t.y, t.x);
  v.speed = 0.0;
  v.gear = 1;
  v.rpm = rpm_of(0.0, 1, p);
  v.s_arc = s;
  v.lap_count = 0;
  return v;
}

}  // namespace rplatoon
