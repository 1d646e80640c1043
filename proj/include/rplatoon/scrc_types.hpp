#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

// Sensor/actuator data model. CarState is one sensor sample per vehicle per
// step, DriveState one actuator command. The field set is the SCRC subset the
// controllers consume plus the inter-vehicle communication extension.

namespace rplatoon {

using Message = std::string;

inline constexpr int kRangeBeamCount = 19;
inline constexpr double kRangeBeamSpacingDeg = 10.0;  // fan spans -90..+90 deg
inline constexpr double kRangeCapMeters = 200.0;
inline constexpr double kOffTrackReading = -1.0;
inline constexpr std::size_t kMaxMessageBytes = 256;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Message alphabet: printable ASCII except parentheses, at most 256 bytes.
/// The empty string means "no message".
inline bool is_valid_message(std::string_view text) {
  if (text.size() > kMaxMessageBytes) return false;
  for (unsigned char c : text)
    if (c < 0x20 || c > 0x7e || c == '(' || c == ')') return false;
  return true;
}

/// Drops illegal bytes and truncates to the maximum length.
inline Message sanitize_message(std::string_view text) {
  Message out;
  for (unsigned char c : text) {
    if (out.size() == kMaxMessageBytes) break;
    if (c >= 0x20 && c <= 0x7e && c != '(' && c != ')')
      out.push_back(static_cast<char>(c));
  }
  return out;
}

struct CommEntry {
  int vehicle_id = 0;
  Message text;

  friend bool operator==(const CommEntry&, const CommEntry&) = default;
};

namespace detail {

constexpr std::array<double, kRangeBeamCount> open_track_readings() {
  std::array<double, kRangeBeamCount> t{};
  for (auto& v : t) v = kRangeCapMeters;
  return t;
}

}  // namespace detail

struct CarState {
  double angle = 0.0;    // rad in [-pi,pi]: track tangent direction minus heading
  int gear = 0;          // {-1, 0, 1..6}
  double rpm = 0.0;      // rev/min, >= 0
  double speed_x = 0.0;  // km/h, longitudinal
  double speed_y = 0.0;  // km/h, lateral
  std::array<double, kRangeBeamCount> track = detail::open_track_readings();
  double track_pos = 0.0;        // lateral offset / half width, left positive
  double dist_raced = 0.0;       // m, >= 0
  double dist_from_start = 0.0;  // m along centerline from the track datum
  double lap_time = 0.0;         // s since the current lap began
  std::vector<CommEntry> communications;  // peer messages delivered by the bus

  friend bool operator==(const CarState&, const CarState&) = default;
};

struct DriveState {
  double accel = 0.0;   // [0,1]
  double brake = 0.0;   // [0,1]
  int gear = 1;         // {-1, 0, 1..6}
  double steer = 0.0;   // [-1,1], positive steers left
  double clutch = 0.0;  // [0,1]
  int meta = 0;         // {0,1}: restart request
  Message broadcast;    // published to all peers via the bus

  friend bool operator==(const DriveState&, const DriveState&) = default;
};

namespace detail {

// NaN falls to `lo` so hostile wire input still yields an in-range value.
inline double clamp_nan_low(double v, double lo, double hi, bool* changed) {
  double r = v;
  if (!(v >= lo)) r = lo;
  else if (v > hi) r = hi;
  if (changed && !(r == v)) *changed = true;
  return r;
}

inline int clamp_gear(int g, bool* changed) {
  int r = std::clamp(g, -1, 6);
  if (changed && r != g) *changed = true;
  return r;
}

}  // namespace detail

/// Copy with every bounded field forced into its legal range. `changed`, when
/// given, is set to true if any field moved.
inline DriveState clamped(const DriveState& ds, bool* changed = nullptr) {
  DriveState out = ds;
  out.accel = detail::clamp_nan_low(ds.accel, 0.0, 1.0, changed);
  out.brake = detail::clamp_nan_low(ds.brake, 0.0, 1.0, changed);
  out.clutch = detail::clamp_nan_low(ds.clutch, 0.0, 1.0, changed);
  out.steer = detail::clamp_nan_low(ds.steer, -1.0, 1.0, changed);
  out.gear = detail::clamp_gear(ds.gear, changed);
  int meta = ds.meta == 0 ? 0 : 1;
  if (changed && meta != ds.meta) *changed = true;
  out.meta = meta;
  out.broadcast = sanitize_message(ds.broadcast);
  if (changed && out.broadcast != ds.broadcast) *changed = true;
  return out;
}

inline CarState clamped(const CarState& cs, bool* changed = nullptr) {
  CarState out = cs;
  out.angle = detail::clamp_nan_low(cs.angle, -kPi, kPi, changed);
  out.gear = detail::clamp_gear(cs.gear, changed);
  out.rpm = detail::clamp_nan_low(cs.rpm, 0.0, std::numeric_limits<double>::max(), changed);
  for (auto& reading : out.track) {
    double v = reading;
    if (!(v >= 0.0)) reading = kOffTrackReading;        // negatives and NaN
    else if (v > kRangeCapMeters) reading = kRangeCapMeters;
    if (changed && !(reading == v)) *changed = true;
  }
  out.dist_raced = detail::clamp_nan_low(cs.dist_raced, 0.0,
                                         std::numeric_limits<double>::max(), changed);
  out.dist_from_start = detail::clamp_nan_low(cs.dist_from_start, 0.0,
                                              std::numeric_limits<double>::max(), changed);
  out.lap_time = detail::clamp_nan_low(cs.lap_time, 0.0,
                                       std::numeric_limits<double>::max(), changed);
  for (auto& entry : out.communications) {
    if (entry.vehicle_id < 0) {
      entry.vehicle_id = 0;
      if (changed) *changed = true;
    }
    Message clean = sanitize_message(entry.text);
    if (changed && clean != entry.text) *changed = true;
    entry.text = std::move(clean);
  }
  return out;
}

}  // namespace rplatoon
