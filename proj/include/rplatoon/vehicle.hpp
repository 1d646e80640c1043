#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "rplatoon/frp.hpp"
#include "rplatoon/geometry.hpp"
#include "rplatoon/scrc_types.hpp"

// Kinematic bicycle dynamics. rpm is algebraic in (speed, gear) with a
// strictly decreasing per-gear ratio table, so upshifting always lowers rpm.

namespace rplatoon {

struct VehicleParams {
  double wheelbase = 2.6;         // m
  double max_accel = 6.0;         // m/s^2 at full throttle
  double max_brake = 10.0;        // m/s^2 at full brake
  double drag_coeff = 0.0006;     // 1/m; deceleration = drag_coeff * speed^2
  double max_steer_angle = 0.43;  // rad at full lock
  std::array<double, 6> gear_ratio_rpm_per_mps = {420, 260, 190, 150, 125, 105};
  double idle_rpm = 900.0;
  double max_rpm = 8000.0;

  void validate() const {
    bool positive = wheelbase > 0 && max_accel > 0 && max_brake > 0 &&
                    drag_coeff > 0 && max_steer_angle > 0 && idle_rpm > 0 &&
                    max_rpm > idle_rpm;
    for (double r : gear_ratio_rpm_per_mps) positive = positive && r > 0;
    for (std::size_t i = 1; i < gear_ratio_rpm_per_mps.size(); ++i)
      positive = positive && gear_ratio_rpm_per_mps[i] < gear_ratio_rpm_per_mps[i - 1];
    if (!positive)
      throw std::invalid_argument(
          "VehicleParams: all parameters must be positive and the gear ratio "
          "table strictly decreasing");
  }
};

inline double rpm_of(double speed_mps, int gear, const VehicleParams& p) {
  double raw = p.gear_ratio_rpm_per_mps[static_cast<std::size_t>(gear - 1)] * speed_mps;
  return std::clamp(raw, p.idle_rpm, p.max_rpm);
}

struct VehicleState {
  Vec2 position;
  double heading = 0.0;  // rad, world frame
  double speed = 0.0;    // m/s, >= 0
  int gear = 1;          // {1..6}
  double rpm = 0.0;
  double s_arc = 0.0;    // arc length of the nearest centerline point
  int lap_count = 0;
};

/// One explicit-Euler step of the bicycle model. Track-relative fields
/// (s_arc, lap_count) are carried over unchanged; the harness refreshes them
/// from the new position.
inline VehicleState step_vehicle(const VehicleState& v, const DriveState& cmd,
                                 const VehicleParams& p, frp::TimeDelta dt) {
  double step = dt.seconds();
  if (step <= 0.0) throw std::invalid_argument("step_vehicle: dt must be > 0");

  VehicleState out = v;
  double steer_angle = cmd.steer * p.max_steer_angle;
  out.heading = v.heading + (v.speed / p.wheelbase) * std::tan(steer_angle) * step;
  out.position = v.position + unit_from_angle(out.heading) * (v.speed * step);
  double dv = (cmd.accel * p.max_accel - cmd.brake * p.max_brake -
               p.drag_coeff * v.speed * v.speed) * step;
  out.speed = std::max(0.0, v.speed + dv);
  out.gear = std::clamp(cmd.gear, 1, 6);
  out.rpm = rpm_of(out.speed, out.gear, p);
  return out;
}

}  // namespace rplatoon
