#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rplatoon/frp.hpp"
#include "rplatoon/scrc_types.hpp"
#include "rplatoon/text.hpp"

// ============================================================================
//  Vehicle controllers as signal functions over CarState -> DriveState.
//
//  The control laws are small pure functions lifted into the FRP kernel; the
//  only state is the previous gear, held in a feedback loop so the shift
//  hysteresis sees its own last decision.
// ============================================================================

namespace rplatoon {

using Driver = frp::SignalFunction<CarState, DriveState>;

/// Gear hysteresis: upshift above 6000 rpm, downshift below 3000, clamped to
/// the drivable range {1..6}.
inline int shifting(double rpm, int gear) {
  if (rpm > 6000.0) return std::min(6, gear + 1);
  if (rpm < 3000.0) return std::max(1, gear - 1);
  return gear;
}

/// Lane keeping: heading error scaled to full lock at pi/14 rad, with a weak
/// centering term on the lateral offset. Clipped to [-1, 1].
inline double steering(double angle, double track_pos) {
  double turns = angle * 14.0 / std::numbers::pi;
  double centering = turns - track_pos * 0.1;
  return std::clamp(centering, -1.0, 1.0);
}

/// Bang-bang throttle with a speed target that shrinks while steering.
inline double gas(double speed_kmh, double steer) {
  return speed_kmh < (100.0 - steer * 50.0) ? 1.0 : 0.0;
}

/// Collision-imminence request: ask the platoon to speed up when something
/// sits closer than 3 m ahead.
inline Message request(double dist) { return dist < 3.0 ? "faster" : ""; }

/// Raises the target speed by 10 km/h while any peer requests "faster".
inline double adjust_speed(const std::vector<Message>& comms, double target_kmh) {
  for (const auto& m : comms)
    if (m == "faster") return target_kmh + 10.0;
  return target_kmh;
}

inline std::vector<Message> messages_of(const std::vector<CommEntry>& comms) {
  std::vector<Message> out;
  out.reserve(comms.size());
  for (const auto& e : comms) out.push_back(e.text);
  return out;
}

/// Minimum reading among the beams within +-30 deg of straight ahead.
/// Off-track readings (-1) are ignored; an open road reads the sensor cap.
inline double min_forward_range(const CarState& cs) {
  double best = kRangeCapMeters;
  for (int i = 6; i <= 12; ++i) {
    double r = cs.track[static_cast<std::size_t>(i)];
    if (r >= 0.0 && r < best) best = r;
  }
  return best;
}

/// Solo controller: gear from the shift hysteresis fed back through a unit
/// delay (initial gear 0), steer from (angle, trackPos), gas from
/// (speedX, steer); everything else stays at the DriveState defaults.
inline Driver my_driver() {
  auto body = frp::lift_pure<std::pair<CarState, int>>(
      [](const std::pair<CarState, int>& in) {
        const CarState& cs = in.first;
        int g = shifting(cs.rpm, in.second);
        double s = steering(cs.angle, cs.track_pos);
        double a = gas(cs.speed_x, s);
        DriveState out;
        out.accel = a;
        out.gear = g;
        out.steer = s;
        return std::pair<DriveState, int>(std::move(out), g);
      });
  return frp::feedback(0, std::move(body));
}

/// Platooning controller: keeps the solo steering and shifting, but drives
/// the throttle toward a target speed that any peer can raise by requesting
/// "faster", and broadcasts its own request when the road ahead closes up.
/// The target is recomputed from the base every step, so a raise lasts only
/// as long as the requests keep coming.
inline Driver platoon_driver(double base_target_kmh) {
  auto body = frp::lift_pure<std::pair<CarState, int>>(
      [base_target_kmh](const std::pair<CarState, int>& in) {
        const CarState& cs = in.first;
        int g = shifting(cs.rpm, in.second);
        double s = steering(cs.angle, cs.track_pos);
        double target = adjust_speed(messages_of(cs.communications), base_target_kmh);
        DriveState out;
        out.accel = cs.speed_x < target ? 1.0 : 0.0;
        out.gear = g;
        out.steer = s;
        out.broadcast = request(min_forward_range(cs));
        return std::pair<DriveState, int>(std::move(out), g);
      });
  return frp::feedback(0, std::move(body));
}

inline constexpr double kDefaultPlatoonTargetKmh = 80.0;

/// Driver registry used by the harness and CLI: "solo", "parked", "platoon",
/// or "platoon:<target km/h>".
inline Driver make_driver(std::string_view name) {
  if (name == "solo") return my_driver();
  if (name == "parked") return frp::constant<CarState>(DriveState{});
  if (name == "platoon") return platoon_driver(kDefaultPlatoonTargetKmh);
  if (name.starts_with("platoon:")) {
    auto target = parse_real(name.substr(8));
    if (!target || !(*target > 0.0))
      throw std::invalid_argument("make_driver: bad platoon target in '" +
                                  std::string(name) + "'");
    return platoon_driver(*target);
  }
  throw std::invalid_argument("make_driver: unknown driver '" + std::string(name) +
                              "' (expected solo, parked, platoon, platoon:<kmh>)");
}

}  // namespace rplatoon
