#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "rplatoon/bus.hpp"
#include "rplatoon/config.hpp"
#include "rplatoon/drivers.hpp"
#include "rplatoon/log.hpp"
#include "rplatoon/sensors.hpp"
#include "rplatoon/telemetry.hpp"
#include "rplatoon/track.hpp"
#include "rplatoon/vehicle.hpp"

// ============================================================================
//  Lockstep execution harness.
//
//  Every step runs six phases with barriers between them:
//    1. sense     - build each CarState (plus bus snapshot injection)
//    2. drive     - step each Driver signal function, clamp the commands
//    3. publish   - push each broadcast onto the bus
//    4. advance   - bus step barrier
//    5. dynamics  - integrate each vehicle
//    6. log       - append telemetry rows in vehicle order
//  Phases 1, 2 and 5 touch only per-vehicle slots, so they may run on one
//  thread per vehicle; results are identical to the sequential schedule.
//
//  Telemetry rows record what the driver saw (sense-time pose) together with
//  the commands it issued that step.
// ============================================================================

namespace rplatoon {

/// Peer vehicles occlude the rangefinder fan as discs of this radius, so a
/// follower's forward beams see the vehicle ahead, not just the track edges.
inline constexpr double kVehicleBodyRadius = 1.0;  // m

struct VehicleReport {
  int laps = 0;
  double max_abs_track_pos = 0.0;
  double dist_raced = 0.0;  // m
  bool off_track = false;   // |trackPos| > 1 was observed
};

struct RunReport {
  std::vector<VehicleReport> vehicles;
  long long steps = 0;
  double sim_time = 0.0;  // s
  double wall_seconds = 0.0;
  long long messages_published = 0;  // nonempty broadcasts
  long long messages_delivered = 0;  // nonempty snapshot entries handed to drivers

  int min_laps() const {
    int m = vehicles.empty() ? 0 : vehicles[0].laps;
    for (const auto& v : vehicles) m = std::min(m, v.laps);
    return m;
  }
  bool any_off_track() const {
    for (const auto& v : vehicles)
      if (v.off_track) return true;
    return false;
  }
};

namespace detail {

// Index-parallel loop over vehicles; each index writes only its own slots.
template <class Fn>
void for_each_vehicle(bool parallel, int n, Fn&& fn) {
  if (!parallel || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  unsigned hw = std::thread::hardware_concurrency();
  int workers = std::min(n, static_cast<int>(hw ? hw : 2));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&fn, w, workers, n] {
      for (int i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

inline double occluded_reading(double track_reading, Vec2 origin, double bearing,
                               const std::vector<Vec2>& peers, std::size_t self) {
  double best = track_reading;
  Vec2 dir = unit_from_angle(bearing);
  for (std::size_t k = 0; k < peers.size(); ++k) {
    if (k == self) continue;
    auto hit = ray_circle_distance(origin, dir, peers[k], kVehicleBodyRadius);
    if (hit && *hit < best) best = *hit;
  }
  return best;
}

}  // namespace detail

/// Runs `drivers` in deterministic lockstep per `cfg`. The config must list
/// one vehicle entry per driver.
inline RunReport start_drivers(std::vector<Driver> drivers, const SimConfig& cfg) {
  cfg.validate();
  if (drivers.size() != cfg.vehicles.size())
    throw std::invalid_argument("start_drivers: one config vehicle entry per driver");

  const int n = static_cast<int>(drivers.size());
  const frp::TimeDelta dt(cfg.dt);
  Track track = cfg.build_track();
  auto bus = cfg.build_bus();

  std::vector<VehicleState> vehicles;
  vehicles.reserve(static_cast<std::size_t>(n));
  for (const auto& vc : cfg.vehicles) vehicles.push_back(place_on_track(track, vc.start_arc, vc.params));

  std::vector<double> lap_time(static_cast<std::size_t>(n), 0.0);
  std::vector<double> dist_raced(static_cast<std::size_t>(n), 0.0);
  std::vector<CarState> sensed(static_cast<std::size_t>(n));
  std::vector<DriveState> commands(static_cast<std::size_t>(n));
  std::vector<TelemetryRow> rows(static_cast<std::size_t>(n));
  std::vector<Vec2> positions(static_cast<std::size_t>(n));
  std::vector<long long> delivered(static_cast<std::size_t>(n), 0);

  std::ofstream log_stream;
  std::optional<TelemetryWriter> writer;
  if (!cfg.log_path.empty()) {
    log_stream.open(cfg.log_path, std::ios::binary | std::ios::trunc);
    if (!log_stream)
      throw std::invalid_argument("start_drivers: cannot open log file " + cfg.log_path);
    writer.emplace(log_stream, cfg.log_format);
  }

  RunReport report;
  report.vehicles.resize(static_cast<std::size_t>(n));
  auto wall_start = std::chrono::steady_clock::now();

  for (long long step = 0; step < cfg.max_steps; ++step) {
    for (int i = 0; i < n; ++i) positions[static_cast<std::size_t>(i)] = vehicles[static_cast<std::size_t>(i)].position;
    bus->set_positions(positions);

    // phase 1: sense
    detail::for_each_vehicle(cfg.parallel, n, [&](int i) {
      auto idx = static_cast<std::size_t>(i);
      CarState cs = sense(track, vehicles[idx], lap_time[idx], dist_raced[idx]);
      if (n > 1 && cs.track[0] != kOffTrackReading) {
        for (int b = 0; b < kRangeBeamCount; ++b)
          cs.track[static_cast<std::size_t>(b)] = detail::occluded_reading(
              cs.track[static_cast<std::size_t>(b)], vehicles[idx].position,
              beam_bearing(vehicles[idx].heading, b), positions, idx);
      }
      cs.communications = bus->snapshot(i);
      long long got = 0;
      for (const auto& e : cs.communications)
        if (!e.text.empty()) ++got;
      delivered[idx] += got;
      TelemetryRow& row = rows[idx];
      row.step = step;
      row.vehicle_id = i;
      row.sim_time = static_cast<double>(step) * cfg.dt;
      row.x = vehicles[idx].position.x;
      row.y = vehicles[idx].position.y;
      row.speed_kmh = cs.speed_x;
      row.rpm = cs.rpm;
      row.gear = cs.gear;
      row.track_pos = cs.track_pos;
      row.angle = cs.angle;
      row.min_forward_range = min_forward_range(cs);
      row.lap_count = vehicles[idx].lap_count;
      sensed[idx] = std::move(cs);
    });

    // phase 2: drive
    detail::for_each_vehicle(cfg.parallel, n, [&](int i) {
      auto idx = static_cast<std::size_t>(i);
      auto [out, next] = drivers[idx].step(dt, sensed[idx]);
      commands[idx] = clamped(out);
      drivers[idx] = std::move(next);
      rows[idx].steer = commands[idx].steer;
      rows[idx].accel = commands[idx].accel;
      rows[idx].broadcast = commands[idx].broadcast;
    });

    // phase 3: publish
    for (int i = 0; i < n; ++i) {
      bus->publish(i, commands[static_cast<std::size_t>(i)].broadcast);
      if (!commands[static_cast<std::size_t>(i)].broadcast.empty())
        ++report.messages_published;
    }

    // phase 4: bus step barrier
    bus->advance();

    // phase 5: dynamics
    detail::for_each_vehicle(cfg.parallel, n, [&](int i) {
      auto idx = static_cast<std::size_t>(i);
      VehicleState next = step_vehicle(vehicles[idx], commands[idx], cfg.vehicles[idx].params, dt);
      auto proj = track.project(next.position);
      int wrap = lap_wrap_delta(track.length(), vehicles[idx].s_arc, proj.s_arc);
      next.s_arc = proj.s_arc;
      next.lap_count = std::max(0, vehicles[idx].lap_count + wrap);
      dist_raced[idx] += vehicles[idx].speed * cfg.dt;
      lap_time[idx] = wrap > 0 ? 0.0 : lap_time[idx] + cfg.dt;
      vehicles[idx] = next;
    });

    // phase 6: log + accounting
    for (int i = 0; i < n; ++i) {
      auto idx = static_cast<std::size_t>(i);
      if (writer) writer->write(rows[idx]);
      auto& vr = report.vehicles[idx];
      double abs_pos = std::abs(sensed[idx].track_pos);
      vr.max_abs_track_pos = std::max(vr.max_abs_track_pos, abs_pos);
      if (abs_pos > 1.0) vr.off_track = true;
    }

    report.steps = step + 1;
    if (cfg.laps_target > 0) {
      bool done = true;
      for (const auto& v : vehicles) done = done && v.lap_count >= cfg.laps_target;
      if (done) break;
    }
  }

  for (int i = 0; i < n; ++i) {
    auto idx = static_cast<std::size_t>(i);
    report.vehicles[idx].laps = vehicles[idx].lap_count;
    report.vehicles[idx].dist_raced = dist_raced[idx];
    report.messages_delivered += delivered[idx];
  }
  report.sim_time = static_cast<double>(report.steps) * cfg.dt;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  log_info("run finished: steps=" + std::to_string(report.steps) +
           " laps(min)=" + std::to_string(report.min_laps()));
  return report;
}

/// Single-vehicle wrapper around start_drivers.
inline RunReport start_driver(Driver driver, const SimConfig& cfg) {
  if (cfg.vehicles.size() != 1)
    throw std::invalid_argument("start_driver: config must list exactly one vehicle");
  std::vector<Driver> one;
  one.push_back(std::move(driver));
  return start_drivers(std::move(one), cfg);
}

}  // namespace rplatoon
