#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rplatoon/bus.hpp"
#include "rplatoon/telemetry.hpp"
#include "rplatoon/text.hpp"
#include "rplatoon/track.hpp"
#include "rplatoon/vehicle.hpp"

// ============================================================================
//  Run configuration. Loadable from a plain-text "key = value" file:
//
//      # one key per line, '#' starts a comment
//      dt = 0.02
//      steps = 60000
//      laps = 1
//      seed = 7
//      parallel = false
//      log = out.csv
//      log_format = csv            # or jsonl
//      track.straight = 200        # stadium track parameters...
//      track.radius = 50
//      track.half_width = 5
//      track.arc_vertices = 64
//      track.file = oval.trk       # ...or a track file (wins over the oval)
//      bus.drop_prob = 0
//      bus.range_limit = 100       # omit for unlimited range
//      params.drag_coeff = 0.0006  # vehicle parameters for all vehicles
//      vehicle = solo @ 0          # driver name @ start arc offset (m); repeat
//      vehicle = platoon:30 @ 18
// ============================================================================

namespace rplatoon {

struct VehicleConfig {
  std::string driver = "solo";
  double start_arc = 0.0;  // m along the centerline
  VehicleParams params;
};

struct SimConfig {
  double dt = 0.02;  // s
  long long max_steps = 60000;
  int laps_target = 0;  // 0: run max_steps; >0: stop once every vehicle has them
  std::uint64_t seed = 0;
  bool parallel = false;

  std::string log_path;  // empty: no telemetry file
  LogFormat log_format = LogFormat::Csv;

  std::string track_file;  // when set, overrides the oval parameters
  double oval_straight = 200.0;
  double oval_radius = 50.0;
  double oval_half_width = 5.0;
  int oval_arc_vertices = 64;

  double drop_probability = 0.0;
  std::optional<double> range_limit;

  VehicleParams default_params;  // seeds every vehicle added afterwards
  std::vector<VehicleConfig> vehicles;

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt))
      throw std::invalid_argument("config: dt must be positive");
    if (max_steps <= 0) throw std::invalid_argument("config: steps must be positive");
    if (laps_target < 0) throw std::invalid_argument("config: laps must be >= 0");
    if (!(drop_probability >= 0.0 && drop_probability <= 1.0))
      throw std::invalid_argument("config: bus.drop_prob must be in [0,1]");
    if (range_limit && !(*range_limit > 0.0))
      throw std::invalid_argument("config: bus.range_limit must be positive");
    if (vehicles.empty()) throw std::invalid_argument("config: need at least one vehicle");
    for (std::size_t i = 0; i < vehicles.size(); ++i) {
      vehicles[i].params.validate();
      for (std::size_t j = i + 1; j < vehicles.size(); ++j)
        if (vehicles[i].start_arc == vehicles[j].start_arc)
          throw std::invalid_argument("config: vehicle start offsets must be distinct");
    }
  }

  Track build_track() const {
    if (!track_file.empty()) return load_track_file(track_file);
    return make_oval(oval_straight, oval_radius, oval_half_width, oval_arc_vertices);
  }

  std::unique_ptr<MessageBus> build_bus() const {
    std::unique_ptr<MessageBus> bus =
        std::make_unique<PlatoonBus>(static_cast<int>(vehicles.size()));
    if (drop_probability > 0.0 || range_limit)
      bus = lossy_wrap(std::move(bus), drop_probability, range_limit, seed);
    return bus;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline double require_real(std::string_view key, std::string_view value) {
  auto v = parse_real(value);
  if (!v) throw std::invalid_argument("config: bad number for '" + std::string(key) + "'");
  return *v;
}

inline long long require_int(std::string_view key, std::string_view value) {
  auto v = parse_int(value);
  if (!v) throw std::invalid_argument("config: bad integer for '" + std::string(key) + "'");
  return *v;
}

inline bool require_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument("config: bad boolean for '" + std::string(key) + "'");
}

inline void apply_key(SimConfig& cfg, std::string_view key, std::string_view value) {
  if (key == "dt") cfg.dt = require_real(key, value);
  else if (key == "steps") cfg.max_steps = require_int(key, value);
  else if (key == "laps") cfg.laps_target = static_cast<int>(require_int(key, value));
  else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(require_int(key, value));
  else if (key == "parallel") cfg.parallel = require_bool(key, value);
  else if (key == "log") cfg.log_path = std::string(value);
  else if (key == "log_format") {
    if (value == "csv") cfg.log_format = LogFormat::Csv;
    else if (value == "jsonl") cfg.log_format = LogFormat::Jsonl;
    else throw std::invalid_argument("config: log_format must be csv or jsonl");
  } else if (key == "track.file") cfg.track_file = std::string(value);
  else if (key == "track.straight") cfg.oval_straight = require_real(key, value);
  else if (key == "track.radius") cfg.oval_radius = require_real(key, value);
  else if (key == "track.half_width") cfg.oval_half_width = require_real(key, value);
  else if (key == "track.arc_vertices")
    cfg.oval_arc_vertices = static_cast<int>(require_int(key, value));
  else if (key == "bus.drop_prob") cfg.drop_probability = require_real(key, value);
  else if (key == "bus.range_limit") cfg.range_limit = require_real(key, value);
  else if (key == "params.wheelbase" || key == "params.max_accel" ||
           key == "params.max_brake" || key == "params.drag_coeff" ||
           key == "params.max_steer_angle" || key == "params.idle_rpm" ||
           key == "params.max_rpm") {
    double v = require_real(key, value);
    auto set = [&](VehicleParams& p) {
      if (key == "params.wheelbase") p.wheelbase = v;
      else if (key == "params.max_accel") p.max_accel = v;
      else if (key == "params.max_brake") p.max_brake = v;
      else if (key == "params.drag_coeff") p.drag_coeff = v;
      else if (key == "params.max_steer_angle") p.max_steer_angle = v;
      else if (key == "params.idle_rpm") p.idle_rpm = v;
      else p.max_rpm = v;
    };
    // applies to vehicles declared before and after this line
    for (auto& vc : cfg.vehicles) set(vc.params);
    set(cfg.default_params);
  } else if (key == "vehicle") {
    auto at = value.find('@');
    if (at == std::string_view::npos)
      throw std::invalid_argument("config: vehicle line needs '<driver> @ <arc>'");
    VehicleConfig vc;
    vc.driver = std::string(trim(value.substr(0, at)));
    vc.start_arc = require_real(key, trim(value.substr(at + 1)));
    vc.params = cfg.default_params;
    if (vc.driver.empty())
      throw std::invalid_argument("config: vehicle line needs a driver name");
    cfg.vehicles.push_back(std::move(vc));
  } else {
    throw std::invalid_argument("config: unknown key '" + std::string(key) + "'");
  }
}

}  // namespace detail

inline SimConfig load_config(std::istream& in) {
  SimConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::string_view sv = detail::trim(line);
    if (sv.empty()) continue;
    auto eq = sv.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("config: missing '=' on line " + std::to_string(line_no));
    auto key = detail::trim(sv.substr(0, eq));
    auto value = detail::trim(sv.substr(eq + 1));
    detail::apply_key(cfg, key, value);
  }
  return cfg;
}

inline SimConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path);
  return load_config(in);
}

}  // namespace rplatoon
