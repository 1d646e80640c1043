// reactive-platoon command line tool.
//
// Subcommands:
//   run-solo     one vehicle on the track, lockstep simulation
//   run-platoon  several communicating vehicles in lockstep
//   scrc-client  drive an external SCRC-speaking server over UDP
//   codec-check  round-trip a file of wire messages
//   make-track   emit a stadium track file
//
// Exit codes: 0 success, 1 run failure (off-track, or laps demanded but not
// completed), 2 configuration/usage error.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rplatoon/config.hpp"
#include "rplatoon/drivers.hpp"
#include "rplatoon/harness.hpp"
#include "rplatoon/log.hpp"
#include "rplatoon/scrc_client.hpp"
#include "rplatoon/scrc_codec.hpp"
#include "rplatoon/track.hpp"

namespace {

using namespace rplatoon;

struct CommonFlags {
  std::string config_path;
  std::optional<double> dt;
  std::optional<long long> steps;
  std::optional<int> laps;
  std::optional<std::string> log_path;
  std::optional<std::string> log_format;
  std::optional<std::uint64_t> seed;
  std::optional<double> drop_prob;
  std::optional<double> range_limit;
  bool parallel = false;
  std::optional<double> straight;
  std::optional<double> radius;
  std::optional<double> half_width;
  std::optional<int> arc_vertices;
  std::optional<std::string> track_file;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "configuration file (key = value)");
  cmd->add_option("--dt", f.dt, "step size in seconds (default 0.02)");
  cmd->add_option("--steps", f.steps, "maximum number of steps");
  cmd->add_option("--laps", f.laps, "stop after this many laps; counts as failure if unmet");
  cmd->add_option("--log", f.log_path, "telemetry output file");
  cmd->add_option("--log-format", f.log_format, "telemetry format: csv or jsonl");
  cmd->add_option("--seed", f.seed, "seed for the lossy bus");
  cmd->add_option("--drop-prob", f.drop_prob, "bus drop probability in [0,1]");
  cmd->add_option("--range-limit", f.range_limit, "bus delivery range limit in meters");
  cmd->add_flag("--parallel", f.parallel, "run the per-vehicle phases on worker threads");
  cmd->add_option("--straight", f.straight, "oval straight length (m)");
  cmd->add_option("--radius", f.radius, "oval corner radius (m)");
  cmd->add_option("--half-width", f.half_width, "track half width (m)");
  cmd->add_option("--arc-vertices", f.arc_vertices, "oval vertices per corner arc");
  cmd->add_option("--track-file", f.track_file, "track file instead of the oval");
}

SimConfig resolve_config(const CommonFlags& f) {
  SimConfig cfg;
  if (!f.config_path.empty()) cfg = load_config_file(f.config_path);
  if (f.dt) cfg.dt = *f.dt;
  if (f.steps) cfg.max_steps = *f.steps;
  if (f.laps) cfg.laps_target = *f.laps;
  if (f.log_path) cfg.log_path = *f.log_path;
  if (f.log_format) {
    if (*f.log_format == "csv") cfg.log_format = LogFormat::Csv;
    else if (*f.log_format == "jsonl") cfg.log_format = LogFormat::Jsonl;
    else throw std::invalid_argument("--log-format must be csv or jsonl");
  }
  if (f.seed) cfg.seed = *f.seed;
  if (f.drop_prob) cfg.drop_probability = *f.drop_prob;
  if (f.range_limit) cfg.range_limit = *f.range_limit;
  if (f.parallel) cfg.parallel = true;
  if (f.straight) cfg.oval_straight = *f.straight;
  if (f.radius) cfg.oval_radius = *f.radius;
  if (f.half_width) cfg.oval_half_width = *f.half_width;
  if (f.arc_vertices) cfg.oval_arc_vertices = *f.arc_vertices;
  if (f.track_file) cfg.track_file = *f.track_file;
  return cfg;
}

void print_report(const RunReport& report) {
  std::printf("steps=%lld sim_time=%ss wall=%ss published=%lld delivered=%lld\n",
              report.steps, format_real(report.sim_time).c_str(),
              format_real(report.wall_seconds).c_str(), report.messages_published,
              report.messages_delivered);
  for (std::size_t i = 0; i < report.vehicles.size(); ++i) {
    const auto& v = report.vehicles[i];
    std::printf("vehicle %zu: laps=%d dist=%sm max|trackPos|=%s%s\n", i, v.laps,
                format_real(v.dist_raced).c_str(),
                format_real(v.max_abs_track_pos).c_str(),
                v.off_track ? " OFF-TRACK" : "");
  }
}

int run_outcome(const RunReport& report, const SimConfig& cfg) {
  print_report(report);
  bool failed = report.any_off_track() ||
                (cfg.laps_target > 0 && report.min_laps() < cfg.laps_target);
  return failed ? 1 : 0;
}

int cmd_run_solo(const CommonFlags& flags, const std::string& driver_name,
                 double start_arc) {
  SimConfig cfg = resolve_config(flags);
  if (cfg.vehicles.empty()) {
    VehicleConfig vc;
    vc.driver = driver_name;
    vc.start_arc = start_arc;
    vc.params = cfg.default_params;
    cfg.vehicles.push_back(vc);
  }
  if (cfg.vehicles.size() != 1)
    throw std::invalid_argument("run-solo needs exactly one vehicle");
  auto report = start_driver(make_driver(cfg.vehicles[0].driver), cfg);
  return run_outcome(report, cfg);
}

int cmd_run_platoon(const CommonFlags& flags, const std::string& driver_list,
                    const std::string& offset_list) {
  SimConfig cfg = resolve_config(flags);
  if (cfg.vehicles.empty()) {
    std::vector<std::string> names;
    std::string cur;
    for (char c : driver_list + ",") {
      if (c == ',') {
        if (!cur.empty()) names.push_back(cur);
        cur.clear();
      } else cur.push_back(c);
    }
    std::vector<double> offsets;
    if (!offset_list.empty()) {
      for (char c : offset_list + ",") {
        if (c == ',') {
          if (!cur.empty()) {
            auto v = parse_real(cur);
            if (!v) throw std::invalid_argument("--offsets: bad number '" + cur + "'");
            offsets.push_back(*v);
          }
          cur.clear();
        } else cur.push_back(c);
      }
      if (offsets.size() != names.size())
        throw std::invalid_argument("--offsets must list one value per driver");
    } else {
      for (std::size_t i = 0; i < names.size(); ++i)
        offsets.push_back(-10.0 * static_cast<double>(i));  // 10 m spacing behind the lead
    }
    for (std::size_t i = 0; i < names.size(); ++i) {
      VehicleConfig vc;
      vc.driver = names[i];
      vc.start_arc = offsets[i];
      vc.params = cfg.default_params;
      cfg.vehicles.push_back(vc);
    }
  }
  std::vector<Driver> drivers;
  drivers.reserve(cfg.vehicles.size());
  for (const auto& vc : cfg.vehicles) drivers.push_back(make_driver(vc.driver));
  auto report = start_drivers(std::move(drivers), cfg);
  return run_outcome(report, cfg);
}

int cmd_codec_check(const std::string& path, const std::string& kind) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("codec-check: cannot open " + path);
  std::string line;
  std::size_t line_no = 0;
  int failures = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;

    bool as_actions;
    if (kind == "sensors") as_actions = false;
    else if (kind == "actions") as_actions = true;
    else {
      // auto: action-only group names decide, sensors otherwise
      as_actions = false;
      for (const char* name : {"(accel", "(brake", "(clutch", "(steer", "(meta", "(bcast"})
        if (line.find(name) != std::string::npos) as_actions = true;
    }

    auto describe = [&](const ParseError& e) {
      std::fprintf(stderr, "%s:%zu: parse error at byte %zu: %s\n", path.c_str(),
                   line_no, e.offset, e.detail.c_str());
      ++failures;
    };
    if (as_actions) {
      auto first = parse_actions(line);
      if (!first) { describe(*first.error); continue; }
      auto second = parse_actions(serialize_actions(first.value));
      if (!second || !(second.value == first.value)) {
        std::fprintf(stderr, "%s:%zu: action round-trip mismatch\n", path.c_str(), line_no);
        ++failures;
      }
    } else {
      auto first = parse_sensors(line);
      if (!first) { describe(*first.error); continue; }
      auto second = parse_sensors(serialize_sensors(first.value));
      if (!second || !(second.value == first.value)) {
        std::fprintf(stderr, "%s:%zu: sensor round-trip mismatch\n", path.c_str(), line_no);
        ++failures;
      }
    }
  }
  if (failures == 0) std::printf("codec-check: %zu lines ok\n", line_no);
  return failures == 0 ? 0 : 1;
}

int cmd_make_track(double straight, double radius, double half_width, int arc_vertices,
                   const std::string& out_path) {
  Track track = make_oval(straight, radius, half_width, arc_vertices);
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::invalid_argument("make-track: cannot open " + out_path);
  save_track(track, out);
  std::printf("wrote %s (length %sm, half width %sm)\n", out_path.c_str(),
              format_real(track.length()).c_str(),
              format_real(track.half_width()).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"reactive-platoon: FRP vehicle controllers on a 2-D track simulator"};
  app.require_subcommand(1);

  CommonFlags solo_flags;
  std::string solo_driver = "solo";
  double solo_offset = 0.0;
  auto* solo = app.add_subcommand("run-solo", "run one vehicle");
  add_common_flags(solo, solo_flags);
  solo->add_option("--driver", solo_driver, "driver name (solo, parked, platoon[:kmh])");
  solo->add_option("--offset", solo_offset, "start arc offset in meters");

  CommonFlags platoon_flags;
  std::string drivers_arg = "platoon,platoon,platoon";
  std::string offsets_arg;
  auto* platoon = app.add_subcommand("run-platoon", "run communicating vehicles");
  add_common_flags(platoon, platoon_flags);
  platoon->add_option("--drivers", drivers_arg, "comma-separated driver names");
  platoon->add_option("--offsets", offsets_arg, "comma-separated start arcs (m)");

  std::string client_host = "127.0.0.1";
  int client_port = 3001;
  std::string client_id = "SCR";
  std::string client_driver = "solo";
  double client_dt = 0.02;
  auto* client = app.add_subcommand("scrc-client", "drive an external SCRC server");
  client->add_option("--host", client_host, "server host");
  client->add_option("--port", client_port, "server UDP port");
  client->add_option("--id", client_id, "client id sent in the handshake");
  client->add_option("--driver", client_driver, "driver name");
  client->add_option("--dt", client_dt, "controller step size in seconds");

  std::string check_path;
  std::string check_kind = "auto";
  auto* check = app.add_subcommand("codec-check", "round-trip a file of wire messages");
  check->add_option("file", check_path, "one message per line")->required();
  check->add_option("--kind", check_kind, "sensors, actions, or auto");

  double mk_straight = 200, mk_radius = 50, mk_half_width = 5;
  int mk_vertices = 64;
  std::string mk_out = "oval.trk";
  auto* mk = app.add_subcommand("make-track", "emit a stadium track file");
  mk->add_option("--straight", mk_straight, "straight length (m)");
  mk->add_option("--radius", mk_radius, "corner radius (m)");
  mk->add_option("--half-width", mk_half_width, "half width (m)");
  mk->add_option("--arc-vertices", mk_vertices, "vertices per corner arc");
  mk->add_option("--out", mk_out, "output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (solo->parsed()) return cmd_run_solo(solo_flags, solo_driver, solo_offset);
    if (platoon->parsed()) return cmd_run_platoon(platoon_flags, drivers_arg, offsets_arg);
    if (client->parsed()) {
      ScrcClientConfig ccfg;
      ccfg.host = client_host;
      ccfg.port = client_port;
      ccfg.client_id = client_id;
      ccfg.dt = client_dt;
      run_scrc_client(make_driver(client_driver), ccfg);
      return 0;
    }
    if (check->parsed()) return cmd_codec_check(check_path, check_kind);
    if (mk->parsed()) return cmd_make_track(mk_straight, mk_radius, mk_half_width,
                                            mk_vertices, mk_out);
  } catch (const std::invalid_argument& e) {
    rplatoon::log_error(e.what());
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
