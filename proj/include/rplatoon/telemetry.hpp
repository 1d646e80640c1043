#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "rplatoon/scrc_types.hpp"
#include "rplatoon/text.hpp"

// One telemetry row per vehicle per step: the pose and sensor values the
// driver saw plus the commands it issued that step. Reals use shortest
// round-trip formatting, so files are bit-identical across reruns.

namespace rplatoon {

struct TelemetryRow {
  long long step = 0;
  int vehicle_id = 0;
  double sim_time = 0.0;  // s
  double x = 0.0;         // m
  double y = 0.0;         // m
  double speed_kmh = 0.0;
  double rpm = 0.0;
  int gear = 0;
  double steer = 0.0;
  double accel = 0.0;
  double track_pos = 0.0;
  double angle = 0.0;  // rad
  double min_forward_range = 0.0;  // m
  Message broadcast;
  int lap_count = 0;
};

enum class LogFormat { Csv, Jsonl };

class TelemetryWriter {
 public:
  TelemetryWriter(std::ostream& out, LogFormat format) : out_(out), format_(format) {
    if (format_ == LogFormat::Csv)
      out_ << "step,vehicle,time,x,y,speed_kmh,rpm,gear,steer,accel,"
              "track_pos,angle,min_forward_range,broadcast,lap\n";
  }

  void write(const TelemetryRow& r) {
    if (format_ == LogFormat::Csv) {
      out_ << format_int(r.step) << ',' << format_int(r.vehicle_id) << ','
           << format_real(r.sim_time) << ',' << format_real(r.x) << ','
           << format_real(r.y) << ',' << format_real(r.speed_kmh) << ','
           << format_real(r.rpm) << ',' << format_int(r.gear) << ','
           << format_real(r.steer) << ',' << format_real(r.accel) << ','
           << format_real(r.track_pos) << ',' << format_real(r.angle) << ','
           << format_real(r.min_forward_range) << ','
           << percent_encode(r.broadcast, ",") << ','
           << format_int(r.lap_count) << '\n';
    } else {
      nlohmann::ordered_json j{{"step", r.step},
                               {"vehicle", r.vehicle_id},
                               {"time", r.sim_time},
                               {"x", r.x},
                               {"y", r.y},
                               {"speed_kmh", r.speed_kmh},
                               {"rpm", r.rpm},
                               {"gear", r.gear},
                               {"steer", r.steer},
                               {"accel", r.accel},
                               {"track_pos", r.track_pos},
                               {"angle", r.angle},
                               {"min_forward_range", r.min_forward_range},
                               {"broadcast", r.broadcast},
                               {"lap", r.lap_count}};
      out_ << j.dump() << '\n';
    }
  }

 private:
  std::ostream& out_;
  LogFormat format_;
};

}  // namespace rplatoon
