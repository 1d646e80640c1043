#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>
#include <string_view>

namespace rplatoon {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

/// Level comes from REACTIVE_PLATOON_LOG_LEVEL (error|warn|info|debug),
/// read once; unset or unrecognized values mean warn.
inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("REACTIVE_PLATOON_LOG_LEVEL");
    std::string_view v = env ? env : "";
    if (v == "error") return LogLevel::Error;
    if (v == "info") return LogLevel::Info;
    if (v == "debug") return LogLevel::Debug;
    return LogLevel::Warn;
  }();
  return level;
}

inline void log_msg(LogLevel level, const std::string& msg) {
  if (level > log_level()) return;
  static constexpr const char* tags[] = {"error", "warn", "info", "debug"};
  std::fprintf(stderr, "rplatoon [%s] %s\n", tags[static_cast<int>(level)], msg.c_str());
}

inline void log_error(const std::string& msg) { log_msg(LogLevel::Error, msg); }
inline void log_warn(const std::string& msg) { log_msg(LogLevel::Warn, msg); }
inline void log_info(const std::string& msg) { log_msg(LogLevel::Info, msg); }
inline void log_debug(const std::string& msg) { log_msg(LogLevel::Debug, msg); }

}  // namespace rplatoon
