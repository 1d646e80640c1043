#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rplatoon/scrc_types.hpp"
#include "rplatoon/text.hpp"

// ============================================================================
//  SCRC text wire codec.
//
//  Messages are concatenated groups "(name t1 t2 ...)" with space-separated
//  tokens; a group with no tokens serializes as "(name )". Serialization uses
//  a fixed canonical field order and shortest-round-trip reals, so
//  parse(serialize(x)) == x bit-exactly. Parsing accepts groups in any order,
//  ignores unknown group names, and fills missing groups with the type's
//  defaults.
//
//  Platoon extension groups: actions carry "(bcast <msg>)" and sensors carry
//  "(comms <id>:<msg> ...)" where <msg> is percent-encoded ('%20' for space,
//  '%25' for '%') so every message is a single token.
// ============================================================================

namespace rplatoon {

enum class ParseErrorKind { MalformedGroup, WrongArity };

struct ParseError {
  ParseErrorKind kind = ParseErrorKind::MalformedGroup;
  std::size_t offset = 0;  // byte offset into the input where parsing failed
  std::string detail;
};

/// Parse outcome: `value` is meaningful only when no error is set. `clamped`
/// reports that some field was forced back into its legal range.
template <class T>
struct Parsed {
  T value{};
  std::optional<ParseError> error;
  bool clamped = false;

  explicit operator bool() const { return !error.has_value(); }
};

enum class ControlMessage { Identified, Shutdown, Restart, NotControl };

namespace detail {

struct Group {
  std::string_view name;
  std::size_t start = 0;  // offset of '('
  std::vector<std::pair<std::string_view, std::size_t>> tokens;
};

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\0';
}

inline bool is_name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         (c >= '0' && c <= '9') || c == '_';
}

inline std::optional<ParseError> split_groups(std::string_view text,
                                              std::vector<Group>& out) {
  std::size_t i = 0;
  while (i < text.size()) {
    if (is_space(text[i])) {
      ++i;
      continue;
    }
    if (text[i] != '(')
      return ParseError{ParseErrorKind::MalformedGroup, i, "expected '('"};
    Group group;
    group.start = i;
    ++i;
    std::size_t name_start = i;
    while (i < text.size() && is_name_char(text[i])) ++i;
    if (i == name_start)
      return ParseError{ParseErrorKind::MalformedGroup, name_start, "missing group name"};
    group.name = text.substr(name_start, i - name_start);
    while (true) {
      while (i < text.size() && is_space(text[i])) ++i;
      if (i >= text.size())
        return ParseError{ParseErrorKind::MalformedGroup, text.size(),
                          "unterminated group '" + std::string(group.name) + "'"};
      if (text[i] == ')') {
        ++i;
        break;
      }
      if (text[i] == '(')
        return ParseError{ParseErrorKind::MalformedGroup, i, "nested '('"};
      std::size_t tok_start = i;
      while (i < text.size() && !is_space(text[i]) && text[i] != ')' && text[i] != '(')
        ++i;
      group.tokens.emplace_back(text.substr(tok_start, i - tok_start), tok_start);
    }
    out.push_back(std::move(group));
  }
  return std::nullopt;
}

inline void append_group(std::string& out, std::string_view name,
                         std::span<const std::string> tokens) {
  out.push_back('(');
  out.append(name);
  out.push_back(' ');
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out.append(tokens[i]);
  }
  out.push_back(')');
}

inline void append_scalar(std::string& out, std::string_view name, double v) {
  const std::string tok[] = {format_real(v)};
  append_group(out, name, tok);
}

inline void append_scalar(std::string& out, std::string_view name, int v) {
  const std::string tok[] = {format_int(v)};
  append_group(out, name, tok);
}

// Reads the single numeric token of a scalar group.
inline std::optional<ParseError> scalar_of(const Group& g, double& out) {
  if (g.tokens.size() != 1)
    return ParseError{ParseErrorKind::WrongArity, g.start,
                      "group '" + std::string(g.name) + "' takes exactly one value"};
  auto v = parse_real(g.tokens[0].first);
  if (!v)
    return ParseError{ParseErrorKind::MalformedGroup, g.tokens[0].second,
                      "non-numeric token in group '" + std::string(g.name) + "'"};
  out = *v;
  return std::nullopt;
}

inline std::optional<ParseError> scalar_of(const Group& g, int& out) {
  double v = 0.0;
  if (auto err = scalar_of(g, v)) return err;
  // Lenient integer read: round, the range clamp happens afterwards.
  out = static_cast<int>(std::lround(std::clamp(v, -1e9, 1e9)));
  return std::nullopt;
}

}  // namespace detail

inline std::string serialize_sensors(const CarState& cs) {
  std::string out;
  out.reserve(256);
  detail::append_scalar(out, "angle", cs.angle);
  detail::append_scalar(out, "gear", cs.gear);
  detail::append_scalar(out, "rpm", cs.rpm);
  detail::append_scalar(out, "speedX", cs.speed_x);
  detail::append_scalar(out, "speedY", cs.speed_y);
  std::vector<std::string> readings;
  readings.reserve(cs.track.size());
  for (double r : cs.track) readings.push_back(format_real(r));
  detail::append_group(out, "track", readings);
  detail::append_scalar(out, "trackPos", cs.track_pos);
  detail::append_scalar(out, "distRaced", cs.dist_raced);
  detail::append_scalar(out, "distFromStart", cs.dist_from_start);
  detail::append_scalar(out, "lapTime", cs.lap_time);
  std::vector<std::string> comms;
  comms.reserve(cs.communications.size());
  for (const auto& entry : cs.communications)
    comms.push_back(format_int(entry.vehicle_id) + ":" +
                    percent_encode(entry.text, ":"));
  detail::append_group(out, "comms", comms);
  return out;
}

inline Parsed<CarState> parse_sensors(std::string_view text) {
  Parsed<CarState> result;
  std::vector<detail::Group> groups;
  if (auto err = detail::split_groups(text, groups)) {
    result.error = std::move(err);
    return result;
  }
  CarState cs;
  for (const auto& g : groups) {
    std::optional<ParseError> err;
    if (g.name == "angle") err = detail::scalar_of(g, cs.angle);
    else if (g.name == "gear") err = detail::scalar_of(g, cs.gear);
    else if (g.name == "rpm") err = detail::scalar_of(g, cs.rpm);
    else if (g.name == "speedX") err = detail::scalar_of(g, cs.speed_x);
    else if (g.name == "speedY") err = detail::scalar_of(g, cs.speed_y);
    else if (g.name == "trackPos") err = detail::scalar_of(g, cs.track_pos);
    else if (g.name == "distRaced") err = detail::scalar_of(g, cs.dist_raced);
    else if (g.name == "distFromStart") err = detail::scalar_of(g, cs.dist_from_start);
    else if (g.name == "lapTime") err = detail::scalar_of(g, cs.lap_time);
    else if (g.name == "track") {
      if (g.tokens.size() != static_cast<std::size_t>(kRangeBeamCount)) {
        err = ParseError{ParseErrorKind::WrongArity, g.start,
                         "track group takes exactly 19 values"};
      } else {
        for (std::size_t i = 0; i < g.tokens.size() && !err; ++i) {
          auto v = parse_real(g.tokens[i].first);
          if (!v)
            err = ParseError{ParseErrorKind::MalformedGroup, g.tokens[i].second,
                             "non-numeric token in group 'track'"};
          else
            cs.track[i] = *v;
        }
      }
    } else if (g.name == "comms") {
      cs.communications.clear();
      for (const auto& [tok, off] : g.tokens) {
        auto colon = tok.find(':');
        if (colon == std::string_view::npos) {
          err = ParseError{ParseErrorKind::MalformedGroup, off,
                           "comms token without ':' separator"};
          break;
        }
        auto id = parse_int(tok.substr(0, colon));
        if (!id || *id < 0 || *id > 1 << 20) {
          err = ParseError{ParseErrorKind::MalformedGroup, off,
                           "comms token with bad vehicle id"};
          break;
        }
        cs.communications.push_back(
            {static_cast<int>(*id), percent_decode(tok.substr(colon + 1))});
      }
    }
    // unknown group names ignored
    if (err) {
      result.error = std::move(err);
      return result;
    }
  }
  result.value = clamped(cs, &result.clamped);
  return result;
}

inline std::string serialize_actions(const DriveState& ds) {
  std::string out;
  out.reserve(96);
  detail::append_scalar(out, "accel", ds.accel);
  detail::append_scalar(out, "brake", ds.brake);
  detail::append_scalar(out, "clutch", ds.clutch);
  detail::append_scalar(out, "gear", ds.gear);
  detail::append_scalar(out, "steer", ds.steer);
  detail::append_scalar(out, "meta", ds.meta);
  std::vector<std::string> bcast;
  if (!ds.broadcast.empty()) bcast.push_back(percent_encode(ds.broadcast));
  detail::append_group(out, "bcast", bcast);
  return out;
}

inline Parsed<DriveState> parse_actions(std::string_view text) {
  Parsed<DriveState> result;
  std::vector<detail::Group> groups;
  if (auto err = detail::split_groups(text, groups)) {
    result.error = std::move(err);
    return result;
  }
  DriveState ds;
  for (const auto& g : groups) {
    std::optional<ParseError> err;
    if (g.name == "accel") err = detail::scalar_of(g, ds.accel);
    else if (g.name == "brake") err = detail::scalar_of(g, ds.brake);
    else if (g.name == "clutch") err = detail::scalar_of(g, ds.clutch);
    else if (g.name == "gear") err = detail::scalar_of(g, ds.gear);
    else if (g.name == "steer") err = detail::scalar_of(g, ds.steer);
    else if (g.name == "meta") err = detail::scalar_of(g, ds.meta);
    else if (g.name == "bcast") {
      std::string raw;
      for (std::size_t i = 0; i < g.tokens.size(); ++i) {
        if (i) raw.push_back(' ');
        raw.append(percent_decode(g.tokens[i].first));
      }
      ds.broadcast = std::move(raw);
    }
    if (err) {
      result.error = std::move(err);
      return result;
    }
  }
  result.value = clamped(ds, &result.clamped);
  return result;
}

/// Client handshake line: "<clientId>(init a1 ... a19)" with the 19
/// rangefinder mounting angles in degrees.
inline std::string init_message(std::string_view client_id,
                                std::span<const double> beam_angles_deg) {
  if (client_id.empty())
    throw std::invalid_argument("init_message: client id must be nonempty");
  if (beam_angles_deg.size() != static_cast<std::size_t>(kRangeBeamCount))
    throw std::invalid_argument("init_message: expected exactly 19 beam angles");
  for (double a : beam_angles_deg)
    if (!(a >= -90.0 && a <= 90.0))
      throw std::invalid_argument("init_message: beam angles must lie in [-90, 90] deg");
  std::string out(client_id);
  std::vector<std::string> tokens;
  tokens.reserve(beam_angles_deg.size());
  for (double a : beam_angles_deg) tokens.push_back(format_real(a));
  detail::append_group(out, "init", tokens);
  return out;
}

/// Recognizes the server's control markers; anything else is NotControl.
inline ControlMessage parse_control(std::string_view text) {
  while (!text.empty() && detail::is_space(text.back())) text.remove_suffix(1);
  if (text == "***identified***") return ControlMessage::Identified;
  if (text == "***shutdown***") return ControlMessage::Shutdown;
  if (text == "***restart***") return ControlMessage::Restart;
  return ControlMessage::NotControl;
}

}  // namespace rplatoon
