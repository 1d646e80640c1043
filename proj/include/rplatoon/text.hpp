#pragma once

#include <charconv>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

// Locale-independent number/text helpers shared by the wire codec and the
// telemetry writer. Reals are printed as the shortest decimal that parses
// back to the identical binary value, which keeps golden files bit-stable.

namespace rplatoon {

inline std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::string format_int(long long v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// Parses a whole token as a double; rejects trailing garbage.
inline std::optional<double> parse_real(std::string_view token) {
  double out = 0.0;
  const char* end = token.data() + token.size();
  auto res = std::from_chars(token.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end) return std::nullopt;
  return out;
}

inline std::optional<long long> parse_int(std::string_view token) {
  long long out = 0;
  const char* end = token.data() + token.size();
  auto res = std::from_chars(token.data(), end, out);
  if (res.ec != std::errc() || res.ptr != end) return std::nullopt;
  return out;
}

namespace detail {

inline char hex_digit(unsigned v) { return "0123456789ABCDEF"[v & 0xF]; }

inline int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace detail

/// Percent-encodes a string into a single whitespace-free token. Always
/// encodes '%', whitespace, parentheses, non-printable bytes, and every byte
/// listed in `extra`.
inline std::string percent_encode(std::string_view s, std::string_view extra = {}) {
  std::string out;
  out.reserve(s.size());
  for (unsigned char c : s) {
    bool escape = c == '%' || c <= 0x20 || c > 0x7e || c == '(' || c == ')' ||
                  extra.find(static_cast<char>(c)) != std::string_view::npos;
    if (escape) {
      out.push_back('%');
      out.push_back(detail::hex_digit(c >> 4));
      out.push_back(detail::hex_digit(c));
    } else {
      out.push_back(static_cast<char>(c));
    }
  }
  return out;
}

/// Inverse of percent_encode; malformed escapes pass through literally.
inline std::string percent_decode(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      int hi = detail::hex_value(s[i + 1]);
      int lo = detail::hex_value(s[i + 2]);
      if (hi >= 0 && lo >= 0) {
        out.push_back(static_cast<char>(hi * 16 + lo));
        i += 2;
        continue;
      }
    }
    out.push_back(s[i]);
  }
  return out;
}

}  // namespace rplatoon
