#pragma once

// Small text helpers shared by the parsing and writing code. Internal to the
// library sources; not installed.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace micromob::detail {

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

inline std::string trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::optional<double> parse_double(std::string_view s) {
  const std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  double value = 0.0;
  const auto rc = std::from_chars(t.data(), t.data() + t.size(), value);
  if (rc.ec != std::errc{} || rc.ptr != t.data() + t.size()) {
    return std::nullopt;
  }
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

inline std::optional<int64_t> parse_i64(std::string_view s) {
  const std::string t = trim(s);
  if (t.empty()) return std::nullopt;
  int64_t value = 0;
  const auto rc = std::from_chars(t.data(), t.data() + t.size(), value);
  if (rc.ec != std::errc{} || rc.ptr != t.data() + t.size()) {
    return std::nullopt;
  }
  return value;
}

/// Shortest representation that round-trips the exact double.
inline std::string format_double(double v) {
  char buf[32];
  const auto rc = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, rc.ptr);
}

}  // namespace micromob::detail
