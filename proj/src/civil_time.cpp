#include "micromob/civil_time.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>

namespace micromob {

namespace {

bool read_int(std::string_view text, size_t& pos, int digits_min,
              int digits_max, int& out) {
  size_t end = pos;
  while (end < text.size() && end - pos < static_cast<size_t>(digits_max) &&
         text[end] >= '0' && text[end] <= '9') {
    ++end;
  }
  if (end - pos < static_cast<size_t>(digits_min)) return false;
  const auto rc = std::from_chars(text.data() + pos, text.data() + end, out);
  if (rc.ec != std::errc{}) return false;
  pos = end;
  return true;
}

bool consume(std::string_view text, size_t& pos, char c) {
  if (pos < text.size() && text[pos] == c) {
    ++pos;
    return true;
  }
  return false;
}

}  // namespace

std::optional<CivilTime> civil_from_fields(int year, int month, int day,
                                           int hour, int minute, int second) {
  using namespace std::chrono;
  if (hour < 0 || hour > 23 || minute < 0 || minute > 59 || second < 0 ||
      second > 60) {
    return std::nullopt;
  }
  if (second == 60) second = 59;  // leap seconds collapse
  const year_month_day ymd{std::chrono::year{year},
                           std::chrono::month{static_cast<unsigned>(month)},
                           std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok()) return std::nullopt;
  const sys_days days{ymd};
  CivilTime t;
  t.year = year;
  t.month = month;
  t.day = day;
  t.hour = hour;
  t.minute = minute;
  t.second = second;
  t.epoch_days = static_cast<int32_t>(days.time_since_epoch().count());
  t.epoch_seconds =
      static_cast<int64_t>(t.epoch_days) * 86400 + hour * 3600 + minute * 60 +
      second;
  t.day_of_week = static_cast<int>(weekday{days}.c_encoding());
  return t;
}

std::optional<CivilTime> parse_civil_time(std::string_view text) {
  // Trim surrounding whitespace.
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
    text.remove_prefix(1);
  }
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) {
    text.remove_suffix(1);
  }
  if (text.empty()) return std::nullopt;

  size_t pos = 0;
  int a = 0;
  if (!read_int(text, pos, 1, 4, a)) return std::nullopt;

  int year, month, day;
  bool us_format = false;
  if (consume(text, pos, '-')) {
    year = a;
    if (!read_int(text, pos, 1, 2, month) || !consume(text, pos, '-') ||
        !read_int(text, pos, 1, 2, day)) {
      return std::nullopt;
    }
  } else if (consume(text, pos, '/')) {
    us_format = true;
    month = a;
    if (!read_int(text, pos, 1, 2, day) || !consume(text, pos, '/') ||
        !read_int(text, pos, 1, 4, year)) {
      return std::nullopt;
    }
  } else {
    return std::nullopt;
  }

  int hour = 0, minute = 0, second = 0;
  if (pos < text.size()) {
    if (!consume(text, pos, ' ') && !consume(text, pos, 'T')) {
      return std::nullopt;
    }
    if (!read_int(text, pos, 1, 2, hour) || !consume(text, pos, ':') ||
        !read_int(text, pos, 1, 2, minute)) {
      return std::nullopt;
    }
    if (consume(text, pos, ':')) {
      if (!read_int(text, pos, 1, 2, second)) return std::nullopt;
      if (consume(text, pos, '.')) {  // fractional seconds, ignored
        int frac;
        if (!read_int(text, pos, 1, 9, frac)) return std::nullopt;
      }
    }
    // Optional 12-hour suffix.
    size_t rest = pos;
    while (rest < text.size() && text[rest] == ' ') ++rest;
    if (rest < text.size()) {
      const char c0 = text[rest];
      if ((c0 == 'A' || c0 == 'a' || c0 == 'P' || c0 == 'p') &&
          rest + 1 < text.size() &&
          (text[rest + 1] == 'M' || text[rest + 1] == 'm')) {
        if (hour < 1 || hour > 12) return std::nullopt;
        const bool pm = (c0 == 'P' || c0 == 'p');
        if (hour == 12) hour = pm ? 12 : 0;
        else if (pm) hour += 12;
        pos = rest + 2;
      } else if (c0 == 'Z' || c0 == '+' || c0 == '-') {
        pos = text.size();  // zone designator, ignored
      } else if (!us_format) {
        return std::nullopt;
      }
    }
  }
  return civil_from_fields(year, month, day, hour, minute, second);
}

CivilTime civil_from_epoch_seconds(int64_t epoch_seconds) {
    int64_t days = epoch_seconds / 86400;
    int64_t rem = epoch_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    const std::chrono::sys_days sd{std::chrono::days{days}};
    const std::chrono::year_month_day ymd{sd};
    CivilTime t;
    t.year = static_cast<int>(ymd.year());
    t.month = static_cast<int>(static_cast<unsigned>(ymd.month()));
    t.day = static_cast<int>(static_cast<unsigned>(ymd.day()));
    t.hour = static_cast<int>(rem / 3600);
    t.minute = static_cast<int>((rem % 3600) / 60);
    t.second = static_cast<int>(rem % 60);
    t.epoch_days = static_cast<int32_t>(days);
    t.epoch_seconds = epoch_seconds;
    t.day_of_week = static_cast<int>(std::chrono::weekday{sd}.c_encoding());
    return t;
}

std::string format_iso8601(const CivilTime& t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d", t.year,
                t.month, t.day, t.hour, t.minute, t.second);
  return buf;
}

}  // namespace micromob
