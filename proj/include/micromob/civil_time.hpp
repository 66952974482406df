#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace micromob {

/// Wall-clock timestamp without zone information. Open trip exports carry
/// local times; everything downstream treats them as-is.
struct CivilTime {
  int year = 1970;
  int month = 1;  // 1-12
  int day = 1;    // 1-31
  int hour = 0;
  int minute = 0;
  int second = 0;
  int64_t epoch_seconds = 0;  // seconds since 1970-01-01 00:00:00, same clock
  int32_t epoch_days = 0;     // calendar date as days since 1970-01-01
  int day_of_week = 4;        // 0 = Sunday

  friend bool operator==(const CivilTime& a, const CivilTime& b) {
    return a.epoch_seconds == b.epoch_seconds;
  }
};

/// Builds a CivilTime from calendar fields; empty if the date is invalid.
std::optional<CivilTime> civil_from_fields(int year, int month, int day,
                                           int hour, int minute, int second);

/// Decomposes seconds-since-epoch back into calendar fields.
CivilTime civil_from_epoch_seconds(int64_t epoch_seconds);

/// Parses "2019-01-07T08:15:00" (T or space separator, optional fractional
/// seconds and zone suffix, both ignored) and "01/07/2019 08:15:00 AM".
std::optional<CivilTime> parse_civil_time(std::string_view text);

/// "YYYY-MM-DDTHH:MM:SS".
std::string format_iso8601(const CivilTime& t);

}  // namespace micromob
