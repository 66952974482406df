#include "fixture.hpp"

#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

#include "micromob/civil_time.hpp"
#include "micromob/errors.hpp"
#include "micromob/rng.hpp"

namespace micromob::testing {

namespace {

constexpr uint64_t kRows = 10000;
constexpr uint64_t kSeed = 20181201;
constexpr int kSpanDays = 56;  // 2018-12-01 .. 2019-01-25

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"") == std::string::npos) return field;
  std::string quoted = "\"";
  for (const char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

}  // namespace

FixtureStats write_fixture_csv(std::ostream& out) {
  FixtureStats stats;
  Rng rng(kSeed);

  out << "ID,Device ID,Vehicle Type,Trip Duration,Trip Distance,Start Time,"
         "End Time,Month,Hour,Day of Week,Year,Council District (Start),"
         "Council District (End),Census Tract Start,Census Tract End\n";

  const auto origin = civil_from_fields(2018, 12, 1, 0, 0, 0);
  if (!origin) throw DomainError("fixture origin date invalid");

  char buffer[64];
  for (uint64_t i = 0; i < kRows; ++i) {
    ++stats.rows_total;

    // Draws happen unconditionally so row contents stay aligned even for
    // the rows later overwritten with malformed fields.
    const bool is_bicycle = rng.unit() < 0.45;
    const int day_offset = static_cast<int>(rng.below(kSpanDays));
    const int hour = static_cast<int>(rng.below(24));
    const int minute = static_cast<int>(rng.below(60));
    const int second = static_cast<int>(rng.below(60));
    const double noise = rng.normal(0.0, 0.22);
    const int duration_s = 150 + static_cast<int>(rng.below(2400));
    const uint64_t device = 100 + rng.below(900);

    const CivilTime start = civil_from_epoch_seconds(
        origin->epoch_seconds +
        static_cast<int64_t>(day_offset) * 86400 + hour * 3600 + minute * 60 +
        second);
    const bool weekend = start.day_of_week == 0 || start.day_of_week == 6;
    const bool daytime = hour >= 6 && hour < 18;

    double speed = (is_bicycle ? 3.1 : 2.45) + (weekend ? 0.40 : -0.10) +
                   (daytime ? 0.30 : -0.25) + noise;
    if (speed < 1.3) speed = 1.3;
    if (speed > 7.0) speed = 7.0;

    // ~0.2% malformed rows, cycling through the parse-failure kinds.
    const bool malformed = i % 500 == 137;
    // ~0.4% parsed rows that the default filter must drop.
    const bool outside_filter = !malformed && i % 250 == 31;

    std::string trip_id = "T" + std::to_string(100000 + i);
    std::string vehicle = is_bicycle ? "bicycle" : "scooter";
    std::string duration = std::to_string(duration_s);
    std::snprintf(buffer, sizeof(buffer), "%.2f", speed * duration_s);
    std::string distance = buffer;
    const CivilTime end =
        civil_from_epoch_seconds(start.epoch_seconds + duration_s);
    std::snprintf(buffer, sizeof(buffer),
                  "%04d-%02d-%02d %02d:%02d:%02d", start.year, start.month,
                  start.day, start.hour, start.minute, start.second);
    std::string start_text = buffer;
    std::snprintf(buffer, sizeof(buffer),
                  "%04d-%02d-%02d %02d:%02d:%02d", end.year, end.month,
                  end.day, end.hour, end.minute, end.second);
    std::string end_text = buffer;

    int dow_column = start.day_of_week;
    int hour_column = start.hour;
    if (!malformed && !outside_filter) {
      if (i % 400 == 3) {  // wrong Day of Week column; the derived value wins
        dow_column = (dow_column + 1) % 7;
        ++stats.dow_conflicts;
      } else if (i % 400 == 203) {  // wrong Hour column
        hour_column = (hour_column + 5) % 24;
        ++stats.hour_conflicts;
      }
    }

    if (malformed) {
      ++stats.rows_malformed;
      switch ((i / 500) % 5) {
        case 0:
          duration = "abc";
          break;
        case 1:
          distance = "12x";
          break;
        case 2:
          start_text = "not a time";
          break;
        case 3:
          vehicle = "moped";
          break;
        default:
          // Truncated row: required columns beyond ID are absent entirely.
          out << trip_id << "\n";
          continue;
      }
    } else if (outside_filter) {
      ++stats.rows_outside_filter;
      switch ((i / 250) % 4) {
        case 0:
          distance = "100.00";  // under the 0.1-mile keep
          break;
        case 1:
          distance = "900000.00";  // past the 500-mile keep
          break;
        case 2:
          duration = "90000";  // past the 24-hour keep
          break;
        default:
          duration = "0";  // under the 1-second keep
          break;
      }
    } else {
      ++(is_bicycle ? stats.bicycle_kept : stats.scooter_kept);
    }

    std::string council_start =
        i % 97 == 0 ? "9, east" : std::to_string(1 + rng.below(10));
    std::string council_end =
        i % 13 == 0 ? "" : std::to_string(1 + rng.below(10));
    std::string census_start = std::to_string(48453000100 + rng.below(300));
    std::string census_end = std::to_string(48453000100 + rng.below(300));

    out << trip_id << ",D" << device << ',' << csv_escape(vehicle) << ','
        << duration << ',' << distance << ',' << start_text << ','
        << end_text << ',' << start.month << ',' << hour_column << ','
        << dow_column << ',' << start.year << ','
        << csv_escape(council_start) << ',' << csv_escape(council_end) << ','
        << census_start << ',' << census_end << '\n';
  }

  stats.rows_parsed = stats.rows_total - stats.rows_malformed;
  return stats;
}

FixtureStats write_fixture_file(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write fixture file " + path.string());
  const auto stats = write_fixture_csv(out);
  out.flush();
  if (!out) throw IoError("failed writing fixture file " + path.string());
  return stats;
}

TempDir::TempDir(const char* tag) {
  static std::atomic<uint64_t> counter{0};
  const auto base = std::filesystem::temp_directory_path();
  path_ = base / ("micromob_test_" + std::string(tag) + "_" +
                  std::to_string(::getpid()) + "_" +
                  std::to_string(counter.fetch_add(1)));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);  // best effort
}

}  // namespace micromob::testing
