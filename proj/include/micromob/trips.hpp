#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "micromob/civil_time.hpp"

namespace micromob {

enum class VehicleType : uint8_t { scooter, bicycle };

const char* to_string(VehicleType v);
std::optional<VehicleType> parse_vehicle_type(std::string_view text);

/// One dockless trip, normalized from an open-data export row.
struct TripRecord {
  std::string trip_id;
  std::string device_id;
  VehicleType vehicle_type = VehicleType::scooter;
  double duration_s = 0.0;
  double distance_m = 0.0;
  CivilTime start_time;
  CivilTime end_time;
  int day_of_week = 0;  // 0 = Sunday, always derived from start_time
  int hour = 0;
  int month = 1;
  int year = 1970;
  std::string council_district_start;
  std::string council_district_end;
  std::string census_tract_start;
  std::string census_tract_end;
};

/// Keep bounds for trips entering the analysis. Distance bounds are
/// inclusive-low / exclusive-high; duration likewise.
struct FilterPolicy {
  double min_distance_m = 160.9344;  // 0.1 mi
  double max_distance_m = 804672.0;  // 500 mi, exclusive
  double min_duration_s = 1.0;
  double max_duration_s = 86400.0;  // 24 h, exclusive

  bool valid() const {
    return min_distance_m < max_distance_m && min_duration_s >= 1.0 &&
           max_duration_s > min_duration_s;
  }
  bool keeps(const TripRecord& trip) const {
    return trip.distance_m >= min_distance_m &&
           trip.distance_m < max_distance_m &&
           trip.duration_s >= min_duration_s &&
           trip.duration_s < max_duration_s;
  }
};

/// Parse-side accounting. rows_read = rows_parsed + sum of rejections.
struct IngestReport {
  uint64_t rows_read = 0;
  uint64_t rows_parsed = 0;
  std::map<std::string, uint64_t> rows_rejected_by_reason;
  std::map<std::string, uint64_t> vehicle_counts;
  /// File column disagreed with the value derived from start_time; the
  /// derived value wins and the row is kept.
  std::map<std::string, uint64_t> derived_field_conflicts;

  uint64_t rows_rejected_total() const;
};

/// Maps logical field names to header names in a concrete CSV layout.
/// Logical names: trip_id, device_id, vehicle_type, duration, distance,
/// start_time, end_time, month, hour, day_of_week, year,
/// council_district_start, council_district_end, census_tract_start,
/// census_tract_end. Required: vehicle_type, duration, distance, start_time.
struct SchemaMap {
  std::map<std::string, std::string> columns;

  /// City of Austin "Dockless Vehicle Trips" export headers.
  static SchemaMap austin();
  /// The normalized CSV written by write_normalized_csv.
  static SchemaMap normalized();
  static std::optional<SchemaMap> preset(std::string_view name);
};

/// Reads a CSV with a header row. Unparseable rows are counted per reason,
/// never fatal. Derived calendar fields come from start_time; a disagreeing
/// file column is counted as a conflict. Throws ConfigError if a required
/// header is missing. An empty input yields an empty sequence plus a report.
std::pair<std::vector<TripRecord>, IngestReport> parse_trips(
    std::istream& source, const SchemaMap& schema);

/// Order-preserving, idempotent application of a FilterPolicy.
std::vector<TripRecord> filter_trips(const std::vector<TripRecord>& trips,
                                     const FilterPolicy& policy);

/// Average speed in m/s. Throws DomainError when duration_s is zero.
double trip_speed(const TripRecord& trip);

/// Fixed-column normalized output: trip_id, vehicle_type, distance_m,
/// duration_s, speed_mps, start_time (ISO-8601), day_of_week, hour.
void write_normalized_csv(std::ostream& out,
                          const std::vector<TripRecord>& trips);

void write_ingest_report_json(std::ostream& out, const IngestReport& report);

}  // namespace micromob
