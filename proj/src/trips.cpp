#include "micromob/trips.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "micromob/csv.hpp"
#include "micromob/errors.hpp"
#include "text_util.hpp"

namespace micromob {

namespace {

using detail::parse_double;
using detail::to_lower;

std::string trimmed(std::string_view s) { return detail::trim(s); }

std::optional<long> parse_long(std::string_view s) {
  const auto v = detail::parse_i64(s);
  if (!v) return std::nullopt;
  return static_cast<long>(*v);
}

// Column indices for one parse run; -1 when the file lacks the column.
struct ColumnPlan {
  int trip_id = -1;
  int device_id = -1;
  int vehicle_type = -1;
  int duration = -1;
  int distance = -1;
  int start_time = -1;
  int end_time = -1;
  int month = -1;
  int hour = -1;
  int day_of_week = -1;
  int year = -1;
  int council_district_start = -1;
  int council_district_end = -1;
  int census_tract_start = -1;
  int census_tract_end = -1;
};

const char* field_at(const std::vector<std::string>& row, int idx) {
  if (idx < 0 || static_cast<size_t>(idx) >= row.size()) return nullptr;
  return row[static_cast<size_t>(idx)].c_str();
}

}  // namespace

const char* to_string(VehicleType v) {
  return v == VehicleType::scooter ? "scooter" : "bicycle";
}

std::optional<VehicleType> parse_vehicle_type(std::string_view text) {
  const std::string t = to_lower(trimmed(text));
  if (t == "scooter") return VehicleType::scooter;
  if (t == "bicycle") return VehicleType::bicycle;
  return std::nullopt;
}

uint64_t IngestReport::rows_rejected_total() const {
  uint64_t total = 0;
  for (const auto& [reason, count] : rows_rejected_by_reason) total += count;
  return total;
}

SchemaMap SchemaMap::austin() {
  SchemaMap m;
  m.columns = {
      {"trip_id", "ID"},
      {"device_id", "Device ID"},
      {"vehicle_type", "Vehicle Type"},
      {"duration", "Trip Duration"},
      {"distance", "Trip Distance"},
      {"start_time", "Start Time"},
      {"end_time", "End Time"},
      {"month", "Month"},
      {"hour", "Hour"},
      {"day_of_week", "Day of Week"},
      {"year", "Year"},
      {"council_district_start", "Council District (Start)"},
      {"council_district_end", "Council District (End)"},
      {"census_tract_start", "Census Tract Start"},
      {"census_tract_end", "Census Tract End"},
  };
  return m;
}

SchemaMap SchemaMap::normalized() {
  SchemaMap m;
  m.columns = {
      {"trip_id", "trip_id"},       {"vehicle_type", "vehicle_type"},
      {"distance", "distance_m"},   {"duration", "duration_s"},
      {"start_time", "start_time"}, {"day_of_week", "day_of_week"},
      {"hour", "hour"},
  };
  return m;
}

std::optional<SchemaMap> SchemaMap::preset(std::string_view name) {
  const std::string n = to_lower(trimmed(name));
  if (n == "austin") return austin();
  if (n == "normalized") return normalized();
  return std::nullopt;
}

std::pair<std::vector<TripRecord>, IngestReport> parse_trips(
    std::istream& source, const SchemaMap& schema) {
  std::vector<TripRecord> trips;
  IngestReport report;
  csv::Reader reader(source);

  std::vector<std::string> row;
  if (!reader.next(row)) {
    return {std::move(trips), std::move(report)};  // empty file
  }

  // Resolve the header row against the schema, case-insensitively.
  std::map<std::string, int> header_index;
  for (size_t i = 0; i < row.size(); ++i) {
    header_index.emplace(to_lower(trimmed(row[i])), static_cast<int>(i));
  }
  ColumnPlan plan;
  const auto resolve = [&](const char* logical, int& slot, bool required) {
    const auto it = schema.columns.find(logical);
    if (it == schema.columns.end()) {
      if (required) {
        throw ConfigError(std::string("schema map does not cover required "
                                      "field '") +
                          logical + "'");
      }
      return;
    }
    const auto hit = header_index.find(to_lower(it->second));
    if (hit == header_index.end()) {
      if (required) {
        throw ConfigError("missing required header '" + it->second +
                          "' (field '" + logical + "')");
      }
      return;
    }
    slot = hit->second;
  };
  resolve("vehicle_type", plan.vehicle_type, true);
  resolve("duration", plan.duration, true);
  resolve("distance", plan.distance, true);
  resolve("start_time", plan.start_time, true);
  resolve("trip_id", plan.trip_id, false);
  resolve("device_id", plan.device_id, false);
  resolve("end_time", plan.end_time, false);
  resolve("month", plan.month, false);
  resolve("hour", plan.hour, false);
  resolve("day_of_week", plan.day_of_week, false);
  resolve("year", plan.year, false);
  resolve("council_district_start", plan.council_district_start, false);
  resolve("council_district_end", plan.council_district_end, false);
  resolve("census_tract_start", plan.census_tract_start, false);
  resolve("census_tract_end", plan.census_tract_end, false);

  const auto reject = [&report](const char* reason) {
    ++report.rows_rejected_by_reason[reason];
  };
  const auto conflict = [&report](const char* field) {
    ++report.derived_field_conflicts[field];
  };

  while (reader.next(row)) {
    ++report.rows_read;

    const char* vehicle_raw = field_at(row, plan.vehicle_type);
    const char* duration_raw = field_at(row, plan.duration);
    const char* distance_raw = field_at(row, plan.distance);
    const char* start_raw = field_at(row, plan.start_time);
    if (!vehicle_raw || !duration_raw || !distance_raw || !start_raw) {
      reject("missing_required_field");
      continue;
    }

    const auto vehicle = parse_vehicle_type(vehicle_raw);
    if (!vehicle) {
      reject("unknown_vehicle_type");
      continue;
    }
    const auto duration = parse_double(duration_raw);
    if (!duration) {
      reject("unparseable_duration");
      continue;
    }
    if (*duration < 0) {
      reject("negative_duration");
      continue;
    }
    const auto distance = parse_double(distance_raw);
    if (!distance) {
      reject("unparseable_distance");
      continue;
    }
    if (*distance < 0) {
      reject("negative_distance");
      continue;
    }
    const auto start = parse_civil_time(start_raw);
    if (!start) {
      reject("unparseable_start_time");
      continue;
    }

    TripRecord trip;
    if (const char* v = field_at(row, plan.trip_id)) trip.trip_id = trimmed(v);
    if (const char* v = field_at(row, plan.device_id)) {
      trip.device_id = trimmed(v);
    }
    trip.vehicle_type = *vehicle;
    trip.duration_s = *duration;
    trip.distance_m = *distance;
    trip.start_time = *start;

    bool have_end = false;
    if (const char* v = field_at(row, plan.end_time)) {
      if (const auto end = parse_civil_time(v)) {
        trip.end_time = *end;
        have_end = true;
      }
    }
    if (!have_end) {
      trip.end_time = civil_from_epoch_seconds(
          start->epoch_seconds + static_cast<int64_t>(std::llround(*duration)));
    }

    // Calendar fields always come from start_time; file columns only feed
    // the conflict counters.
    trip.day_of_week = start->day_of_week;
    trip.hour = start->hour;
    trip.month = start->month;
    trip.year = start->year;
    if (const char* v = field_at(row, plan.day_of_week)) {
      const auto file_value = parse_long(v);
      if (file_value && *file_value != trip.day_of_week) {
        conflict("day_of_week");
      }
    }
    if (const char* v = field_at(row, plan.hour)) {
      const auto file_value = parse_long(v);
      if (file_value && *file_value != trip.hour) conflict("hour");
    }
    if (const char* v = field_at(row, plan.month)) {
      const auto file_value = parse_long(v);
      if (file_value && *file_value != trip.month) conflict("month");
    }
    if (const char* v = field_at(row, plan.year)) {
      const auto file_value = parse_long(v);
      if (file_value && *file_value != trip.year) conflict("year");
    }
    if (const char* v = field_at(row, plan.council_district_start)) {
      trip.council_district_start = trimmed(v);
    }
    if (const char* v = field_at(row, plan.council_district_end)) {
      trip.council_district_end = trimmed(v);
    }
    if (const char* v = field_at(row, plan.census_tract_start)) {
      trip.census_tract_start = trimmed(v);
    }
    if (const char* v = field_at(row, plan.census_tract_end)) {
      trip.census_tract_end = trimmed(v);
    }

    ++report.rows_parsed;
    ++report.vehicle_counts[to_string(trip.vehicle_type)];
    trips.push_back(std::move(trip));
  }

  return {std::move(trips), std::move(report)};
}

std::vector<TripRecord> filter_trips(const std::vector<TripRecord>& trips,
                                     const FilterPolicy& policy) {
  if (!policy.valid()) throw ConfigError("invalid filter policy bounds");
  std::vector<TripRecord> kept;
  kept.reserve(trips.size());
  for (const TripRecord& trip : trips) {
    if (policy.keeps(trip)) kept.push_back(trip);
  }
  return kept;
}

double trip_speed(const TripRecord& trip) {
  if (trip.duration_s <= 0.0) {
    throw DomainError("trip_speed requires a positive duration (trip '" +
                      trip.trip_id + "')");
  }
  return trip.distance_m / trip.duration_s;
}

void write_normalized_csv(std::ostream& out,
                          const std::vector<TripRecord>& trips) {
  csv::Writer writer(out);
  writer.write_record({"trip_id", "vehicle_type", "distance_m", "duration_s",
                       "speed_mps", "start_time", "day_of_week", "hour"});
  std::vector<std::string> row(8);
  const auto num = [](double v) { return detail::format_double(v); };
  for (const TripRecord& trip : trips) {
    row[0] = trip.trip_id;
    row[1] = to_string(trip.vehicle_type);
    row[2] = num(trip.distance_m);
    row[3] = num(trip.duration_s);
    row[4] = num(trip_speed(trip));
    row[5] = format_iso8601(trip.start_time);
    row[6] = std::to_string(trip.day_of_week);
    row[7] = std::to_string(trip.hour);
    writer.write_record(row);
  }
}

void write_ingest_report_json(std::ostream& out, const IngestReport& report) {
  nlohmann::json j;
  j["rows_read"] = report.rows_read;
  j["rows_parsed"] = report.rows_parsed;
  j["rows_rejected_by_reason"] = report.rows_rejected_by_reason;
  j["vehicle_counts"] = report.vehicle_counts;
  j["derived_field_conflicts"] = report.derived_field_conflicts;
  out << j.dump(2) << '\n';
}

}  // namespace micromob
