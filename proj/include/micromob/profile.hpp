#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "micromob/trips.hpp"

namespace micromob {

/// Which usage pattern a dataset slices trips by.
enum class Mode {
  day_of_week,  ///< weekday vs weekend
  time_of_day,  ///< daytime vs nighttime
};

/// How trips are turned into points.
enum class Granularity {
  per_trip,             ///< one point per retained trip, weight 1
  per_period_per_date,  ///< one point per (calendar date, period) cell
};

/// Binary regime label; its display name depends on the mode.
enum class Label {
  regime_a = 0,  ///< weekday (day-of-week) or daytime (time-of-day)
  regime_b = 1,  ///< weekend (day-of-week) or nighttime (time-of-day)
};

/// Half-open daytime window [start_hour, end_hour) in local hours.
struct DaytimeBoundary {
  int start_hour = 6;
  int end_hour = 18;

  bool valid() const { return 0 <= start_hour && start_hour < end_hour && end_hour <= 24; }
};

/// One observation fed to clustering: a speed value with its regime label,
/// the period (day-of-week 0..6 or hour 0..23) it came from, and how many
/// trips it aggregates.
struct LabeledPoint {
  double feature = 0.0;
  Label label = Label::regime_a;
  int period = 0;
  double weight = 1.0;
};

/// A labeled speed dataset for one vehicle type and mode.
struct AnalysisDataset {
  Mode mode = Mode::day_of_week;
  Granularity granularity = Granularity::per_trip;
  std::optional<VehicleType> vehicle;
  DaytimeBoundary daytime;
  std::vector<LabeledPoint> points;
};

/// Weighted per-period location/spread, ordered by period index.
struct PeriodSummary {
  int period = 0;
  double mean = 0.0;
  double stddev = 0.0;  ///< frequency-weighted sample stddev (0 when W <= 1)
  double weight = 0.0;
  std::size_t points = 0;
};

std::string to_string(Mode mode);
std::string to_string(Granularity granularity);

/// Accepts hyphen or underscore spellings ("time-of-day", "time_of_day").
Mode parse_mode(std::string_view text);

/// Accepts "per-trip", "per_trip", "per-period", "per_period",
/// "per-period-per-date", "per_period_per_date".
Granularity parse_granularity(std::string_view text);

/// The granularity used when a caller does not pick one: per-trip for
/// day-of-week, per-period-per-date for time-of-day.
Granularity default_granularity(Mode mode);

/// Saturday/Sunday are regime_b (weekend); day_of_week uses 0 = Sunday.
Label label_day_of_week(int day_of_week);

/// Hours inside [boundary.start_hour, boundary.end_hour) are regime_a
/// (daytime). Throws ConfigError for an invalid boundary, DomainError for an
/// hour outside 0..23.
Label label_time_of_day(int hour, const DaytimeBoundary& boundary = {});

/// Label of a period index under the given mode (period = day-of-week or hour).
Label label_for_period(Mode mode, int period, const DaytimeBoundary& boundary = {});

/// The period index of a trip under the given mode.
int period_of(const TripRecord& trip, Mode mode);

/// "weekday"/"weekend" for day-of-week mode, "daytime"/"nighttime" for
/// time-of-day mode.
std::string label_name(Mode mode, Label label);

/// Inverse of label_name; infers the mode from the name.
std::pair<Mode, Label> parse_label(std::string_view name);

/// Display name of a period: "Sunday".."Saturday" or "12AM".."11PM".
std::string period_name(Mode mode, int period);

/// Builds the labeled speed dataset for one vehicle slice. Trips are expected
/// to be pre-filtered; per-trip points keep the input order, per-period points
/// are ordered by (date, period). Throws DomainError when no points remain.
AnalysisDataset build_dataset(const std::vector<TripRecord>& trips, Mode mode,
                              Granularity granularity,
                              std::optional<VehicleType> vehicle = std::nullopt,
                              const DaytimeBoundary& daytime = {});

/// Weighted mean/stddev per period present in the dataset.
std::vector<PeriodSummary> period_summary(const AnalysisDataset& dataset);

/// Writes "feature,label,period,weight" rows; floats use shortest round-trip
/// formatting.
void write_dataset_csv(std::ostream& out, const AnalysisDataset& dataset);

/// Reads a dataset CSV. The mode is inferred from the label names; the
/// granularity is per-trip when every weight is 1, per-period otherwise.
/// The vehicle slice is not stored in the CSV and comes back empty.
AnalysisDataset read_dataset_csv(std::istream& in);

}  // namespace micromob
