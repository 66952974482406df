#include "micromob/profile.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <ostream>

#include "micromob/csv.hpp"
#include "micromob/errors.hpp"
#include "text_util.hpp"

namespace micromob {

namespace {

// Canonical spellings after lowercasing and '-'/' ' -> '_' normalization.
std::string normalized_token(std::string_view text) {
  std::string t = detail::to_lower(detail::trim(text));
  for (char& c : t) {
    if (c == '-' || c == ' ') c = '_';
  }
  return t;
}

constexpr const char* kDowNames[7] = {"Sunday",    "Monday",   "Tuesday",
                                      "Wednesday", "Thursday", "Friday",
                                      "Saturday"};

void check_boundary(const DaytimeBoundary& boundary) {
  if (!boundary.valid()) {
    throw ConfigError("invalid daytime boundary [" +
                      std::to_string(boundary.start_hour) + ", " +
                      std::to_string(boundary.end_hour) +
                      "): need 0 <= start < end <= 24");
  }
}

}  // namespace

std::string to_string(Mode mode) {
  return mode == Mode::day_of_week ? "day_of_week" : "time_of_day";
}

std::string to_string(Granularity granularity) {
  return granularity == Granularity::per_trip ? "per_trip"
                                              : "per_period_per_date";
}

Mode parse_mode(std::string_view text) {
  const std::string t = normalized_token(text);
  if (t == "day_of_week" || t == "dow") return Mode::day_of_week;
  if (t == "time_of_day" || t == "tod") return Mode::time_of_day;
  throw ConfigError("unknown mode '" + std::string(text) +
                    "' (expected day-of-week or time-of-day)");
}

Granularity parse_granularity(std::string_view text) {
  const std::string t = normalized_token(text);
  if (t == "per_trip") return Granularity::per_trip;
  if (t == "per_period" || t == "per_period_per_date") {
    return Granularity::per_period_per_date;
  }
  throw ConfigError("unknown granularity '" + std::string(text) +
                    "' (expected per-trip or per-period)");
}

Granularity default_granularity(Mode mode) {
  return mode == Mode::day_of_week ? Granularity::per_trip
                                   : Granularity::per_period_per_date;
}

Label label_day_of_week(int day_of_week) {
  if (day_of_week < 0 || day_of_week > 6) {
    throw DomainError("day_of_week out of range: " +
                      std::to_string(day_of_week));
  }
  return (day_of_week == 0 || day_of_week == 6) ? Label::regime_b
                                                : Label::regime_a;
}

Label label_time_of_day(int hour, const DaytimeBoundary& boundary) {
  check_boundary(boundary);
  if (hour < 0 || hour > 23) {
    throw DomainError("hour out of range: " + std::to_string(hour));
  }
  return (hour >= boundary.start_hour && hour < boundary.end_hour)
             ? Label::regime_a
             : Label::regime_b;
}

Label label_for_period(Mode mode, int period, const DaytimeBoundary& boundary) {
  return mode == Mode::day_of_week ? label_day_of_week(period)
                                   : label_time_of_day(period, boundary);
}

int period_of(const TripRecord& trip, Mode mode) {
  return mode == Mode::day_of_week ? trip.day_of_week : trip.hour;
}

std::string label_name(Mode mode, Label label) {
  if (mode == Mode::day_of_week) {
    return label == Label::regime_a ? "weekday" : "weekend";
  }
  return label == Label::regime_a ? "daytime" : "nighttime";
}

std::pair<Mode, Label> parse_label(std::string_view name) {
  const std::string t = normalized_token(name);
  if (t == "weekday") return {Mode::day_of_week, Label::regime_a};
  if (t == "weekend") return {Mode::day_of_week, Label::regime_b};
  if (t == "daytime") return {Mode::time_of_day, Label::regime_a};
  if (t == "nighttime") return {Mode::time_of_day, Label::regime_b};
  throw ConfigError("unknown label '" + std::string(name) + "'");
}

std::string period_name(Mode mode, int period) {
  if (mode == Mode::day_of_week) {
    if (period < 0 || period > 6) {
      throw DomainError("day_of_week out of range: " + std::to_string(period));
    }
    return kDowNames[period];
  }
  if (period < 0 || period > 23) {
    throw DomainError("hour out of range: " + std::to_string(period));
  }
  const int twelve = period % 12 == 0 ? 12 : period % 12;
  return std::to_string(twelve) + (period < 12 ? "AM" : "PM");
}

AnalysisDataset build_dataset(const std::vector<TripRecord>& trips, Mode mode,
                              Granularity granularity,
                              std::optional<VehicleType> vehicle,
                              const DaytimeBoundary& daytime) {
  if (mode == Mode::time_of_day) check_boundary(daytime);

  AnalysisDataset dataset;
  dataset.mode = mode;
  dataset.granularity = granularity;
  dataset.vehicle = vehicle;
  dataset.daytime = daytime;

  if (granularity == Granularity::per_trip) {
    for (const TripRecord& trip : trips) {
      if (vehicle && trip.vehicle_type != *vehicle) continue;
      LabeledPoint point;
      point.feature = trip_speed(trip);
      point.period = period_of(trip, mode);
      point.label = label_for_period(mode, point.period, daytime);
      point.weight = 1.0;
      dataset.points.push_back(point);
    }
  } else {
    // One cell per (calendar date, period); the cell value is the mean speed
    // and the weight is the trip count. std::map keeps cells ordered by
    // (date, period).
    struct Cell {
      double sum = 0.0;
      double count = 0.0;
    };
    std::map<std::pair<int32_t, int>, Cell> cells;
    for (const TripRecord& trip : trips) {
      if (vehicle && trip.vehicle_type != *vehicle) continue;
      Cell& cell = cells[{trip.start_time.epoch_days, period_of(trip, mode)}];
      cell.sum += trip_speed(trip);
      cell.count += 1.0;
    }
    for (const auto& [key, cell] : cells) {
      LabeledPoint point;
      point.feature = cell.sum / cell.count;
      point.period = key.second;
      point.label = label_for_period(mode, point.period, daytime);
      point.weight = cell.count;
      dataset.points.push_back(point);
    }
  }

  if (dataset.points.empty()) {
    throw DomainError("no points to profile (vehicle=" +
                      (vehicle ? to_string(*vehicle) : std::string("any")) +
                      ", mode=" + to_string(mode) + ")");
  }
  return dataset;
}

std::vector<PeriodSummary> period_summary(const AnalysisDataset& dataset) {
  std::map<int, std::vector<const LabeledPoint*>> by_period;
  for (const LabeledPoint& point : dataset.points) {
    by_period[point.period].push_back(&point);
  }
  std::vector<PeriodSummary> out;
  out.reserve(by_period.size());
  for (const auto& [period, points] : by_period) {
    PeriodSummary s;
    s.period = period;
    s.points = points.size();
    double sum_w = 0.0, sum_wx = 0.0;
    for (const LabeledPoint* p : points) {
      sum_w += p->weight;
      sum_wx += p->weight * p->feature;
    }
    s.weight = sum_w;
    s.mean = sum_wx / sum_w;
    if (sum_w > 1.0) {
      double ss = 0.0;
      for (const LabeledPoint* p : points) {
        const double d = p->feature - s.mean;
        ss += p->weight * d * d;
      }
      s.stddev = std::sqrt(ss / (sum_w - 1.0));
    }
    out.push_back(s);
  }
  return out;
}

void write_dataset_csv(std::ostream& out, const AnalysisDataset& dataset) {
  csv::Writer writer(out);
  writer.write_record({"feature", "label", "period", "weight"});
  std::vector<std::string> row(4);
  for (const LabeledPoint& point : dataset.points) {
    row[0] = detail::format_double(point.feature);
    row[1] = label_name(dataset.mode, point.label);
    row[2] = std::to_string(point.period);
    row[3] = detail::format_double(point.weight);
    writer.write_record(row);
  }
}

AnalysisDataset read_dataset_csv(std::istream& in) {
  csv::Reader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw ConfigError("dataset CSV is empty");

  int col_feature = -1, col_label = -1, col_period = -1, col_weight = -1;
  for (size_t i = 0; i < row.size(); ++i) {
    const std::string name = normalized_token(row[i]);
    if (name == "feature") col_feature = static_cast<int>(i);
    if (name == "label") col_label = static_cast<int>(i);
    if (name == "period") col_period = static_cast<int>(i);
    if (name == "weight") col_weight = static_cast<int>(i);
  }
  for (const auto& [col, name] :
       {std::pair{col_feature, "feature"}, std::pair{col_label, "label"},
        std::pair{col_period, "period"}, std::pair{col_weight, "weight"}}) {
    if (col < 0) {
      throw ConfigError("dataset CSV is missing required column '" +
                        std::string(name) + "'");
    }
  }

  AnalysisDataset dataset;
  bool mode_known = false;
  bool all_unit_weights = true;
  size_t line = 1;
  while (reader.next(row)) {
    ++line;
    const auto cell = [&](int col) -> const std::string& {
      if (col >= static_cast<int>(row.size())) {
        throw ConfigError("dataset CSV row " + std::to_string(line) +
                          " has too few fields");
      }
      return row[static_cast<size_t>(col)];
    };
    const auto feature = detail::parse_double(cell(col_feature));
    const auto period = detail::parse_i64(cell(col_period));
    const auto weight = detail::parse_double(cell(col_weight));
    if (!feature || !period || !weight) {
      throw ConfigError("dataset CSV row " + std::to_string(line) +
                        " has an unparseable numeric field");
    }
    if (*weight <= 0.0) {
      throw ConfigError("dataset CSV row " + std::to_string(line) +
                        " has a non-positive weight");
    }
    const auto [mode, label] = parse_label(cell(col_label));
    if (!mode_known) {
      dataset.mode = mode;
      mode_known = true;
    } else if (mode != dataset.mode) {
      throw ConfigError("dataset CSV mixes day-of-week and time-of-day labels");
    }
    LabeledPoint point;
    point.feature = *feature;
    point.label = label;
    point.period = static_cast<int>(*period);
    point.weight = *weight;
    if (point.weight != 1.0) all_unit_weights = false;
    dataset.points.push_back(point);
  }
  if (dataset.points.empty()) {
    throw ConfigError("dataset CSV has no data rows");
  }
  dataset.granularity = all_unit_weights ? Granularity::per_trip
                                         : Granularity::per_period_per_date;
  return dataset;
}

}  // namespace micromob
