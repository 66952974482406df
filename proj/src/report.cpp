#include "micromob/report.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "micromob/csv.hpp"
#include "micromob/errors.hpp"
#include "micromob/svg.hpp"
#include "text_util.hpp"

namespace micromob {

namespace {

namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";

// Cluster ids are ordered by ascending mean, so the slowest cluster is
// always drawn in the same color.
const std::vector<std::string>& palette() {
  static const std::vector<std::string> colors{
      "#ff7f0e", "#1f77b4", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};
  return colors;
}

const std::string& cluster_color(int cluster) {
  return palette()[static_cast<std::size_t>(cluster) % palette().size()];
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (const char c : text) {
    if (c == ',') {
      const std::string item = detail::trim(current);
      if (!item.empty()) out.push_back(item);
      current.clear();
    } else {
      current += c;
    }
  }
  const std::string item = detail::trim(current);
  if (!item.empty()) out.push_back(item);
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  const std::string t = detail::to_lower(detail::trim(value));
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw ConfigError("config key '" + key + "' expects a boolean, got '" +
                    value + "'");
}

int64_t parse_int(const std::string& key, const std::string& value) {
  const auto parsed = detail::parse_i64(value);
  if (!parsed) {
    throw ConfigError("config key '" + key + "' expects an integer, got '" +
                      value + "'");
  }
  return *parsed;
}

double parse_real(const std::string& key, const std::string& value) {
  const auto parsed = detail::parse_double(value);
  if (!parsed) {
    throw ConfigError("config key '" + key + "' expects a number, got '" +
                      value + "'");
  }
  return *parsed;
}

std::string join(const std::vector<std::string>& items, char sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += sep;
    out += items[i];
  }
  return out;
}

std::string vehicles_string(const std::vector<VehicleType>& vehicles) {
  std::vector<std::string> names;
  names.reserve(vehicles.size());
  for (const VehicleType v : vehicles) names.emplace_back(to_string(v));
  return join(names, ',');
}

std::string modes_string(const std::vector<Mode>& modes) {
  std::vector<std::string> names;
  names.reserve(modes.size());
  for (const Mode m : modes) names.push_back(to_string(m));
  return join(names, ',');
}

// ---------------------------------------------------------------------------
// charts

std::string coloring_chart(Mode mode, const std::vector<PeriodColor>& coloring,
                           int k, const std::string& title) {
  const double bar_w = mode == Mode::day_of_week ? 56.0 : 26.0;
  const double gap = mode == Mode::day_of_week ? 16.0 : 8.0;
  const double ml = 64.0, mr = 20.0, mt = 52.0, mb = 68.0;
  const auto n = static_cast<double>(coloring.size());
  const double plot_w = n * bar_w + (n + 1.0) * gap;
  const double width = ml + plot_w + mr;
  const double height = 360.0;
  const double plot_h = height - mt - mb;
  const double baseline = mt + plot_h;

  double max_mean = 0.0;
  for (const PeriodColor& c : coloring) max_mean = std::max(max_mean, c.mean);
  const double y_max = std::max(0.5, std::ceil(max_mean * 1.15 * 2.0) / 2.0);
  const auto y_of = [&](double v) { return baseline - v / y_max * plot_h; };

  svg::Document doc(width, height);
  doc.rect(0, 0, width, height, "#ffffff");
  doc.text(ml, 24, title, 15);
  doc.text(ml, 42, "mean speed (m/s) per period, colored by cluster", 11,
           "start", "#666666");

  for (int i = 0; i <= 4; ++i) {
    const double v = y_max * i / 4.0;
    const double y = y_of(v);
    if (i > 0) doc.line(ml, y, ml + plot_w, y, "#dddddd");
    doc.line(ml - 4, y, ml, y, "#555555");
    doc.text(ml - 8, y + 3.5, detail::format_double(v), 10, "end", "#555555");
  }
  doc.line(ml, mt, ml, baseline, "#555555");
  doc.line(ml, baseline, ml + plot_w, baseline, "#555555");

  const int label_every = mode == Mode::day_of_week ? 1 : 3;
  for (std::size_t i = 0; i < coloring.size(); ++i) {
    const PeriodColor& c = coloring[i];
    const double x = ml + gap + static_cast<double>(i) * (bar_w + gap);
    const double h = c.mean / y_max * plot_h;
    doc.rect(x, baseline - h, bar_w, h, cluster_color(c.cluster));
    if (i % static_cast<std::size_t>(label_every) == 0) {
      doc.text(x + bar_w / 2.0, baseline + 16, period_name(mode, c.period), 10,
               "middle", "#333333");
    }
  }

  for (int c = 0; c < k; ++c) {
    const double x = width - mr - static_cast<double>(k - c) * 92.0;
    doc.rect(x, 14, 12, 12, cluster_color(c));
    doc.text(x + 16, 24, "cluster " + std::to_string(c), 11);
  }
  return doc.str();
}

std::string consensus_chart(const ConsensusCurve& curve,
                            const std::string& title) {
  const double width = 560.0, height = 360.0;
  const double ml = 64.0, mr = 24.0, mt = 52.0, mb = 56.0;
  const double plot_w = width - ml - mr;
  const double plot_h = height - mt - mb;
  const double baseline = mt + plot_h;

  const int k_min = curve.entries.front().k;
  const int k_max = curve.entries.back().k;
  const auto x_of = [&](int k) {
    if (k_max == k_min) return ml + plot_w / 2.0;
    return ml + static_cast<double>(k - k_min) /
                    static_cast<double>(k_max - k_min) * plot_w;
  };
  const auto y_of = [&](double area) { return baseline - area * plot_h; };

  svg::Document doc(width, height);
  doc.rect(0, 0, width, height, "#ffffff");
  doc.text(ml, 24, title, 15);
  doc.text(ml, 42, "co-assignment CDF area by candidate cluster count", 11,
           "start", "#666666");

  for (int i = 0; i <= 4; ++i) {
    const double v = static_cast<double>(i) / 4.0;
    const double y = y_of(v);
    if (i > 0) doc.line(ml, y, ml + plot_w, y, "#dddddd");
    doc.line(ml - 4, y, ml, y, "#555555");
    doc.text(ml - 8, y + 3.5, detail::format_double(v), 10, "end", "#555555");
  }
  doc.line(ml, mt, ml, baseline, "#555555");
  doc.line(ml, baseline, ml + plot_w, baseline, "#555555");
  for (const ConsensusEntry& entry : curve.entries) {
    const double x = x_of(entry.k);
    doc.line(x, baseline, x, baseline + 4, "#555555");
    doc.text(x, baseline + 18, std::to_string(entry.k), 10, "middle",
             "#555555");
  }

  const double chosen_x = x_of(curve.chosen_k);
  doc.line(chosen_x, mt, chosen_x, baseline, "#ff7f0e", 1.0, "4,3");
  doc.text(chosen_x, mt - 6, "chosen k = " + std::to_string(curve.chosen_k),
           11, "middle", "#ff7f0e");

  std::vector<std::pair<double, double>> points;
  points.reserve(curve.entries.size());
  for (const ConsensusEntry& entry : curve.entries) {
    points.emplace_back(x_of(entry.k), y_of(entry.area));
  }
  doc.polyline(points, "#1f77b4", 2.0);
  for (const auto& [x, y] : points) doc.circle(x, y, 3.0, "#1f77b4");
  return doc.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// configuration

const std::vector<std::string>& analysis_config_keys() {
  static const std::vector<std::string> keys{
      "input",          "schema",
      "filter",         "vehicles",
      "modes",          "granularity",
      "daytime_start",  "daytime_end",
      "k",              "seed",
      "quota",          "metric",
      "max_outer_iters", "k_min",
      "k_max",          "resamples",
      "fraction",       "flatness_threshold",
      "consensus_max_points",              "out"};
  return keys;
}

void apply_overrides(AnalysisConfig& config,
                     const std::map<std::string, std::string>& overrides) {
  for (const auto& [key, raw] : overrides) {
    const std::string value = detail::trim(raw);
    if (key == "input") {
      config.input = value;
    } else if (key == "schema") {
      config.schema = detail::to_lower(value);
    } else if (key == "filter") {
      config.filter = parse_bool(key, value);
    } else if (key == "vehicles") {
      std::vector<VehicleType> vehicles;
      for (const std::string& item : split_list(value)) {
        const auto v = parse_vehicle_type(item);
        if (!v) throw ConfigError("unknown vehicle type '" + item + "'");
        vehicles.push_back(*v);
      }
      config.vehicles = std::move(vehicles);
    } else if (key == "modes") {
      std::vector<Mode> modes;
      for (const std::string& item : split_list(value)) {
        modes.push_back(parse_mode(item));
      }
      config.modes = std::move(modes);
    } else if (key == "granularity") {
      if (detail::to_lower(value) == "auto") {
        config.granularity.reset();
      } else {
        config.granularity = parse_granularity(value);
      }
    } else if (key == "daytime_start") {
      config.daytime.start_hour = static_cast<int>(parse_int(key, value));
    } else if (key == "daytime_end") {
      config.daytime.end_hour = static_cast<int>(parse_int(key, value));
    } else if (key == "k") {
      if (detail::to_lower(value) == "auto") {
        config.k = "auto";
      } else {
        config.k = std::to_string(parse_int(key, value));
      }
    } else if (key == "seed") {
      const int64_t seed = parse_int(key, value);
      if (seed < 0) throw ConfigError("seed must be non-negative");
      config.cluster.seed = static_cast<uint64_t>(seed);
      config.consensus.seed = static_cast<uint64_t>(seed);
    } else if (key == "quota") {
      config.cluster.quota = parse_quota_policy(value);
    } else if (key == "metric") {
      config.cluster.metric = parse_distance_metric(value);
    } else if (key == "max_outer_iters") {
      config.cluster.max_outer_iters = static_cast<int>(parse_int(key, value));
    } else if (key == "k_min") {
      config.consensus.k_min = static_cast<int>(parse_int(key, value));
    } else if (key == "k_max") {
      config.consensus.k_max = static_cast<int>(parse_int(key, value));
    } else if (key == "resamples") {
      config.consensus.resamples = static_cast<int>(parse_int(key, value));
    } else if (key == "fraction") {
      config.consensus.fraction = parse_real(key, value);
    } else if (key == "flatness_threshold") {
      config.consensus.flatness_threshold = parse_real(key, value);
    } else if (key == "consensus_max_points") {
      const int64_t limit = parse_int(key, value);
      if (limit < 2) throw ConfigError("consensus_max_points must be >= 2");
      config.consensus_max_points = static_cast<std::size_t>(limit);
    } else if (key == "out") {
      config.out_dir = value;
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

AnalysisConfig parse_analysis_config(std::istream& in) {
  // Flat key-value text: one "key = value" per line, '#' lines are comments,
  // blank lines are skipped, a repeated key keeps its last value.
  std::map<std::string, std::string> overrides;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = detail::trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        " is not 'key = value': " + stripped);
    }
    const std::string key = detail::trim(stripped.substr(0, eq));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) +
                        " has an empty key");
    }
    overrides[key] = detail::trim(stripped.substr(eq + 1));
  }
  AnalysisConfig config;
  apply_overrides(config, overrides);
  return config;
}

std::map<std::string, std::string> env_overrides() {
  std::map<std::string, std::string> out;
  for (const std::string& key : analysis_config_keys()) {
    std::string var = "MICROMOB_";
    for (const char c : key) {
      var += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    if (const char* value = std::getenv(var.c_str())) {
      out[key] = value;
    }
  }
  return out;
}

void AnalysisConfig::validate() const {
  if (input.empty()) {
    throw ConfigError("no input CSV configured (set 'input')");
  }
  if (!SchemaMap::preset(schema)) {
    throw ConfigError("unknown schema preset '" + schema + "'");
  }
  if (vehicles.empty()) throw ConfigError("no vehicle types configured");
  if (modes.empty()) throw ConfigError("no modes configured");
  {
    std::set<VehicleType> seen(vehicles.begin(), vehicles.end());
    if (seen.size() != vehicles.size()) {
      throw ConfigError("duplicate vehicle type in config");
    }
  }
  {
    std::set<Mode> seen(modes.begin(), modes.end());
    if (seen.size() != modes.size()) {
      throw ConfigError("duplicate mode in config");
    }
  }
  if (!daytime.valid()) {
    throw ConfigError("invalid daytime boundary [" +
                      std::to_string(daytime.start_hour) + ", " +
                      std::to_string(daytime.end_hour) + ")");
  }
  if (k != "auto") {
    const auto parsed = detail::parse_i64(k);
    if (!parsed || *parsed < 2) {
      throw ConfigError("k must be \"auto\" or an integer >= 2, got '" + k +
                        "'");
    }
  }
  cluster.validate();
  consensus.validate();
  if (consensus_max_points < 2) {
    throw ConfigError("consensus_max_points must be >= 2");
  }
}

std::string canonical_config_string(const AnalysisConfig& config) {
  std::string out;
  const auto add = [&](const std::string& key, const std::string& value) {
    out += key;
    out += '=';
    out += value;
    out += '\n';
  };
  add("input", config.input);
  add("schema", config.schema);
  add("filter", config.filter ? "true" : "false");
  add("vehicles", vehicles_string(config.vehicles));
  add("modes", modes_string(config.modes));
  add("granularity",
      config.granularity ? to_string(*config.granularity) : "auto");
  add("daytime_start", std::to_string(config.daytime.start_hour));
  add("daytime_end", std::to_string(config.daytime.end_hour));
  add("k", config.k);
  add("seed", std::to_string(config.cluster.seed));
  add("quota", to_string(config.cluster.quota));
  add("metric", to_string(config.cluster.metric));
  add("max_outer_iters", std::to_string(config.cluster.max_outer_iters));
  add("k_min", std::to_string(config.consensus.k_min));
  add("k_max", std::to_string(config.consensus.k_max));
  add("resamples", std::to_string(config.consensus.resamples));
  add("fraction", detail::format_double(config.consensus.fraction));
  add("flatness_threshold",
      detail::format_double(config.consensus.flatness_threshold));
  add("consensus_max_points", std::to_string(config.consensus_max_points));
  return out;
}

std::string config_hash(const AnalysisConfig& config) {
  const std::string canonical = canonical_config_string(config);
  uint64_t hash = 14695981039346656037ull;
  for (const unsigned char c : canonical) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  static const char* digits = "0123456789abcdef";
  std::string hex(16, '0');
  for (int i = 15; i >= 0; --i) {
    hex[static_cast<std::size_t>(i)] = digits[hash & 0xF];
    hash >>= 4;
  }
  return hex;
}

// ---------------------------------------------------------------------------
// pipeline

namespace {

AnalysisOutcome analyze_slice(const std::vector<TripRecord>& trips,
                              const AnalysisConfig& config, VehicleType vehicle,
                              Mode mode) {
  AnalysisOutcome outcome;
  outcome.vehicle = vehicle;
  outcome.mode = mode;
  outcome.granularity =
      config.granularity ? *config.granularity : default_granularity(mode);

  const AnalysisDataset dataset = build_dataset(
      trips, mode, outcome.granularity, vehicle, config.daytime);

  if (config.k == "auto") {
    if (dataset.points.size() > config.consensus_max_points) {
      throw ConfigError(
          "automatic model order over " + std::to_string(dataset.points.size()) +
          " points exceeds consensus_max_points (" +
          std::to_string(config.consensus_max_points) +
          "); use per-period granularity or a fixed k");
    }
    outcome.curve = run_consensus(dataset, config.consensus, config.cluster);
    outcome.k = outcome.curve->chosen_k;
    outcome.k_from_consensus = true;
  } else {
    outcome.k = static_cast<int>(*detail::parse_i64(config.k));
    outcome.k_from_consensus = false;
  }

  ClusterConfig cluster_config = config.cluster;
  cluster_config.k = outcome.k;
  outcome.model = fit(dataset, cluster_config);
  order_clusters_by_mean(outcome.model);
  outcome.coloring = majority_period_coloring(dataset, outcome.model.assignment);

  // Compare the two most populated clusters (ties: lower id).
  std::vector<int> by_size(static_cast<std::size_t>(outcome.k));
  std::iota(by_size.begin(), by_size.end(), 0);
  std::stable_sort(by_size.begin(), by_size.end(), [&](int a, int b) {
    return outcome.model.stats[static_cast<std::size_t>(a)].size >
           outcome.model.stats[static_cast<std::size_t>(b)].size;
  });
  if (outcome.k < 2 ||
      outcome.model.stats[static_cast<std::size_t>(by_size[1])].size == 0) {
    throw DomainError("only one populated cluster; nothing to compare");
  }
  outcome.compared_a = std::min(by_size[0], by_size[1]);
  outcome.compared_b = std::max(by_size[0], by_size[1]);

  std::vector<double> a_values, a_weights, b_values, b_weights;
  for (std::size_t i = 0; i < dataset.points.size(); ++i) {
    const LabeledPoint& point = dataset.points[i];
    if (outcome.model.assignment[i] == outcome.compared_a) {
      a_values.push_back(point.feature);
      a_weights.push_back(point.weight);
    } else if (outcome.model.assignment[i] == outcome.compared_b) {
      b_values.push_back(point.feature);
      b_weights.push_back(point.weight);
    }
  }
  outcome.ranksum =
      ranksum_test_weighted(a_values, a_weights, b_values, b_weights);
  return outcome;
}

std::string clusters_csv(const AnalysisOutcome& outcome) {
  std::ostringstream out;
  csv::Writer writer(out);
  writer.write_record({"cluster_id", "mean", "stddev", "weight", "size",
                       "purity", "majority_label"});
  for (std::size_t c = 0; c < outcome.model.stats.size(); ++c) {
    const ClusterStats& s = outcome.model.stats[c];
    writer.write_record({std::to_string(c), detail::format_double(s.mean),
                         detail::format_double(s.stddev),
                         detail::format_double(s.weight),
                         std::to_string(s.size),
                         detail::format_double(s.purity),
                         label_name(outcome.mode, s.majority_label)});
  }
  return out.str();
}

std::string coloring_csv(const AnalysisOutcome& outcome) {
  std::ostringstream out;
  csv::Writer writer(out);
  writer.write_record({"period_index", "cluster_id", "mean_speed"});
  for (const PeriodColor& color : outcome.coloring) {
    writer.write_record({std::to_string(color.period),
                         std::to_string(color.cluster),
                         detail::format_double(color.mean)});
  }
  return out.str();
}

std::string ranksum_json(const AnalysisOutcome& outcome) {
  nlohmann::ordered_json j;
  j["vehicle"] = to_string(outcome.vehicle);
  j["mode"] = to_string(outcome.mode);
  j["cluster_a"] = outcome.compared_a;
  j["cluster_b"] = outcome.compared_b;
  j["n1"] = outcome.ranksum.n1;
  j["n2"] = outcome.ranksum.n2;
  j["u"] = outcome.ranksum.u;
  j["w"] = outcome.ranksum.w;
  if (std::isnan(outcome.ranksum.z)) {
    j["z"] = nullptr;
  } else {
    j["z"] = outcome.ranksum.z;
  }
  j["p_two_sided"] = outcome.ranksum.p_two_sided;
  j["method"] = outcome.ranksum.method;
  j["expansion_capped"] = outcome.ranksum.expansion_capped;
  return j.dump(2) + "\n";
}

std::string slice_title(const AnalysisOutcome& outcome) {
  return std::string(to_string(outcome.vehicle)) + " / " +
         to_string(outcome.mode);
}

nlohmann::ordered_json outcome_json(const AnalysisOutcome& outcome) {
  nlohmann::ordered_json j;
  j["vehicle"] = to_string(outcome.vehicle);
  j["mode"] = to_string(outcome.mode);
  j["granularity"] = to_string(outcome.granularity);
  j["k"] = outcome.k;
  j["k_source"] = outcome.k_from_consensus ? "consensus" : "fixed";
  if (outcome.curve) {
    nlohmann::ordered_json c;
    c["chosen_k"] = outcome.curve->chosen_k;
    auto entries = nlohmann::ordered_json::array();
    for (const ConsensusEntry& entry : outcome.curve->entries) {
      entries.push_back({{"k", entry.k},
                         {"area", entry.area},
                         {"delta", entry.delta},
                         {"undefined_pairs", entry.undefined_pairs}});
    }
    c["entries"] = entries;
    j["consensus"] = c;
  } else {
    j["consensus"] = nullptr;
  }
  auto clusters = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < outcome.model.stats.size(); ++c) {
    const ClusterStats& s = outcome.model.stats[c];
    clusters.push_back({{"id", c},
                        {"mean", s.mean},
                        {"stddev", s.stddev},
                        {"weight", s.weight},
                        {"size", s.size},
                        {"purity", s.purity},
                        {"majority_label",
                         label_name(outcome.mode, s.majority_label)}});
  }
  j["clusters"] = clusters;
  nlohmann::ordered_json comparison;
  comparison["cluster_a"] = outcome.compared_a;
  comparison["cluster_b"] = outcome.compared_b;
  comparison["n1"] = outcome.ranksum.n1;
  comparison["n2"] = outcome.ranksum.n2;
  comparison["u"] = outcome.ranksum.u;
  if (std::isnan(outcome.ranksum.z)) {
    comparison["z"] = nullptr;
  } else {
    comparison["z"] = outcome.ranksum.z;
  }
  comparison["p_two_sided"] = outcome.ranksum.p_two_sided;
  comparison["method"] = outcome.ranksum.method;
  comparison["expansion_capped"] = outcome.ranksum.expansion_capped;
  j["comparison"] = comparison;
  return j;
}

}  // namespace

PipelineResult run_pipeline(const AnalysisConfig& config) {
  config.validate();
  if (config.input.empty()) {
    throw ConfigError("no input CSV configured (set 'input')");
  }
  std::ifstream in(config.input, std::ios::binary);
  if (!in) {
    throw IoError("cannot open input CSV '" + config.input + "'");
  }
  auto [trips, ingest] = parse_trips(in, *SchemaMap::preset(config.schema));
  const std::vector<TripRecord> used =
      config.filter ? filter_trips(trips, FilterPolicy{}) : std::move(trips);

  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) {
    throw IoError("cannot create output directory '" + config.out_dir +
                  "': " + ec.message());
  }

  PipelineResult result;
  result.ingest = ingest;
  result.trips_used = used.size();

  const auto write_artifact = [&](const std::string& name,
                                  const std::string& content) {
    const fs::path path = fs::path(config.out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << content;
    out.flush();
    if (!out) throw IoError("failed while writing '" + path.string() + "'");
    result.files.push_back(name);
  };

  for (const VehicleType vehicle : config.vehicles) {
    for (const Mode mode : config.modes) {
      const std::string slice =
          std::string(to_string(vehicle)) + "_" + to_string(mode);
      const auto cleanup_and_context = [&](const std::string& what) {
        // A failed run leaves no artifacts: without the manifest the bundle
        // is partial, so everything written so far is removed.
        for (const std::string& name : result.files) {
          std::error_code ignore;
          fs::remove(fs::path(config.out_dir) / name, ignore);
        }
        result.files.clear();
        return "analysis " + std::string(to_string(vehicle)) + "/" +
               to_string(mode) + ": " + what;
      };
      try {
        AnalysisOutcome outcome = analyze_slice(used, config, vehicle, mode);
        write_artifact("clusters_" + slice + ".csv", clusters_csv(outcome));
        write_artifact("coloring_" + slice + ".csv", coloring_csv(outcome));
        write_artifact("coloring_" + slice + ".svg",
                       coloring_chart(mode, outcome.coloring, outcome.k,
                                      slice_title(outcome)));
        if (outcome.curve) {
          std::ostringstream curve_csv;
          write_consensus_csv(curve_csv, *outcome.curve);
          write_artifact("consensus_" + slice + ".csv", curve_csv.str());
          write_artifact("consensus_" + slice + ".svg",
                         consensus_chart(*outcome.curve, slice_title(outcome)));
        }
        write_artifact("ranksum_" + slice + ".json", ranksum_json(outcome));
        result.analyses.push_back(std::move(outcome));
      } catch (const ConfigError& e) {
        throw ConfigError(cleanup_and_context(e.what()));
      } catch (const IoError& e) {
        throw IoError(cleanup_and_context(e.what()));
      } catch (const DomainError& e) {
        throw DomainError(cleanup_and_context(e.what()));
      }
    }
  }

  std::sort(result.files.begin(), result.files.end());

  nlohmann::ordered_json manifest;
  manifest["tool"] = "micromob";
  manifest["version"] = kVersion;
  manifest["config_hash"] = config_hash(config);
  {
    nlohmann::ordered_json cfg;
    std::istringstream lines(canonical_config_string(config));
    std::string line;
    while (std::getline(lines, line)) {
      const std::size_t eq = line.find('=');
      cfg[line.substr(0, eq)] = line.substr(eq + 1);
    }
    manifest["config"] = cfg;
  }
  {
    nlohmann::ordered_json ing;
    ing["rows_read"] = ingest.rows_read;
    ing["rows_parsed"] = ingest.rows_parsed;
    ing["rows_rejected"] = ingest.rows_rejected_by_reason;
    ing["derived_field_conflicts"] = ingest.derived_field_conflicts;
    ing["vehicles"] = ingest.vehicle_counts;
    ing["trips_used"] = result.trips_used;
    manifest["ingest"] = ing;
  }
  auto analyses = nlohmann::ordered_json::array();
  for (const AnalysisOutcome& outcome : result.analyses) {
    analyses.push_back(outcome_json(outcome));
  }
  manifest["analyses"] = analyses;
  manifest["files"] = result.files;

  const fs::path manifest_path = fs::path(config.out_dir) / "manifest.json";
  std::ofstream manifest_out(manifest_path, std::ios::binary);
  if (!manifest_out) {
    throw IoError("cannot write '" + manifest_path.string() + "'");
  }
  manifest_out << manifest.dump(2) << '\n';
  manifest_out.flush();
  if (!manifest_out) {
    throw IoError("failed while writing '" + manifest_path.string() + "'");
  }
  return result;
}

}  // namespace micromob
