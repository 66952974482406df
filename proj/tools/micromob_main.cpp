// micromob: command-line front end for the trip-speed analysis library.
//
// Subcommands:
//   ingest     normalize a raw trips CSV and report rejected rows
//   profile    build a labeled speed dataset for one vehicle/mode slice
//   cluster    fit the capacity-bounded matching clusterer on a dataset
//   consensus  pick a cluster count by subsampled co-assignment stability
//   analyze    run the whole pipeline and write report artifacts

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "micromob/cluster.hpp"
#include "micromob/consensus.hpp"
#include "micromob/errors.hpp"
#include "micromob/profile.hpp"
#include "micromob/ranksum.hpp"
#include "micromob/report.hpp"
#include "micromob/trips.hpp"

namespace {

using namespace micromob;

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open input file '" + path + "'");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file '" + path + "'");
  return out;
}

SchemaMap schema_for(const std::string& name) {
  auto preset = SchemaMap::preset(name);
  if (!preset) {
    throw ConfigError("unknown schema preset '" + name +
                      "' (expected austin or normalized)");
  }
  return *preset;
}

VehicleType vehicle_for(const std::string& name) {
  auto vehicle = parse_vehicle_type(name);
  if (!vehicle) {
    throw ConfigError("unknown vehicle type '" + name +
                      "' (expected bicycle or scooter)");
  }
  return *vehicle;
}

std::string join(const std::vector<std::string>& parts) {
  std::string joined;
  for (const auto& part : parts) {
    if (!joined.empty()) joined += ',';
    joined += part;
  }
  return joined;
}

// Reads, parses, and optionally filters a trips CSV.
std::vector<TripRecord> load_trips(const std::string& path,
                                   const std::string& schema, bool filter,
                                   IngestReport* report_out = nullptr) {
  auto in = open_input(path);
  auto [trips, report] = parse_trips(in, schema_for(schema));
  if (report_out) *report_out = report;
  if (!filter) return std::move(trips);
  return filter_trips(trips, FilterPolicy{});
}

// ---------------------------------------------------------------------------
// ingest

struct IngestOptions {
  std::string input;
  std::string schema = "austin";
  bool filter_defaults = false;
  std::string out;
  std::string report_path;
};

void run_ingest(const IngestOptions& opt) {
  auto in = open_input(opt.input);
  auto [trips, report] = parse_trips(in, schema_for(opt.schema));
  const std::size_t parsed = trips.size();
  if (opt.filter_defaults) trips = filter_trips(trips, FilterPolicy{});

  auto out = open_output(opt.out);
  write_normalized_csv(out, trips);
  if (!out.flush()) throw IoError("failed writing '" + opt.out + "'");

  if (!opt.report_path.empty()) {
    auto report_out = open_output(opt.report_path);
    write_ingest_report_json(report_out, report);
    if (!report_out.flush()) {
      throw IoError("failed writing '" + opt.report_path + "'");
    }
  }

  std::cout << "read " << report.rows_read << " rows, parsed " << parsed
            << ", rejected " << report.rows_rejected_total();
  if (opt.filter_defaults) {
    std::cout << ", kept " << trips.size() << " after filtering";
  }
  std::cout << "\nwrote " << opt.out << "\n";
}

// ---------------------------------------------------------------------------
// profile

struct ProfileOptions {
  std::string input;
  std::string schema = "austin";
  std::string vehicle;
  std::string mode;
  std::string granularity;  // empty = default for the mode
  int daytime_start = 6;
  int daytime_end = 18;
  bool filter = true;
  std::string out;
};

void run_profile(const ProfileOptions& opt) {
  const Mode mode = parse_mode(opt.mode);
  const Granularity granularity = opt.granularity.empty()
                                      ? default_granularity(mode)
                                      : parse_granularity(opt.granularity);
  const DaytimeBoundary daytime{opt.daytime_start, opt.daytime_end};

  const auto trips = load_trips(opt.input, opt.schema, opt.filter);
  const auto dataset = build_dataset(trips, mode, granularity,
                                     vehicle_for(opt.vehicle), daytime);

  auto out = open_output(opt.out);
  write_dataset_csv(out, dataset);
  if (!out.flush()) throw IoError("failed writing '" + opt.out + "'");

  double total_weight = 0.0;
  for (const auto& point : dataset.points) total_weight += point.weight;
  std::cout << "wrote " << dataset.points.size() << " points ("
            << to_string(dataset.granularity) << ", total weight "
            << total_weight << ") to " << opt.out << "\n";
}

// ---------------------------------------------------------------------------
// cluster

struct ClusterOptions {
  std::string input;
  int k = 2;
  std::string quota = "balanced";
  std::string metric = "squared-euclidean";
  std::uint64_t seed = 42;
  int max_iters = 100;
  bool assignments = true;
  std::string out;
};

ClusterConfig cluster_config_for(int k, const std::string& quota,
                                 const std::string& metric, std::uint64_t seed,
                                 int max_iters) {
  ClusterConfig config;
  config.k = k;
  config.quota = parse_quota_policy(quota);
  config.metric = parse_distance_metric(metric);
  config.seed = seed;
  config.max_outer_iters = max_iters;
  config.validate();
  return config;
}

void run_cluster(const ClusterOptions& opt) {
  auto in = open_input(opt.input);
  const auto dataset = read_dataset_csv(in);
  const auto config = cluster_config_for(opt.k, opt.quota, opt.metric,
                                         opt.seed, opt.max_iters);

  auto model = fit(dataset, config);
  order_clusters_by_mean(model);

  auto out = open_output(opt.out);
  write_model_json(out, model, opt.assignments);
  if (!out.flush()) throw IoError("failed writing '" + opt.out + "'");

  std::cout << "fit k=" << config.k << " on " << dataset.points.size()
            << " points: " << (model.converged ? "converged" : "iteration cap")
            << " after " << model.iterations << " rounds\n";
  for (std::size_t c = 0; c < model.stats.size(); ++c) {
    const auto& stats = model.stats[c];
    std::cout << "  cluster " << c << ": mean " << stats.mean << " m/s, std "
              << stats.stddev << ", size " << stats.size << ", purity "
              << stats.purity << "\n";
  }
}

// ---------------------------------------------------------------------------
// consensus

struct ConsensusOptions {
  std::string input;
  int k_min = 2;
  int k_max = 6;
  int resamples = 50;
  double fraction = 0.8;
  std::uint64_t seed = 42;
  double threshold = 0.025;
  std::string quota = "balanced";
  std::string metric = "squared-euclidean";
  int max_iters = 100;
  std::string out_csv;
  std::string out_json;
  std::string run_log;
};

void run_consensus_cmd(const ConsensusOptions& opt) {
  auto in = open_input(opt.input);
  const auto dataset = read_dataset_csv(in);

  ConsensusConfig config;
  config.k_min = opt.k_min;
  config.k_max = opt.k_max;
  config.resamples = opt.resamples;
  config.fraction = opt.fraction;
  config.seed = opt.seed;
  config.flatness_threshold = opt.threshold;
  config.validate();

  // k in the template is overridden per candidate; the seed here only fixes
  // the (deterministic) fit and is independent of the subsample seed.
  const auto cluster_template = cluster_config_for(
      config.k_min, opt.quota, opt.metric, opt.seed, opt.max_iters);

  std::vector<ConsensusRun> runs;
  const auto curve =
      run_consensus(dataset, config, cluster_template,
                    opt.run_log.empty() ? nullptr : &runs);

  if (!opt.out_csv.empty()) {
    auto out = open_output(opt.out_csv);
    write_consensus_csv(out, curve);
    if (!out.flush()) throw IoError("failed writing '" + opt.out_csv + "'");
  }
  if (!opt.out_json.empty()) {
    auto out = open_output(opt.out_json);
    write_consensus_json(out, curve);
    if (!out.flush()) throw IoError("failed writing '" + opt.out_json + "'");
  }
  if (!opt.run_log.empty()) {
    auto out = open_output(opt.run_log);
    write_run_log_jsonl(out, runs);
    if (!out.flush()) throw IoError("failed writing '" + opt.run_log + "'");
  }

  for (const auto& entry : curve.entries) {
    std::cout << "k=" << entry.k << "  area=" << entry.area
              << "  delta=" << entry.delta
              << (entry.k == curve.chosen_k ? "  <- chosen" : "") << "\n";
    if (entry.undefined_pairs > 0) {
      std::cerr << "warning: k=" << entry.k << ": " << entry.undefined_pairs
                << " point pairs were never co-sampled and are excluded from"
                   " the consensus CDF (raise --resamples or --fraction)\n";
    }
  }
  std::cout << "chosen k = " << curve.chosen_k << "\n";
}

// ---------------------------------------------------------------------------
// analyze

struct AnalyzeOptions {
  std::string config_path;
  std::string input;
  std::vector<std::string> vehicles;
  std::vector<std::string> modes;
  std::string k;
  std::string seed;
  std::string out;
};

void run_analyze(const AnalyzeOptions& opt) {
  AnalysisConfig config;
  if (!opt.config_path.empty()) {
    std::ifstream in(opt.config_path, std::ios::binary);
    if (!in) throw IoError("cannot open config file '" + opt.config_path + "'");
    config = parse_analysis_config(in);
  }
  apply_overrides(config, env_overrides());

  std::map<std::string, std::string> flags;
  if (!opt.input.empty()) flags["input"] = opt.input;
  if (!opt.vehicles.empty()) flags["vehicles"] = join(opt.vehicles);
  if (!opt.modes.empty()) flags["modes"] = join(opt.modes);
  if (!opt.k.empty()) flags["k"] = opt.k;
  if (!opt.seed.empty()) flags["seed"] = opt.seed;
  if (!opt.out.empty()) flags["out"] = opt.out;
  apply_overrides(config, flags);

  const auto result = run_pipeline(config);

  std::cout << "ingested " << result.ingest.rows_parsed << " trips, "
            << result.trips_used << " kept after filtering\n";
  for (const auto& analysis : result.analyses) {
    std::cout << to_string(analysis.vehicle) << " / "
              << to_string(analysis.mode) << ": k=" << analysis.k
              << (analysis.k_from_consensus ? " (consensus)" : " (fixed)");
    std::cout << ", means";
    for (const auto& stats : analysis.model.stats) {
      std::cout << " " << stats.mean;
    }
    std::cout << ", rank-sum p=" << analysis.ranksum.p_two_sided << " ("
              << analysis.ranksum.method << ")\n";
  }
  std::cout << "wrote " << result.files.size() << " files + manifest.json to "
            << config.out_dir << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dockless micromobility trip-speed pattern analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "micromob 0.1.0");

  IngestOptions ingest_opt;
  auto* ingest_cmd = app.add_subcommand(
      "ingest", "normalize a raw trips CSV and report rejected rows");
  ingest_cmd->add_option("--input,-i", ingest_opt.input, "trips CSV")
      ->required();
  ingest_cmd->add_option("--schema", ingest_opt.schema,
                         "header preset: austin or normalized");
  ingest_cmd->add_flag("--filter-defaults", ingest_opt.filter_defaults,
                       "drop trips outside the default distance/duration keeps");
  ingest_cmd->add_option("--out,-o", ingest_opt.out, "normalized CSV path")
      ->required();
  ingest_cmd->add_option("--report", ingest_opt.report_path,
                         "ingest report JSON path");
  ingest_cmd->callback([&ingest_opt] { run_ingest(ingest_opt); });

  ProfileOptions profile_opt;
  auto* profile_cmd = app.add_subcommand(
      "profile", "build a labeled speed dataset for one vehicle/mode slice");
  profile_cmd->add_option("--input,-i", profile_opt.input, "trips CSV")
      ->required();
  profile_cmd->add_option("--schema", profile_opt.schema,
                          "header preset: austin or normalized");
  profile_cmd->add_option("--vehicle", profile_opt.vehicle,
                          "bicycle or scooter")
      ->required();
  profile_cmd->add_option("--mode", profile_opt.mode,
                          "day-of-week or time-of-day")
      ->required();
  profile_cmd->add_option("--granularity", profile_opt.granularity,
                          "per-trip or per-period (default depends on mode)");
  profile_cmd->add_option("--daytime-start", profile_opt.daytime_start,
                          "first daytime hour (default 6)");
  profile_cmd->add_option("--daytime-end", profile_opt.daytime_end,
                          "first nighttime hour (default 18)");
  profile_cmd->add_flag("--filter,!--no-filter", profile_opt.filter,
                        "apply the default trip filter (default on)");
  profile_cmd->add_option("--out,-o", profile_opt.out, "dataset CSV path")
      ->required();
  profile_cmd->callback([&profile_opt] { run_profile(profile_opt); });

  ClusterOptions cluster_opt;
  auto* cluster_cmd = app.add_subcommand(
      "cluster", "fit the matching-based clusterer on a dataset CSV");
  cluster_cmd->add_option("--in,-i,--input", cluster_opt.input, "dataset CSV")
      ->required();
  cluster_cmd->add_option("--k", cluster_opt.k, "number of clusters (>= 2)");
  cluster_cmd->add_option("--quota", cluster_opt.quota,
                          "balanced or unbounded");
  cluster_cmd->add_option("--metric", cluster_opt.metric,
                          "squared-euclidean or absolute");
  cluster_cmd->add_option("--seed", cluster_opt.seed, "RNG seed");
  cluster_cmd->add_option("--max-iters", cluster_opt.max_iters,
                          "outer iteration cap");
  cluster_cmd->add_flag("--assignments,!--no-assignments",
                        cluster_opt.assignments,
                        "include the per-point assignment in the model JSON");
  cluster_cmd->add_option("--out,-o", cluster_opt.out, "model JSON path")
      ->required();
  cluster_cmd->callback([&cluster_opt] { run_cluster(cluster_opt); });

  ConsensusOptions consensus_opt;
  auto* consensus_cmd = app.add_subcommand(
      "consensus", "pick a cluster count by subsampled assignment stability");
  consensus_cmd->add_option("--in,-i,--input", consensus_opt.input,
                            "dataset CSV")
      ->required();
  consensus_cmd->add_option("--k-min", consensus_opt.k_min,
                            "smallest candidate k");
  consensus_cmd->add_option("--k-max", consensus_opt.k_max,
                            "largest candidate k");
  consensus_cmd->add_option("--resamples", consensus_opt.resamples,
                            "subsamples per candidate k");
  consensus_cmd->add_option("--fraction", consensus_opt.fraction,
                            "subsample fraction of the dataset, (0, 1]");
  consensus_cmd->add_option("--seed", consensus_opt.seed, "RNG seed");
  consensus_cmd->add_option("--threshold", consensus_opt.threshold,
                            "relative area gain treated as flat");
  consensus_cmd->add_option("--quota", consensus_opt.quota,
                            "balanced or unbounded");
  consensus_cmd->add_option("--metric", consensus_opt.metric,
                            "squared-euclidean or absolute");
  consensus_cmd->add_option("--max-iters", consensus_opt.max_iters,
                            "outer iteration cap per fit");
  consensus_cmd->add_option("--out-csv", consensus_opt.out_csv,
                            "consensus curve CSV path");
  consensus_cmd->add_option("--out-json", consensus_opt.out_json,
                            "consensus curve JSON path");
  consensus_cmd->add_option("--run-log", consensus_opt.run_log,
                            "per-run sample/assignment JSON-lines path");
  consensus_cmd->callback([&consensus_opt] { run_consensus_cmd(consensus_opt); });

  AnalyzeOptions analyze_opt;
  auto* analyze_cmd = app.add_subcommand(
      "analyze", "run the full pipeline and write report artifacts");
  analyze_cmd->add_option("--config,-c", analyze_opt.config_path,
                          "key = value config file");
  analyze_cmd->add_option("--input", analyze_opt.input, "trips CSV");
  analyze_cmd->add_option("--vehicle", analyze_opt.vehicles,
                          "vehicle type (repeatable)");
  analyze_cmd->add_option("--mode", analyze_opt.modes, "mode (repeatable)");
  analyze_cmd->add_option("--k", analyze_opt.k, "auto or an integer >= 2");
  analyze_cmd->add_option("--seed", analyze_opt.seed,
                          "clustering + consensus seed");
  analyze_cmd->add_option("--out", analyze_opt.out, "output directory");
  analyze_cmd->callback([&analyze_opt] { run_analyze(analyze_opt); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "micromob: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
