#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "micromob/cluster.hpp"
#include "micromob/consensus.hpp"
#include "micromob/profile.hpp"
#include "micromob/ranksum.hpp"
#include "micromob/trips.hpp"

namespace micromob {

/// Everything one end-to-end run needs. Defaults reproduce the reference
/// analysis: both vehicles, both modes, automatic model order, seed 42.
struct AnalysisConfig {
  std::string input;           ///< trips CSV path
  std::string schema = "austin";
  bool filter = true;          ///< apply the default FilterPolicy
  std::vector<VehicleType> vehicles{VehicleType::bicycle, VehicleType::scooter};
  std::vector<Mode> modes{Mode::day_of_week, Mode::time_of_day};
  /// Unset means the per-mode default (per-trip for day-of-week,
  /// per-period-per-date for time-of-day).
  std::optional<Granularity> granularity;
  DaytimeBoundary daytime;
  std::string k = "auto";      ///< "auto" or an integer >= 2
  ClusterConfig cluster;       ///< template; k is overridden per analysis
  ConsensusConfig consensus;
  /// Automatic model order refuses datasets larger than this; use a fixed k
  /// or per-period granularity instead.
  std::size_t consensus_max_points = 5000;
  std::string out_dir = "out";

  /// Throws ConfigError on contradictions (bad k, empty slices, dupes, ...).
  void validate() const;
};

/// Keys accepted by apply_overrides / the config file / the environment.
const std::vector<std::string>& analysis_config_keys();

/// Reads a flat "key = value" text file ('#' starts a comment line; later
/// keys win). Keys are analysis_config_keys(); unknown keys throw ConfigError.
AnalysisConfig parse_analysis_config(std::istream& in);

/// Applies string-typed overrides onto a config (config file < environment <
/// command line). Unknown keys or unparseable values throw ConfigError.
/// "seed" sets both the clustering and consensus seeds.
void apply_overrides(AnalysisConfig& config,
                     const std::map<std::string, std::string>& overrides);

/// Collects MICROMOB_<KEY> environment variables for every known key.
std::map<std::string, std::string> env_overrides();

/// Deterministic "key=value" listing of the effective settings, one per
/// line, excluding the output directory.
std::string canonical_config_string(const AnalysisConfig& config);

/// FNV-1a 64 of canonical_config_string, as 16 hex digits.
std::string config_hash(const AnalysisConfig& config);

/// One (vehicle, mode) slice of a finished run. Cluster ids are ordered by
/// ascending mean speed.
struct AnalysisOutcome {
  VehicleType vehicle = VehicleType::bicycle;
  Mode mode = Mode::day_of_week;
  Granularity granularity = Granularity::per_trip;
  int k = 0;
  bool k_from_consensus = false;
  std::optional<ConsensusCurve> curve;
  ClusterModel model;
  std::vector<PeriodColor> coloring;
  RankSumResult ranksum;  ///< two largest clusters compared
  int compared_a = 0;
  int compared_b = 1;
};

struct PipelineResult {
  IngestReport ingest;
  std::size_t trips_used = 0;  ///< rows surviving the filter
  std::vector<AnalysisOutcome> analyses;
  std::vector<std::string> files;  ///< artifact names relative to out_dir
};

/// Ingests, builds one dataset per (vehicle, mode), picks k, fits, compares
/// the two largest clusters, and writes all artifacts plus manifest.json
/// into config.out_dir. Reruns with identical inputs produce byte-identical
/// artifacts. On failure the half-written analysis is removed before the
/// error propagates with the slice named.
PipelineResult run_pipeline(const AnalysisConfig& config);

}  // namespace micromob
