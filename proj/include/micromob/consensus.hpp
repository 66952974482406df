#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "micromob/cluster.hpp"
#include "micromob/profile.hpp"

namespace micromob {

struct ConsensusConfig {
  int k_min = 2;
  int k_max = 6;
  int resamples = 50;      ///< subsamples drawn per candidate k
  double fraction = 0.8;   ///< subsample share of the dataset, (0, 1]
  uint64_t seed = 42;      ///< seeds the subsample draws (seed + run index)
  double flatness_threshold = 0.025;  ///< relative area gain treated as flat

  /// Throws ConfigError on out-of-range members.
  void validate() const;
};

/// Pairwise co-assignment frequencies accumulated over subsample runs.
/// An entry (i, j) is defined once the pair has shared at least one
/// subsample; its value is the share of those runs that put the two points
/// in the same cluster. Diagonal entries are 1 wherever the point was
/// sampled at all. Symmetric by construction.
class ConsensusMatrix {
 public:
  explicit ConsensusMatrix(std::size_t n);

  /// Records one run: `sample` holds distinct point indices and `assignment`
  /// the cluster id of each sampled point, position-aligned.
  void add_run(const std::vector<std::size_t>& sample,
               const std::vector<int>& assignment);

  std::size_t size() const { return n_; }
  bool defined(std::size_t i, std::size_t j) const;
  /// Throws DomainError for an undefined pair.
  double value(std::size_t i, std::size_t j) const;
  /// Off-diagonal pairs that never shared a subsample (these are excluded
  /// from the CDF).
  std::size_t undefined_pairs() const;
  /// All defined upper-triangle values, in (i, j) row-major order.
  std::vector<double> entries() const;

 private:
  std::size_t pair_index(std::size_t i, std::size_t j) const;

  std::size_t n_;
  std::vector<uint32_t> together_;
  std::vector<uint32_t> co_sampled_;
  std::vector<uint32_t> sampled_;  ///< per-point sample appearances
};

struct ConsensusEntry {
  int k = 0;
  double area = 0.0;   ///< area under the empirical CDF of matrix entries
  double delta = 0.0;  ///< relative area gain over the previous k
  std::size_t undefined_pairs = 0;
};

struct ConsensusCurve {
  std::vector<ConsensusEntry> entries;  ///< ascending k
  int chosen_k = 0;
};

/// One subsample run, for audit logs and determinism checks.
struct ConsensusRun {
  int k = 0;
  int run_index = 0;
  uint64_t subsample_seed = 0;
  std::vector<std::size_t> sample;  ///< original point indices
  std::vector<int> assignment;      ///< position-aligned cluster ids
};

/// Exact area under the empirical CDF of values in [0, 1]; equals
/// 1 - mean(values). Throws DomainError when empty.
double cdf_area(const std::vector<double>& values);

/// Picks the smallest k whose successor's relative gain falls below the
/// threshold; when the curve never flattens, the k with the largest gain
/// (ties to the lowest k). Throws DomainError on an empty curve.
int select_model_order(const std::vector<ConsensusEntry>& entries,
                       double flatness_threshold);

/// Scans k in [k_min, k_max]: draws `resamples` label-stratified subsamples
/// (shared across k), fits each with `cluster_template` at that k, and scores
/// assignment stability. Deterministic in the configs and the point multiset;
/// the input order of points does not matter. Pass `run_log` to capture every
/// subsample run and `matrices` to keep the per-k co-assignment matrices
/// (they are sizable; by default each is dropped once scored).
ConsensusCurve run_consensus(const AnalysisDataset& dataset,
                             const ConsensusConfig& config,
                             const ClusterConfig& cluster_template,
                             std::vector<ConsensusRun>* run_log = nullptr,
                             std::vector<ConsensusMatrix>* matrices = nullptr);

/// Writes "k,area,delta,chosen" rows, one per candidate k.
void write_consensus_csv(std::ostream& out, const ConsensusCurve& curve);

/// Writes {"chosen_k", "entries": [{"k","area","delta","undefined_pairs"}]}.
void write_consensus_json(std::ostream& out, const ConsensusCurve& curve);

/// Writes one JSON object per run, newline separated.
void write_run_log_jsonl(std::ostream& out, const std::vector<ConsensusRun>& runs);

}  // namespace micromob
