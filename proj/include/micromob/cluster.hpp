#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "micromob/profile.hpp"

namespace micromob {

/// How many points each centroid may hold during matching.
enum class QuotaPolicy {
  balanced,   ///< ceil(n / k) per centroid
  unbounded,  ///< n per centroid (capacity never binds)
};

enum class DistanceMetric {
  squared_euclidean,
  absolute,
};

struct ClusterConfig {
  int k = 2;
  QuotaPolicy quota = QuotaPolicy::balanced;
  DistanceMetric metric = DistanceMetric::squared_euclidean;
  int max_outer_iters = 100;
  uint64_t seed = 42;

  /// Throws ConfigError when k < 2 or max_outer_iters < 1.
  void validate() const;
};

struct ClusterStats {
  double mean = 0.0;
  double stddev = 0.0;  ///< frequency-weighted sample stddev (0 when W <= 1)
  double weight = 0.0;
  std::size_t size = 0;                        ///< number of points
  std::array<std::size_t, 2> label_counts{};  ///< indexed by Label
  double purity = 0.0;  ///< majority label share by point count; 0 when empty
  Label majority_label = Label::regime_a;  ///< ties go to regime_a
};

struct ClusterModel {
  ClusterConfig config;
  Mode mode = Mode::day_of_week;
  std::vector<double> centroids;
  std::vector<int> assignment;  ///< point index -> cluster id
  std::vector<ClusterStats> stats;
  int iterations = 0;  ///< matching rounds executed
  bool converged = false;
};

/// Both sides' orderings for one matching round.
struct PreferenceProfile {
  /// point_prefs[i]: centroid ids in proposal order, most preferred first.
  std::vector<std::vector<int>> point_prefs;
  /// centroid_rank[c][i]: position of point i in centroid c's ordering
  /// (lower is more preferred).
  std::vector<std::vector<int>> centroid_rank;
};

/// Plurality cluster of one period, by total point weight.
struct PeriodColor {
  int period = 0;
  int cluster = 0;
  double mean = 0.0;  ///< weighted mean speed of the period
  double weight = 0.0;
};

std::string to_string(QuotaPolicy policy);
std::string to_string(DistanceMetric metric);
QuotaPolicy parse_quota_policy(std::string_view text);
DistanceMetric parse_distance_metric(std::string_view text);

double point_distance(double a, double b, DistanceMetric metric);

/// Per-centroid capacities; balanced is ceil(n/k), unbounded is n.
std::vector<std::size_t> quotas_for(std::size_t n, int k, QuotaPolicy policy);

/// Seeded start: one random member feature, then repeatedly the feature
/// farthest from the chosen set (ties to the lower point index; duplicate
/// features fall back to the next distinct value, then to index order).
std::vector<double> initialize_centroids(const std::vector<LabeledPoint>& points,
                                         int k, class Rng& rng);

/// Centroid orderings are always by ascending distance (ties: lower point
/// index). Point orderings are by ascending distance on the first round
/// (previous_assignment == nullptr) and by descending label purity of the
/// previous round's clusters afterwards (ties: ascending distance, then lower
/// centroid id).
PreferenceProfile build_preferences(const std::vector<LabeledPoint>& points,
                                    const std::vector<double>& centroids,
                                    DistanceMetric metric,
                                    const std::vector<int>* previous_assignment);

/// Capacity-bounded deferred acceptance with points proposing; returns the
/// point-optimal stable assignment. Throws DomainError when the quotas cannot
/// hold all points.
std::vector<int> deferred_acceptance(const PreferenceProfile& prefs,
                                     const std::vector<std::size_t>& quotas);

/// Weighted member means; a cluster with no members is re-seeded to the
/// feature farthest from its previous centroid (ties: lower point index).
std::vector<double> update_centroids(const std::vector<LabeledPoint>& points,
                                     const std::vector<int>& assignment,
                                     const std::vector<double>& previous_centroids);

std::vector<ClusterStats> compute_stats(const AnalysisDataset& dataset,
                                        const std::vector<int>& assignment,
                                        int k);

/// Runs matching rounds until the assignment repeats or max_outer_iters is
/// hit. The returned centroids are the weighted means of the final
/// assignment. Throws DomainError when the dataset has fewer points than k.
ClusterModel fit(const AnalysisDataset& dataset, const ClusterConfig& config);

/// Relabels clusters so ids run in ascending mean order (ties keep the old
/// relative order); assignment, centroids, and stats are permuted together.
void order_clusters_by_mean(ClusterModel& model);

/// Colors each period present in the dataset by the cluster holding the
/// plurality of its weight (ties: lower cluster id). Ordered by period.
std::vector<PeriodColor> majority_period_coloring(const AnalysisDataset& dataset,
                                                  const std::vector<int>& assignment);

/// Serializes a fitted model (config echo, per-cluster stats, assignment).
void write_model_json(std::ostream& out, const ClusterModel& model,
                      bool include_assignment = true);

}  // namespace micromob
