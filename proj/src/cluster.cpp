#include "micromob/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <queue>
#include <tuple>

#include <json.hpp>

#include "micromob/errors.hpp"
#include "micromob/rng.hpp"
#include "text_util.hpp"

namespace micromob {

namespace {

std::string normalized_token(std::string_view text) {
  std::string t = detail::to_lower(detail::trim(text));
  for (char& c : t) {
    if (c == '-' || c == ' ') c = '_';
  }
  return t;
}

}  // namespace

void ClusterConfig::validate() const {
  if (k < 2) {
    throw ConfigError("cluster count must be at least 2, got " +
                      std::to_string(k));
  }
  if (max_outer_iters < 1) {
    throw ConfigError("max_outer_iters must be at least 1, got " +
                      std::to_string(max_outer_iters));
  }
}

std::string to_string(QuotaPolicy policy) {
  return policy == QuotaPolicy::balanced ? "balanced" : "unbounded";
}

std::string to_string(DistanceMetric metric) {
  return metric == DistanceMetric::squared_euclidean ? "squared_euclidean"
                                                     : "absolute";
}

QuotaPolicy parse_quota_policy(std::string_view text) {
  const std::string t = normalized_token(text);
  if (t == "balanced") return QuotaPolicy::balanced;
  if (t == "unbounded" || t == "unbounded_cap") return QuotaPolicy::unbounded;
  throw ConfigError("unknown quota policy '" + std::string(text) +
                    "' (expected balanced or unbounded)");
}

DistanceMetric parse_distance_metric(std::string_view text) {
  const std::string t = normalized_token(text);
  if (t == "squared_euclidean") return DistanceMetric::squared_euclidean;
  if (t == "absolute") return DistanceMetric::absolute;
  throw ConfigError("unknown distance metric '" + std::string(text) +
                    "' (expected squared_euclidean or absolute)");
}

double point_distance(double a, double b, DistanceMetric metric) {
  const double d = a - b;
  return metric == DistanceMetric::squared_euclidean ? d * d : std::fabs(d);
}

std::vector<std::size_t> quotas_for(std::size_t n, int k, QuotaPolicy policy) {
  if (k < 1) throw ConfigError("cluster count must be positive");
  const std::size_t quota =
      policy == QuotaPolicy::balanced
          ? (n + static_cast<std::size_t>(k) - 1) / static_cast<std::size_t>(k)
          : n;
  return std::vector<std::size_t>(static_cast<std::size_t>(k), quota);
}

std::vector<double> initialize_centroids(const std::vector<LabeledPoint>& points,
                                         int k, Rng& rng) {
  const std::size_t n = points.size();
  if (n == 0) throw DomainError("cannot initialize centroids without points");
  if (k < 1 || static_cast<std::size_t>(k) > n) {
    throw DomainError("cannot place " + std::to_string(k) +
                      " centroids over " + std::to_string(n) + " points");
  }

  std::vector<double> centroids;
  std::vector<bool> used(n, false);
  const std::size_t first = static_cast<std::size_t>(rng.below(n));
  centroids.push_back(points[first].feature);
  used[first] = true;

  while (centroids.size() < static_cast<std::size_t>(k)) {
    // Farthest-point step: the feature maximizing its distance to the
    // nearest chosen centroid (first/lowest index on ties).
    std::size_t best = n;
    double best_d = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      double d = std::numeric_limits<double>::infinity();
      for (const double c : centroids) {
        d = std::min(d, std::fabs(points[i].feature - c));
      }
      if (d > best_d) {
        best_d = d;
        best = i;
      }
    }
    if (best_d > 0.0) {
      centroids.push_back(points[best].feature);
      used[best] = true;
      continue;
    }
    // Every feature already coincides with a centroid; reuse the first
    // point that has not seeded one yet.
    std::size_t fallback = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!used[i]) {
        fallback = i;
        break;
      }
    }
    centroids.push_back(points[fallback].feature);
    used[fallback] = true;
  }
  return centroids;
}

PreferenceProfile build_preferences(const std::vector<LabeledPoint>& points,
                                    const std::vector<double>& centroids,
                                    DistanceMetric metric,
                                    const std::vector<int>* previous_assignment) {
  const std::size_t n = points.size();
  const int k = static_cast<int>(centroids.size());

  PreferenceProfile prefs;
  prefs.centroid_rank.assign(centroids.size(), std::vector<int>(n, 0));
  {
    std::vector<std::size_t> order(n);
    for (int c = 0; c < k; ++c) {
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double da = point_distance(points[a].feature, centroids[c], metric);
        const double db = point_distance(points[b].feature, centroids[c], metric);
        if (da != db) return da < db;
        return a < b;
      });
      for (std::size_t r = 0; r < n; ++r) {
        prefs.centroid_rank[static_cast<std::size_t>(c)][order[r]] =
            static_cast<int>(r);
      }
    }
  }

  // Label purity of each previous cluster, used from the second round on.
  std::vector<std::array<double, 2>> purity;
  if (previous_assignment) {
    if (previous_assignment->size() != n) {
      throw DomainError("previous assignment size does not match point count");
    }
    std::vector<std::array<std::size_t, 2>> counts(centroids.size(), {0, 0});
    std::vector<std::size_t> sizes(centroids.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const int a = (*previous_assignment)[i];
      if (a < 0 || a >= k) {
        throw DomainError("previous assignment has an out-of-range cluster id");
      }
      counts[static_cast<std::size_t>(a)]
            [static_cast<std::size_t>(points[i].label)]++;
      sizes[static_cast<std::size_t>(a)]++;
    }
    purity.assign(centroids.size(), {0.0, 0.0});
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      if (sizes[c] == 0) continue;
      purity[c][0] = static_cast<double>(counts[c][0]) /
                     static_cast<double>(sizes[c]);
      purity[c][1] = static_cast<double>(counts[c][1]) /
                     static_cast<double>(sizes[c]);
    }
  }

  prefs.point_prefs.assign(n, {});
  std::vector<int> candidates(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < n; ++i) {
    std::iota(candidates.begin(), candidates.end(), 0);
    const double x = points[i].feature;
    const std::size_t label = static_cast<std::size_t>(points[i].label);
    std::sort(candidates.begin(), candidates.end(), [&](int a, int b) {
      const double da = point_distance(x, centroids[static_cast<std::size_t>(a)], metric);
      const double db = point_distance(x, centroids[static_cast<std::size_t>(b)], metric);
      if (previous_assignment) {
        const double pa = purity[static_cast<std::size_t>(a)][label];
        const double pb = purity[static_cast<std::size_t>(b)][label];
        if (pa != pb) return pa > pb;
      }
      if (da != db) return da < db;
      return a < b;
    });
    prefs.point_prefs[i] = candidates;
  }
  return prefs;
}

std::vector<int> deferred_acceptance(const PreferenceProfile& prefs,
                                     const std::vector<std::size_t>& quotas) {
  const std::size_t n = prefs.point_prefs.size();
  const std::size_t k = quotas.size();
  if (prefs.centroid_rank.size() != k) {
    throw DomainError("preference profile does not match the quota count");
  }
  std::size_t capacity = 0;
  for (const std::size_t q : quotas) capacity += q;
  if (capacity < n) {
    throw DomainError("quotas hold " + std::to_string(capacity) +
                      " points but " + std::to_string(n) + " need placement");
  }

  std::vector<int> assigned(n, -1);
  std::vector<std::size_t> next_choice(n, 0);
  // Worst held member on top, keyed by the centroid's rank of the member.
  std::vector<std::priority_queue<std::pair<int, std::size_t>>> held(k);
  std::deque<std::size_t> free_points(n);
  std::iota(free_points.begin(), free_points.end(), std::size_t{0});

  while (!free_points.empty()) {
    const std::size_t i = free_points.front();
    free_points.pop_front();
    if (next_choice[i] >= prefs.point_prefs[i].size()) {
      throw DomainError("point exhausted its preference list unmatched");
    }
    const std::size_t c =
        static_cast<std::size_t>(prefs.point_prefs[i][next_choice[i]++]);
    const int rank = prefs.centroid_rank[c][i];
    if (held[c].size() < quotas[c]) {
      held[c].emplace(rank, i);
      assigned[i] = static_cast<int>(c);
      continue;
    }
    const auto worst = held[c].top();
    if (rank < worst.first) {
      held[c].pop();
      assigned[worst.second] = -1;
      free_points.push_back(worst.second);
      held[c].emplace(rank, i);
      assigned[i] = static_cast<int>(c);
    } else {
      free_points.push_back(i);
    }
  }
  return assigned;
}

std::vector<double> update_centroids(const std::vector<LabeledPoint>& points,
                                     const std::vector<int>& assignment,
                                     const std::vector<double>& previous_centroids) {
  const std::size_t k = previous_centroids.size();
  std::vector<double> sum_w(k, 0.0), sum_wx(k, 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto c = static_cast<std::size_t>(assignment[i]);
    sum_w[c] += points[i].weight;
    sum_wx[c] += points[i].weight * points[i].feature;
  }
  std::vector<double> centroids(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    if (sum_w[c] > 0.0) {
      centroids[c] = sum_wx[c] / sum_w[c];
      continue;
    }
    // Empty cluster: re-seed to the feature farthest from where the
    // centroid used to sit.
    double best_d = -1.0;
    for (const LabeledPoint& point : points) {
      const double d = std::fabs(point.feature - previous_centroids[c]);
      if (d > best_d) {
        best_d = d;
        centroids[c] = point.feature;
      }
    }
  }
  return centroids;
}

std::vector<ClusterStats> compute_stats(const AnalysisDataset& dataset,
                                        const std::vector<int>& assignment,
                                        int k) {
  std::vector<ClusterStats> stats(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < dataset.points.size(); ++i) {
    const LabeledPoint& point = dataset.points[i];
    ClusterStats& s = stats[static_cast<std::size_t>(assignment[i])];
    s.size++;
    s.weight += point.weight;
    s.mean += point.weight * point.feature;  // running weighted sum for now
    s.label_counts[static_cast<std::size_t>(point.label)]++;
  }
  for (ClusterStats& s : stats) {
    if (s.weight > 0.0) s.mean /= s.weight;
    if (s.size > 0) {
      const std::size_t top = std::max(s.label_counts[0], s.label_counts[1]);
      s.purity = static_cast<double>(top) / static_cast<double>(s.size);
      s.majority_label = s.label_counts[1] > s.label_counts[0]
                             ? Label::regime_b
                             : Label::regime_a;
    }
  }
  std::vector<double> ss(static_cast<std::size_t>(k), 0.0);
  for (std::size_t i = 0; i < dataset.points.size(); ++i) {
    const LabeledPoint& point = dataset.points[i];
    const auto c = static_cast<std::size_t>(assignment[i]);
    const double d = point.feature - stats[c].mean;
    ss[c] += point.weight * d * d;
  }
  for (std::size_t c = 0; c < stats.size(); ++c) {
    if (stats[c].weight > 1.0) {
      stats[c].stddev = std::sqrt(ss[c] / (stats[c].weight - 1.0));
    }
  }
  return stats;
}

ClusterModel fit(const AnalysisDataset& dataset, const ClusterConfig& config) {
  config.validate();
  const std::vector<LabeledPoint>& points = dataset.points;
  const std::size_t n = points.size();
  if (n < static_cast<std::size_t>(config.k)) {
    throw DomainError("cannot fit " + std::to_string(config.k) +
                      " clusters with " + std::to_string(n) + " points");
  }

  Rng rng(config.seed);
  std::vector<double> centroids = initialize_centroids(points, config.k, rng);
  const std::vector<std::size_t> quotas = quotas_for(n, config.k, config.quota);

  ClusterModel model;
  model.config = config;
  model.mode = dataset.mode;

  std::vector<int> assignment;
  std::optional<std::vector<int>> previous;
  for (int iter = 1; iter <= config.max_outer_iters; ++iter) {
    const PreferenceProfile prefs = build_preferences(
        points, centroids, config.metric, previous ? &*previous : nullptr);
    assignment = deferred_acceptance(prefs, quotas);
    model.iterations = iter;
    if (previous && assignment == *previous) {
      model.converged = true;
      break;
    }
    centroids = update_centroids(points, assignment, centroids);
    previous = assignment;
  }
  // In both exit paths `centroids` already equals the weighted means of the
  // final assignment: on convergence the last update produced them, and on
  // the iteration cap the update above ran after the final matching.
  model.assignment = std::move(assignment);
  model.centroids = std::move(centroids);
  model.stats = compute_stats(dataset, model.assignment, config.k);
  return model;
}

void order_clusters_by_mean(ClusterModel& model) {
  const std::size_t k = model.stats.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return model.stats[a].mean < model.stats[b].mean;
  });
  std::vector<int> new_id(k, 0);
  for (std::size_t rank = 0; rank < k; ++rank) {
    new_id[order[rank]] = static_cast<int>(rank);
  }
  std::vector<ClusterStats> stats(k);
  std::vector<double> centroids(k, 0.0);
  for (std::size_t rank = 0; rank < k; ++rank) {
    stats[rank] = model.stats[order[rank]];
    centroids[rank] = model.centroids[order[rank]];
  }
  model.stats = std::move(stats);
  model.centroids = std::move(centroids);
  for (int& a : model.assignment) a = new_id[static_cast<std::size_t>(a)];
}

std::vector<PeriodColor> majority_period_coloring(const AnalysisDataset& dataset,
                                                  const std::vector<int>& assignment) {
  if (assignment.size() != dataset.points.size()) {
    throw DomainError("assignment size does not match point count");
  }
  struct Accum {
    std::map<int, double> cluster_weight;
    double sum_w = 0.0;
    double sum_wx = 0.0;
  };
  std::map<int, Accum> by_period;
  for (std::size_t i = 0; i < dataset.points.size(); ++i) {
    const LabeledPoint& point = dataset.points[i];
    Accum& a = by_period[point.period];
    a.cluster_weight[assignment[i]] += point.weight;
    a.sum_w += point.weight;
    a.sum_wx += point.weight * point.feature;
  }
  std::vector<PeriodColor> out;
  out.reserve(by_period.size());
  for (const auto& [period, accum] : by_period) {
    PeriodColor color;
    color.period = period;
    color.weight = accum.sum_w;
    color.mean = accum.sum_wx / accum.sum_w;
    double best = -1.0;
    for (const auto& [cluster, weight] : accum.cluster_weight) {
      if (weight > best) {  // map iterates ascending ids, so ties keep the lower
        best = weight;
        color.cluster = cluster;
      }
    }
    out.push_back(color);
  }
  return out;
}

void write_model_json(std::ostream& out, const ClusterModel& model,
                      bool include_assignment) {
  nlohmann::ordered_json j;
  j["k"] = model.config.k;
  j["quota"] = to_string(model.config.quota);
  j["metric"] = to_string(model.config.metric);
  j["seed"] = model.config.seed;
  j["max_outer_iters"] = model.config.max_outer_iters;
  j["iterations"] = model.iterations;
  j["converged"] = model.converged;
  j["mode"] = to_string(model.mode);
  j["centroids"] = model.centroids;
  auto clusters = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < model.stats.size(); ++c) {
    const ClusterStats& s = model.stats[c];
    nlohmann::ordered_json e;
    e["id"] = c;
    e["mean"] = s.mean;
    e["stddev"] = s.stddev;
    e["weight"] = s.weight;
    e["size"] = s.size;
    e["purity"] = s.purity;
    e["majority_label"] = label_name(model.mode, s.majority_label);
    e["label_counts"] = {
        {label_name(model.mode, Label::regime_a), s.label_counts[0]},
        {label_name(model.mode, Label::regime_b), s.label_counts[1]},
    };
    clusters.push_back(e);
  }
  j["clusters"] = clusters;
  if (include_assignment) j["assignment"] = model.assignment;
  out << j.dump(2) << '\n';
}

}  // namespace micromob
