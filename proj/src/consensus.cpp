#include "micromob/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <tuple>

#include <json.hpp>

#include "micromob/errors.hpp"
#include "micromob/rng.hpp"
#include "text_util.hpp"

namespace micromob {

void ConsensusConfig::validate() const {
  if (k_min < 2) {
    throw ConfigError("k_min must be at least 2, got " + std::to_string(k_min));
  }
  if (k_max < k_min) {
    throw ConfigError("k_max must be >= k_min, got k_min=" +
                      std::to_string(k_min) + " k_max=" + std::to_string(k_max));
  }
  if (resamples < 2) {
    throw ConfigError("resamples must be at least 2, got " +
                      std::to_string(resamples));
  }
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw ConfigError("fraction must be in (0, 1], got " +
                      detail::format_double(fraction));
  }
  if (!(flatness_threshold >= 0.0)) {
    throw ConfigError("flatness_threshold must be non-negative");
  }
}

ConsensusMatrix::ConsensusMatrix(std::size_t n)
    : n_(n),
      together_(n >= 2 ? n * (n - 1) / 2 : 0, 0),
      co_sampled_(n >= 2 ? n * (n - 1) / 2 : 0, 0),
      sampled_(n, 0) {}

std::size_t ConsensusMatrix::pair_index(std::size_t i, std::size_t j) const {
  // Row-major upper triangle, i < j.
  return i * n_ - i * (i + 1) / 2 + (j - i - 1);
}

void ConsensusMatrix::add_run(const std::vector<std::size_t>& sample,
                              const std::vector<int>& assignment) {
  if (sample.size() != assignment.size()) {
    throw DomainError("sample and assignment sizes differ");
  }
  for (std::size_t p = 0; p < sample.size(); ++p) {
    if (sample[p] >= n_) throw DomainError("sample index out of range");
    sampled_[sample[p]]++;
    for (std::size_t q = p + 1; q < sample.size(); ++q) {
      const std::size_t i = std::min(sample[p], sample[q]);
      const std::size_t j = std::max(sample[p], sample[q]);
      const std::size_t idx = pair_index(i, j);
      co_sampled_[idx]++;
      together_[idx] +=
          static_cast<uint32_t>(assignment[p] == assignment[q]);
    }
  }
}

bool ConsensusMatrix::defined(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= n_) return false;
  if (i == j) return sampled_[i] > 0;
  return co_sampled_[pair_index(std::min(i, j), std::max(i, j))] > 0;
}

double ConsensusMatrix::value(std::size_t i, std::size_t j) const {
  if (!defined(i, j)) {
    throw DomainError("consensus value undefined for this pair");
  }
  if (i == j) return 1.0;
  const std::size_t idx = pair_index(std::min(i, j), std::max(i, j));
  return static_cast<double>(together_[idx]) /
         static_cast<double>(co_sampled_[idx]);
}

std::size_t ConsensusMatrix::undefined_pairs() const {
  std::size_t undefined = 0;
  for (const uint32_t c : co_sampled_) undefined += (c == 0);
  return undefined;
}

std::vector<double> ConsensusMatrix::entries() const {
  std::vector<double> out;
  out.reserve(co_sampled_.size());
  for (std::size_t idx = 0; idx < co_sampled_.size(); ++idx) {
    if (co_sampled_[idx] == 0) continue;
    out.push_back(static_cast<double>(together_[idx]) /
                  static_cast<double>(co_sampled_[idx]));
  }
  return out;
}

double cdf_area(const std::vector<double>& values) {
  if (values.empty()) {
    throw DomainError("cannot take the CDF area of an empty set");
  }
  // For step CDF F over [0, 1], the exact integral is 1 - mean: each value v
  // contributes the measure of [v, 1]. Summing in sorted order keeps the
  // result independent of how the caller enumerated the values.
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (const double v : sorted) sum += v;
  return 1.0 - sum / static_cast<double>(sorted.size());
}

int select_model_order(const std::vector<ConsensusEntry>& entries,
                       double flatness_threshold) {
  if (entries.empty()) {
    throw DomainError("cannot select a model order from an empty curve");
  }
  for (std::size_t i = 0; i + 1 < entries.size(); ++i) {
    if (entries[i + 1].delta < flatness_threshold) return entries[i].k;
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].delta > entries[best].delta) best = i;
  }
  return entries[best].k;
}

namespace {

// Stratified sample sizes by largest remainder, capped by group sizes and
// guaranteeing every non-empty group at least one draw when the total
// allows it. Deterministic.
std::vector<std::size_t> allocate_strata(const std::vector<std::size_t>& group_sizes,
                                         std::size_t total) {
  const std::size_t n =
      std::accumulate(group_sizes.begin(), group_sizes.end(), std::size_t{0});
  std::vector<std::size_t> take(group_sizes.size(), 0);
  if (n == 0 || total == 0) return take;

  std::vector<double> remainder(group_sizes.size(), 0.0);
  std::size_t allocated = 0;
  for (std::size_t g = 0; g < group_sizes.size(); ++g) {
    const double exact = static_cast<double>(total) *
                         static_cast<double>(group_sizes[g]) /
                         static_cast<double>(n);
    take[g] = std::min(static_cast<std::size_t>(exact), group_sizes[g]);
    remainder[g] = exact - static_cast<double>(take[g]);
    allocated += take[g];
  }
  std::vector<std::size_t> order(group_sizes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
    return a < b;
  });
  while (allocated < total) {
    bool progressed = false;
    for (const std::size_t g : order) {
      if (allocated == total) break;
      if (take[g] < group_sizes[g]) {
        take[g]++;
        allocated++;
        progressed = true;
      }
    }
    if (!progressed) break;  // every group saturated
  }

  // Minimum one draw per non-empty group when the budget covers them all.
  std::size_t nonempty = 0;
  for (const std::size_t s : group_sizes) nonempty += (s > 0);
  if (total >= nonempty) {
    for (std::size_t g = 0; g < take.size(); ++g) {
      if (group_sizes[g] == 0 || take[g] > 0) continue;
      // Move one draw from the largest taker that can spare it.
      std::size_t donor = take.size();
      for (std::size_t d = 0; d < take.size(); ++d) {
        if (take[d] >= 2 && (donor == take.size() || take[d] > take[donor])) {
          donor = d;
        }
      }
      if (donor == take.size()) break;
      take[donor]--;
      take[g]++;
    }
  }
  return take;
}

}  // namespace

ConsensusCurve run_consensus(const AnalysisDataset& dataset,
                             const ConsensusConfig& config,
                             const ClusterConfig& cluster_template,
                             std::vector<ConsensusRun>* run_log,
                             std::vector<ConsensusMatrix>* matrices) {
  config.validate();
  ClusterConfig probe = cluster_template;
  probe.k = config.k_min;
  probe.validate();

  const std::size_t n = dataset.points.size();
  if (n < static_cast<std::size_t>(config.k_max)) {
    throw DomainError("k_max=" + std::to_string(config.k_max) +
                      " exceeds the number of points (" + std::to_string(n) +
                      ")");
  }

  // Canonical point order: the scan must not depend on how the input rows
  // happened to be ordered.
  std::vector<std::size_t> original_index(n);
  std::iota(original_index.begin(), original_index.end(), std::size_t{0});
  std::stable_sort(original_index.begin(), original_index.end(),
                   [&](std::size_t a, std::size_t b) {
                     const LabeledPoint& pa = dataset.points[a];
                     const LabeledPoint& pb = dataset.points[b];
                     return std::tie(pa.feature, pa.label, pa.period, pa.weight) <
                            std::tie(pb.feature, pb.label, pb.period, pb.weight);
                   });
  std::vector<LabeledPoint> canonical(n);
  for (std::size_t r = 0; r < n; ++r) {
    canonical[r] = dataset.points[original_index[r]];
  }

  // Label strata, in canonical order.
  std::vector<std::vector<std::size_t>> strata(2);
  for (std::size_t r = 0; r < n; ++r) {
    strata[static_cast<std::size_t>(canonical[r].label)].push_back(r);
  }
  const std::vector<std::size_t> group_sizes{strata[0].size(), strata[1].size()};

  const double exact_size = config.fraction * static_cast<double>(n);
  const auto sample_size = static_cast<std::size_t>(
      std::min(static_cast<double>(n), std::ceil(exact_size - 1e-9)));
  if (sample_size < 2) {
    throw DomainError("subsample of " + std::to_string(sample_size) +
                      " points cannot score pair stability");
  }
  const std::vector<std::size_t> take = allocate_strata(group_sizes, sample_size);

  // The same subsample sequence is reused for every candidate k so the
  // candidates are scored on identical draws.
  std::vector<std::vector<std::size_t>> samples;
  samples.reserve(static_cast<std::size_t>(config.resamples));
  for (int run = 0; run < config.resamples; ++run) {
    Rng rng(config.seed + static_cast<uint64_t>(run));
    std::vector<std::size_t> sample;
    sample.reserve(sample_size);
    for (std::size_t g = 0; g < strata.size(); ++g) {
      std::vector<std::size_t> pool = strata[g];
      for (std::size_t t = 0; t < take[g]; ++t) {
        const std::size_t pick =
            t + static_cast<std::size_t>(rng.below(pool.size() - t));
        std::swap(pool[t], pool[pick]);
        sample.push_back(pool[t]);
      }
    }
    std::sort(sample.begin(), sample.end());
    samples.push_back(std::move(sample));
  }

  ConsensusCurve curve;
  for (int k = config.k_min; k <= config.k_max; ++k) {
    ConsensusMatrix matrix(n);
    ClusterConfig run_config = cluster_template;
    run_config.k = k;
    for (int run = 0; run < config.resamples; ++run) {
      const std::vector<std::size_t>& sample =
          samples[static_cast<std::size_t>(run)];
      AnalysisDataset sub;
      sub.mode = dataset.mode;
      sub.granularity = dataset.granularity;
      sub.vehicle = dataset.vehicle;
      sub.daytime = dataset.daytime;
      sub.points.reserve(sample.size());
      for (const std::size_t r : sample) sub.points.push_back(canonical[r]);

      const ClusterModel model = fit(sub, run_config);

      std::vector<std::size_t> original(sample.size());
      for (std::size_t p = 0; p < sample.size(); ++p) {
        original[p] = original_index[sample[p]];
      }
      matrix.add_run(original, model.assignment);
      if (run_log) {
        ConsensusRun record;
        record.k = k;
        record.run_index = run;
        record.subsample_seed = config.seed + static_cast<uint64_t>(run);
        record.sample = original;
        record.assignment = model.assignment;
        run_log->push_back(std::move(record));
      }
    }

    ConsensusEntry entry;
    entry.k = k;
    entry.undefined_pairs = matrix.undefined_pairs();
    entry.area = cdf_area(matrix.entries());
    if (curve.entries.empty()) {
      entry.delta = entry.area;
    } else {
      const double previous = curve.entries.back().area;
      entry.delta =
          previous > 0.0 ? (entry.area - previous) / previous : entry.area;
    }
    curve.entries.push_back(entry);
    if (matrices) matrices->push_back(std::move(matrix));
  }

  curve.chosen_k = select_model_order(curve.entries, config.flatness_threshold);
  return curve;
}

void write_consensus_csv(std::ostream& out, const ConsensusCurve& curve) {
  out << "k,area,delta,chosen\n";
  for (const ConsensusEntry& entry : curve.entries) {
    out << entry.k << ',' << detail::format_double(entry.area) << ','
        << detail::format_double(entry.delta) << ','
        << (entry.k == curve.chosen_k ? 1 : 0) << '\n';
  }
}

void write_consensus_json(std::ostream& out, const ConsensusCurve& curve) {
  nlohmann::ordered_json j;
  j["chosen_k"] = curve.chosen_k;
  auto entries = nlohmann::ordered_json::array();
  for (const ConsensusEntry& entry : curve.entries) {
    entries.push_back({{"k", entry.k},
                       {"area", entry.area},
                       {"delta", entry.delta},
                       {"undefined_pairs", entry.undefined_pairs}});
  }
  j["entries"] = entries;
  out << j.dump(2) << '\n';
}

void write_run_log_jsonl(std::ostream& out, const std::vector<ConsensusRun>& runs) {
  for (const ConsensusRun& run : runs) {
    nlohmann::ordered_json j;
    j["k"] = run.k;
    j["run"] = run.run_index;
    j["subsample_seed"] = run.subsample_seed;
    j["sample"] = run.sample;
    j["assignment"] = run.assignment;
    out << j.dump() << '\n';
  }
}

}  // namespace micromob
