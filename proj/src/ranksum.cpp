#include "micromob/ranksum.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "micromob/errors.hpp"

namespace micromob {

namespace {

void check_finite(const std::vector<double>& values, const char* which) {
  for (const double v : values) {
    if (!std::isfinite(v)) {
      throw DomainError(std::string("non-finite value in ") + which +
                        " sample");
    }
  }
}

// Pooled mid-rank bookkeeping for two samples.
struct Pooled {
  double w1 = 0.0;            // rank sum of sample 0
  std::vector<int> doubled;   // doubled mid-rank of every pooled value
  bool cross_sample_ties = false;
  long double tie_term = 0.0L;  // sum of t^3 - t over tie groups
};

Pooled pool_ranks(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<std::pair<double, int>> pooled;
  pooled.reserve(x.size() + y.size());
  for (const double v : x) pooled.emplace_back(v, 0);
  for (const double v : y) pooled.emplace_back(v, 1);
  std::sort(pooled.begin(), pooled.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  Pooled out;
  out.doubled.resize(pooled.size());
  std::size_t a = 0;
  while (a < pooled.size()) {
    std::size_t b = a;
    while (b < pooled.size() && pooled[b].first == pooled[a].first) ++b;
    const std::size_t t = b - a;
    // 1-based positions a+1 .. b share the mid-rank (a+1+b)/2.
    const double midrank = static_cast<double>(a + 1 + b) / 2.0;
    const int doubled = static_cast<int>(a + 1 + b);
    bool has_x = false, has_y = false;
    for (std::size_t i = a; i < b; ++i) {
      out.doubled[i] = doubled;
      if (pooled[i].second == 0) {
        out.w1 += midrank;
        has_x = true;
      } else {
        has_y = true;
      }
    }
    if (t > 1) {
      const auto td = static_cast<long double>(t);
      out.tie_term += td * td * td - td;
      if (has_x && has_y) out.cross_sample_ties = true;
    }
    a = b;
  }
  return out;
}

// Tie-corrected normal approximation with continuity correction.
void normal_branch(double u1, double n1, double n2, long double tie_term,
                   RankSumResult& result) {
  result.method = "normal_approx";
  result.z = 0.0;
  result.p_two_sided = 1.0;
  const double n = n1 + n2;
  const long double correction =
      tie_term / (static_cast<long double>(n) * (n - 1.0));
  const long double sigma2 = static_cast<long double>(n1) * n2 / 12.0L *
                             (static_cast<long double>(n) + 1.0L - correction);
  if (sigma2 <= 0.0L) return;  // every pooled value identical
  const double mu = n1 * n2 / 2.0;
  const double d = u1 - mu;
  if (std::fabs(d) <= 0.5) return;
  const double shrunk = d > 0.0 ? d - 0.5 : d + 0.5;
  result.z = shrunk / static_cast<double>(std::sqrt(sigma2));
  const double p = std::erfc(std::fabs(result.z) / std::sqrt(2.0));
  result.p_two_sided = std::max(p, DBL_MIN);
}

void exact_branch(double w1, std::size_t n1, const std::vector<int>& doubled,
                  RankSumResult& result) {
  result.method = "exact";
  result.z = std::numeric_limits<double>::quiet_NaN();
  const std::size_t n = doubled.size();
  const int max_sum = std::accumulate(doubled.begin(), doubled.end(), 0);

  // dp[j][s]: subsets of size j of the processed ranks with doubled sum s.
  std::vector<std::vector<long double>> dp(
      n1 + 1, std::vector<long double>(static_cast<std::size_t>(max_sum) + 1,
                                       0.0L));
  dp[0][0] = 1.0L;
  std::size_t processed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const int r = doubled[i];
    ++processed;
    const std::size_t j_top = std::min(processed, n1);
    for (std::size_t j = j_top; j >= 1; --j) {
      for (int s = max_sum; s >= r; --s) {
        const long double ways = dp[j - 1][static_cast<std::size_t>(s - r)];
        if (ways != 0.0L) dp[j][static_cast<std::size_t>(s)] += ways;
      }
    }
  }

  const auto observed = static_cast<int>(std::llround(2.0 * w1));
  long double below = 0.0L, above = 0.0L, total = 0.0L;
  for (int s = 0; s <= max_sum; ++s) {
    const long double ways = dp[n1][static_cast<std::size_t>(s)];
    total += ways;
    if (s <= observed) below += ways;
    if (s >= observed) above += ways;
  }
  const long double tail = std::min(below, above);
  result.p_two_sided =
      static_cast<double>(std::min(1.0L, 2.0L * tail / total));
}

double round_weight(double w, const char* which) {
  const double rounded = std::nearbyint(w);
  if (!std::isfinite(w) || rounded < 1.0 || std::fabs(w - rounded) > 1e-9) {
    throw DomainError(std::string("weights in the ") + which +
                      " sample must be positive whole counts");
  }
  return rounded;
}

}  // namespace

std::vector<double> rank_with_ties(const std::vector<double>& values) {
  check_finite(values, "ranked");
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(values.size(), 0.0);
  std::size_t a = 0;
  while (a < order.size()) {
    std::size_t b = a;
    while (b < order.size() && values[order[b]] == values[order[a]]) ++b;
    const double midrank = static_cast<double>(a + 1 + b) / 2.0;
    for (std::size_t i = a; i < b; ++i) ranks[order[i]] = midrank;
    a = b;
  }
  return ranks;
}

RankSumResult ranksum_test(const std::vector<double>& x,
                           const std::vector<double>& y,
                           RankSumMethod method) {
  if (x.empty() || y.empty()) {
    throw DomainError("rank-sum test needs a non-empty sample on each side");
  }
  check_finite(x, "first");
  check_finite(y, "second");

  const std::size_t n1 = x.size();
  const std::size_t n2 = y.size();
  const Pooled pooled = pool_ranks(x, y);

  RankSumResult result;
  result.n1 = n1;
  result.n2 = n2;
  result.w = pooled.w1;
  result.u =
      pooled.w1 - static_cast<double>(n1) * (static_cast<double>(n1) + 1.0) / 2.0;

  bool exact = false;
  switch (method) {
    case RankSumMethod::exact:
      exact = true;
      break;
    case RankSumMethod::normal_approx:
      exact = false;
      break;
    case RankSumMethod::automatic:
      exact = (n1 + n2 <= 20) && !pooled.cross_sample_ties;
      break;
  }
  if (exact) {
    exact_branch(pooled.w1, n1, pooled.doubled, result);
  } else {
    normal_branch(result.u, static_cast<double>(n1), static_cast<double>(n2),
                  pooled.tie_term, result);
  }
  return result;
}

RankSumResult ranksum_test_weighted(const std::vector<double>& x_values,
                                    const std::vector<double>& x_weights,
                                    const std::vector<double>& y_values,
                                    const std::vector<double>& y_weights,
                                    double expansion_cap) {
  if (x_values.size() != x_weights.size() ||
      y_values.size() != y_weights.size()) {
    throw DomainError("values and weights must be the same length");
  }
  if (x_values.empty() || y_values.empty()) {
    throw DomainError("rank-sum test needs a non-empty sample on each side");
  }
  check_finite(x_values, "first");
  check_finite(y_values, "second");

  double total = 0.0;
  for (const double w : x_weights) total += round_weight(w, "first");
  for (const double w : y_weights) total += round_weight(w, "second");

  if (total <= expansion_cap) {
    std::vector<double> ex, ey;
    ex.reserve(static_cast<std::size_t>(total));
    for (std::size_t i = 0; i < x_values.size(); ++i) {
      const auto reps = static_cast<std::size_t>(
          std::llround(round_weight(x_weights[i], "first")));
      ex.insert(ex.end(), reps, x_values[i]);
    }
    for (std::size_t i = 0; i < y_values.size(); ++i) {
      const auto reps = static_cast<std::size_t>(
          std::llround(round_weight(y_weights[i], "second")));
      ey.insert(ey.end(), reps, y_values[i]);
    }
    return ranksum_test(ex, ey);
  }

  // Too many implied observations to materialize: rank the distinct values
  // with multiplicities instead. Statistics are identical to the expanded
  // computation; only the normal approximation applies at this size.
  std::vector<std::tuple<double, double, double>> merged;  // value, cx, cy
  {
    std::vector<std::tuple<double, int, double>> raw;  // value, side, count
    raw.reserve(x_values.size() + y_values.size());
    for (std::size_t i = 0; i < x_values.size(); ++i) {
      raw.emplace_back(x_values[i], 0, round_weight(x_weights[i], "first"));
    }
    for (std::size_t i = 0; i < y_values.size(); ++i) {
      raw.emplace_back(y_values[i], 1, round_weight(y_weights[i], "second"));
    }
    std::sort(raw.begin(), raw.end(),
              [](const auto& a, const auto& b) {
                return std::get<0>(a) < std::get<0>(b);
              });
    for (const auto& [value, side, count] : raw) {
      if (merged.empty() || std::get<0>(merged.back()) != value) {
        merged.emplace_back(value, 0.0, 0.0);
      }
      if (side == 0) {
        std::get<1>(merged.back()) += count;
      } else {
        std::get<2>(merged.back()) += count;
      }
    }
  }

  double n1 = 0.0, n2 = 0.0, w1 = 0.0, cumulative = 0.0;
  long double tie_term = 0.0L;
  for (const auto& [value, cx, cy] : merged) {
    const double t = cx + cy;
    const double midrank = cumulative + (t + 1.0) / 2.0;
    w1 += cx * midrank;
    if (t > 1.0) {
      const auto td = static_cast<long double>(t);
      tie_term += td * td * td - td;
    }
    cumulative += t;
    n1 += cx;
    n2 += cy;
  }

  RankSumResult result;
  result.n1 = static_cast<std::size_t>(std::llround(n1));
  result.n2 = static_cast<std::size_t>(std::llround(n2));
  result.w = w1;
  result.u = w1 - n1 * (n1 + 1.0) / 2.0;
  result.expansion_capped = true;
  normal_branch(result.u, n1, n2, tie_term, result);
  return result;
}

}  // namespace micromob
