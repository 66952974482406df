#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace micromob {

enum class RankSumMethod {
  automatic,      ///< exact for small tie-free-across-samples inputs
  exact,          ///< force the permutation distribution
  normal_approx,  ///< force the tie-corrected normal approximation
};

struct RankSumResult {
  double u = 0.0;  ///< Mann-Whitney U of the first sample
  double w = 0.0;  ///< rank sum of the first sample
  double z = 0.0;  ///< standardized statistic; NaN under the exact method
  double p_two_sided = 1.0;
  std::string method;  ///< "exact" or "normal_approx"
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  bool expansion_capped = false;  ///< weighted input was too big to expand
};

/// Mid-ranks (1-based, ties averaged) aligned with the input order.
/// Throws DomainError on non-finite values.
std::vector<double> rank_with_ties(const std::vector<double>& values);

/// Two-sided rank-sum test of identical distributions. The automatic method
/// uses the exact permutation distribution when n1 + n2 <= 20 and no tie
/// group spans both samples, and the tie-corrected normal approximation with
/// continuity correction otherwise. Throws DomainError on empty samples.
RankSumResult ranksum_test(const std::vector<double>& x,
                           const std::vector<double>& y,
                           RankSumMethod method = RankSumMethod::automatic);

/// Rank-sum test over weighted observations, where a weight counts how many
/// identical observations a value stands for. Weights must be positive
/// near-integers. Inputs whose total count exceeds expansion_cap are scored
/// without materializing the expansion, always via the normal approximation,
/// and flagged expansion_capped.
RankSumResult ranksum_test_weighted(const std::vector<double>& x_values,
                                    const std::vector<double>& x_weights,
                                    const std::vector<double>& y_values,
                                    const std::vector<double>& y_weights,
                                    double expansion_cap = 1e6);

}  // namespace micromob
