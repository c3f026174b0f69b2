#pragma once

#include <span>
#include <vector>

namespace curriculum {

/// 1-based ranks; tied values share the mean of the positions they occupy.
std::vector<double> average_ranks(std::span<const double> values);

/// NaN when either input has zero variance.
double pearson(std::span<const double> a, std::span<const double> b);

struct SpearmanResult {
  double rho = 0.0;
  double p = 1.0;
  std::size_t n = 0;
  bool degenerate = false;  // a ranking with no spread: rho reported 0, p 1
  bool exact_p = false;     // permutation p-value (n <= kExactPermutationMax)
};

inline constexpr std::size_t kExactPermutationMax = 10;

/// Paired samples; throws too_few_shared_tasks below 3 pairs.
SpearmanResult spearman(std::span<const double> a, std::span<const double> b);

/// Two-sided p for a correlation under the t approximation with n - 2 df.
double correlation_t_pvalue(double rho, std::size_t n);

double mean(std::span<const double> v) noexcept;

}  // namespace curriculum
