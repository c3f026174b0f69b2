#include "core/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "core/error.hpp"

namespace curriculum {

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    // positions i..j-1 (0-based) share rank mean(i+1..j)
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = r;
    i = j;
  }
  return ranks;
}

double mean(std::span<const double> v) noexcept {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(Errc::dimension_mismatch, "pearson: length mismatch");
  const double ma = mean(a);
  const double mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa <= 0.0 || sbb <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

double correlation_t_pvalue(double rho, std::size_t n) {
  if (n < 3) return 1.0;
  if (std::abs(rho) >= 1.0) return 0.0;
  const double df = static_cast<double>(n - 2);
  const double t = rho * std::sqrt(df / (1.0 - rho * rho));
  const boost::math::students_t dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
}

namespace {

// Fraction of the n! pairings of rb against ra whose |rho| reaches the
// observed one. Works on centered ranks, where rho ∝ Σ ca_i cb_π(i).
double permutation_pvalue(const std::vector<double>& ra, const std::vector<double>& rb, double rho) {
  const std::size_t n = ra.size();
  std::vector<double> ca(n), cb(n);
  const double ma = mean(ra), mb = mean(rb);
  double saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ca[i] = ra[i] - ma;
    cb[i] = rb[i] - mb;
    saa += ca[i] * ca[i];
    sbb += cb[i] * cb[i];
  }
  const double scale = std::sqrt(saa * sbb);
  const double threshold = std::abs(rho) * scale - 1e-9 * scale;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t hits = 0, total = 0;
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += ca[i] * cb[perm[i]];
    if (std::abs(s) >= threshold) ++hits;
    ++total;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace

SpearmanResult spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(Errc::dimension_mismatch, "spearman: length mismatch");
  if (a.size() < 3) {
    throw Error(Errc::too_few_shared_tasks, "spearman: need at least 3 shared tasks, have " + std::to_string(a.size()));
  }
  SpearmanResult r;
  r.n = a.size();
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double rho = pearson(ra, rb);
  if (std::isnan(rho)) {
    r.degenerate = true;
    return r;
  }
  r.rho = rho;
  if (r.n <= kExactPermutationMax) {
    r.p = permutation_pvalue(ra, rb, rho);
    r.exact_p = true;
  } else {
    r.p = correlation_t_pvalue(rho, r.n);
  }
  return r;
}

}  // namespace curriculum
