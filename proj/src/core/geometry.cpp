#include "core/geometry.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "core/error.hpp"
#include "core/rng.hpp"

namespace curriculum {

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void require_same_dim(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(Errc::dimension_mismatch,
                "vector dimensions differ: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

void require_sigma(double sigma_k) {
  if (!(sigma_k > 0.0) || !std::isfinite(sigma_k)) throw Error(Errc::invalid_argument, "sigma_k must be > 0");
}

}  // namespace

Vec unit_normalize(std::span<const double> v) {
  const double n = norm2(v);
  if (!(n > 0.0)) throw Error(Errc::zero_vector, "cannot normalize a zero vector");
  Vec out(v.begin(), v.end());
  for (double& x : out) x /= n;
  return out;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  require_same_dim(a, b);
  const double na = norm2(a);
  const double nb = norm2(b);
  if (!(na > 0.0) || !(nb > 0.0)) throw Error(Errc::zero_vector, "cosine of a zero vector");
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

double rbf_kernel_raw(std::span<const double> a, std::span<const double> b, double sigma_k) {
  require_same_dim(a, b);
  require_sigma(sigma_k);
  return std::exp(-sq_dist(a, b) / (2.0 * sigma_k * sigma_k));
}

double rbf_kernel(std::span<const double> a, std::span<const double> b, double sigma_k) {
  require_same_dim(a, b);
  return rbf_kernel_raw(unit_normalize(a), unit_normalize(b), sigma_k);
}

Eigen::MatrixXd kernel_matrix(std::span<const Vec> vectors, double sigma_k) {
  require_sigma(sigma_k);
  std::vector<Vec> unit;
  unit.reserve(vectors.size());
  for (const auto& v : vectors) {
    if (!vectors.empty()) require_same_dim(v, vectors.front());
    unit.push_back(unit_normalize(v));
  }
  const auto n = static_cast<Eigen::Index>(unit.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = rbf_kernel_raw(unit[static_cast<std::size_t>(i)], unit[static_cast<std::size_t>(j)], sigma_k);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

Eigen::VectorXd kernel_vector(std::span<const double> query, std::span<const Vec> basis, double sigma_k) {
  require_sigma(sigma_k);
  const Vec q = unit_normalize(query);
  Eigen::VectorXd k(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    require_same_dim(q, basis[i]);
    k(static_cast<Eigen::Index>(i)) = rbf_kernel_raw(q, unit_normalize(basis[i]), sigma_k);
  }
  return k;
}

Vec mean_vector(std::span<const Vec> vectors) {
  if (vectors.empty()) throw Error(Errc::invalid_argument, "mean of an empty vector set");
  Vec m(vectors.front().size(), 0.0);
  for (const auto& v : vectors) {
    require_same_dim(v, m);
    for (std::size_t i = 0; i < m.size(); ++i) m[i] += v[i];
  }
  for (double& x : m) x /= static_cast<double>(vectors.size());
  return m;
}

double split_half_cosine(std::span<const Vec> prompts, std::span<const std::size_t> half_a,
                         std::span<const std::size_t> half_b) {
  std::vector<Vec> a, b;
  for (auto i : half_a) a.push_back(prompts[i]);
  for (auto i : half_b) b.push_back(prompts[i]);
  return cosine_similarity(mean_vector(a), mean_vector(b));
}

double split_half_consistency(std::span<const Vec> prompts, std::uint64_t seed, std::size_t n_splits) {
  if (prompts.size() < 4) {
    throw Error(Errc::too_few_prompts,
                "split-half consistency needs at least 4 prompt vectors, have " + std::to_string(prompts.size()));
  }
  if (n_splits == 0) throw Error(Errc::invalid_argument, "n_splits must be >= 1");
  const std::size_t half = prompts.size() / 2;
  std::vector<std::size_t> idx(prompts.size());
  Rng rng(seed);
  double sum = 0.0;
  for (std::size_t s = 0; s < n_splits; ++s) {
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(std::span<std::size_t>(idx));
    sum += split_half_cosine(prompts, std::span<const std::size_t>(idx).subspan(0, half),
                             std::span<const std::size_t>(idx).subspan(half, half));
  }
  return sum / static_cast<double>(n_splits);
}

double discriminability(std::span<const std::vector<Vec>> task_sets) {
  if (task_sets.size() < 2) throw Error(Errc::invalid_argument, "discriminability needs at least 2 tasks");
  double within = 0.0;
  std::size_t within_n = 0;
  std::vector<Vec> means;
  for (const auto& set : task_sets) {
    if (set.size() < 2) throw Error(Errc::too_few_prompts, "discriminability needs >= 2 vectors per task");
    for (std::size_t i = 0; i < set.size(); ++i) {
      for (std::size_t j = i + 1; j < set.size(); ++j) {
        within += cosine_similarity(set[i], set[j]);
        ++within_n;
      }
    }
    means.push_back(mean_vector(set));
  }
  double between = 0.0;
  std::size_t between_n = 0;
  for (std::size_t i = 0; i < means.size(); ++i) {
    for (std::size_t j = i + 1; j < means.size(); ++j) {
      between += cosine_similarity(means[i], means[j]);
      ++between_n;
    }
  }
  within /= static_cast<double>(within_n);
  between /= static_cast<double>(between_n);
  if (between <= 0.0) return std::numeric_limits<double>::infinity();
  return within / between;
}

Reconstruction composition_reconstruction(std::span<const double> composite, std::span<const Vec> components) {
  if (components.empty()) throw Error(Errc::invalid_argument, "reconstruction needs at least one component");
  const auto d = static_cast<Eigen::Index>(composite.size());
  const auto m = static_cast<Eigen::Index>(components.size());
  Eigen::MatrixXd u(d, m);
  for (Eigen::Index j = 0; j < m; ++j) {
    require_same_dim(composite, components[static_cast<std::size_t>(j)]);
    for (Eigen::Index i = 0; i < d; ++i) u(i, j) = components[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
  }
  const Eigen::Map<const Eigen::VectorXd> v(composite.data(), d);
  // Normal equations (U^T U) w = U^T v, minimum-norm on rank deficiency.
  const Eigen::MatrixXd gram = u.transpose() * u;
  const Eigen::VectorXd rhs = u.transpose() * v;
  const Eigen::VectorXd w = gram.completeOrthogonalDecomposition().solve(rhs);
  const Eigen::VectorXd fit = u * w;
  Reconstruction r;
  r.weights.assign(w.data(), w.data() + w.size());
  const double nf = fit.norm();
  const double nv = v.norm();
  if (!(nv > 0.0) || !(nf > 1e-12 * nv)) return r;
  r.cosine = std::clamp(fit.dot(v) / (nf * nv), -1.0, 1.0);
  return r;
}

}  // namespace curriculum
