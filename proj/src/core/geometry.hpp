#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace curriculum {

using Vec = std::vector<double>;

/// Throws zero_vector.
Vec unit_normalize(std::span<const double> v);
/// Throws zero_vector or dimension_mismatch.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// exp(-||a - b||^2 / (2 sigma^2)) on the unit-normalized inputs.
double rbf_kernel(std::span<const double> a, std::span<const double> b, double sigma_k);
/// Same formula applied to the inputs as given.
double rbf_kernel_raw(std::span<const double> a, std::span<const double> b, double sigma_k);

/// Symmetric, unit-diagonal Gram matrix over unit-normalized vectors.
Eigen::MatrixXd kernel_matrix(std::span<const Vec> vectors, double sigma_k);
/// k_c: similarities of `query` to each basis vector.
Eigen::VectorXd kernel_vector(std::span<const double> query, std::span<const Vec> basis, double sigma_k);

Vec mean_vector(std::span<const Vec> vectors);

inline constexpr std::size_t kDefaultSplits = 16;

/// Mean over n_splits random balanced partitions of the cosine between the
/// two half means (odd counts leave one vector out). Throws too_few_prompts.
double split_half_consistency(std::span<const Vec> prompts, std::uint64_t seed, std::size_t n_splits = kDefaultSplits);
/// One explicit partition.
double split_half_cosine(std::span<const Vec> prompts, std::span<const std::size_t> half_a,
                         std::span<const std::size_t> half_b);

/// Mean within-task cosine (pooled over every within-task pair) divided by
/// the mean cosine between task means; +inf when that denominator is <= 0.
double discriminability(std::span<const std::vector<Vec>> task_sets);

struct Reconstruction {
  double cosine = 0.0;
  Vec weights;
};

/// Minimum-norm least squares fit of the composite on its components; the
/// score is the cosine between the fit and the composite (0 for a zero fit).
Reconstruction composition_reconstruction(std::span<const double> composite, std::span<const Vec> components);

}  // namespace curriculum
