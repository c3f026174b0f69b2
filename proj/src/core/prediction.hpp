#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "core/fvec.hpp"
#include "core/geometry.hpp"
#include "core/trajectory.hpp"

namespace curriculum {

struct KernelConfig {
  double sigma_k = 1.0;
  double lambda = 1e-3;
  std::string extraction;  // empty: any
  std::optional<int> layer;
};

struct KrrFit {
  Eigen::MatrixXd A;        // rows = basis tasks, columns = steps
  double lambda_used = 0.0;
  int jitter_retries = 0;
  double residual_inf = 0.0;  // ||(K + lambda_used I) A - Y||_inf
};

inline constexpr int kMaxJitterRetries = 3;

/// Solves (K + lambda I) A = Y by Cholesky with one refinement step. If the
/// factorization fails or the residual exceeds 1e-8 (1 + ||Y||_inf), lambda
/// is multiplied by 10 up to three times. Throws solve_failure.
KrrFit fit_krr(const Eigen::MatrixXd& K, const Eigen::MatrixXd& Y, double lambda);

struct TrajectoryPrediction {
  std::vector<double> raw;
  std::vector<double> clipped;  // raw clamped to [0, 1]
};

/// Throws dimension_mismatch.
TrajectoryPrediction predict_trajectory(const Eigen::VectorXd& k_c, const Eigen::MatrixXd& A);

enum class BasisCondition { all_tasks, simple_only };
std::string_view basis_condition_name(BasisCondition c) noexcept;
BasisCondition parse_basis_condition(std::string_view s);

struct PredictionReport {
  std::string model_id;
  std::string held_out_task_id;
  BasisCondition condition = BasisCondition::all_tasks;
  KernelConfig config;
  double lambda_used = 0.0;
  std::vector<double> grid;
  std::vector<double> truth;  // smoothed
  TrajectoryPrediction predicted;
  double r2 = 0.0;  // squared Pearson correlation of raw prediction and truth
  bool r2_degenerate = false;
  double mae = 0.0;
  double mae_clipped = 0.0;
  std::vector<std::string> basis_task_ids;
};

struct SkippedTask {
  std::string task_id;
  std::string reason;
};

struct LooSummary {
  std::string model_id;
  BasisCondition condition = BasisCondition::all_tasks;
  KernelConfig config;
  std::vector<PredictionReport> reports;
  std::vector<SkippedTask> skipped;
  double mean_r2 = 0.0;
  double mean_mae = 0.0;
  double mean_mae_clipped = 0.0;
};

struct LooOptions {
  KernelConfig config;
  BasisCondition condition = BasisCondition::all_tasks;
  double smooth_sigma = kDefaultSmoothSigma;
  double epsilon = kDefaultVarianceEpsilon;
  /// Held-out tasks. Empty: every composite of the model. Listed tasks
  /// without an FV raise missing_fv instead of being skipped.
  std::vector<std::string> targets;
};

using TaskFvMap = std::map<std::string, Vec, std::less<>>;

/// Task-level FVs of one model: per-prompt vectors are ignored, and of
/// several matching files the latest checkpoint wins.
TaskFvMap select_task_fvs(std::span<const FunctionVector> fvs, std::string_view model_id,
                          std::string_view extraction = {}, std::optional<int> layer = std::nullopt);

/// Throws empty_basis, missing_fv.
LooSummary loo_evaluate(const TrajectoryStore& store, std::string_view model_id, const TaskFvMap& fvs,
                        const LooOptions& options);

/// One held-out task against an explicit basis (used by the duplicate-task
/// check and by loo_evaluate).
PredictionReport predict_held_out(const TrajectoryStore& store, std::string_view model_id, const TaskFvMap& fvs,
                                  std::string_view held_out, std::span<const std::string> basis_candidates,
                                  const LooOptions& options);

struct TuningResult {
  KernelConfig best;
  double best_mae = 0.0;
  struct Entry {
    double sigma_k, lambda, mean_mae;
  };
  std::vector<Entry> grid;
};

std::vector<double> default_sigma_grid();
std::vector<double> default_lambda_grid();

/// Grid search minimizing mean LOO MAE over the elemental tasks with an
/// elemental-only basis; composites never enter the search.
TuningResult tune_kernel(const TrajectoryStore& store, std::string_view model_id, const TaskFvMap& fvs,
                         std::span<const double> sigmas, std::span<const double> lambdas,
                         const KernelConfig& base = {});

}  // namespace curriculum
