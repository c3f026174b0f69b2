#include "core/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/error.hpp"
#include "core/log.hpp"
#include "core/stats.hpp"
#include "core/task_suite.hpp"

namespace curriculum {

KrrFit fit_krr(const Eigen::MatrixXd& K, const Eigen::MatrixXd& Y, double lambda) {
  if (K.rows() != K.cols()) throw Error(Errc::dimension_mismatch, "fit_krr: kernel matrix is not square");
  if (K.rows() != Y.rows()) throw Error(Errc::dimension_mismatch, "fit_krr: Y rows do not match kernel size");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw Error(Errc::invalid_argument, "fit_krr: lambda must be > 0");
  if (!K.allFinite() || !Y.allFinite()) throw Error(Errc::solve_failure, "fit_krr: non-finite input");
  const auto n = K.rows();
  const double y_inf = Y.size() ? Y.cwiseAbs().maxCoeff() : 0.0;
  const double tol = 1e-8 * (1.0 + y_inf);
  double lam = lambda;
  for (int attempt = 0; attempt <= kMaxJitterRetries; ++attempt) {
    if (attempt > 0) {
      lam *= 10.0;
      log::warn("fit_krr: retrying with lambda ", lam, " (attempt ", attempt, ")");
    }
    const Eigen::MatrixXd M = K + lam * Eigen::MatrixXd::Identity(n, n);
    const Eigen::LLT<Eigen::MatrixXd> llt(M);
    if (llt.info() != Eigen::Success) continue;
    Eigen::MatrixXd A = llt.solve(Y);
    A += llt.solve(Y - M * A);
    if (!A.allFinite()) continue;
    const double res = A.size() ? (M * A - Y).cwiseAbs().maxCoeff() : 0.0;
    if (res <= tol) return {std::move(A), lam, attempt, res};
  }
  throw Error(Errc::solve_failure, "fit_krr: Cholesky solve failed after lambda jitter");
}

TrajectoryPrediction predict_trajectory(const Eigen::VectorXd& k_c, const Eigen::MatrixXd& A) {
  if (k_c.size() != A.rows()) {
    throw Error(Errc::dimension_mismatch, "predict_trajectory: |k_c| = " + std::to_string(k_c.size()) +
                                              " but A has " + std::to_string(A.rows()) + " rows");
  }
  const Eigen::VectorXd p = A.transpose() * k_c;
  TrajectoryPrediction out;
  out.raw.assign(p.data(), p.data() + p.size());
  out.clipped = out.raw;
  for (double& v : out.clipped) v = std::clamp(v, 0.0, 1.0);
  return out;
}

std::string_view basis_condition_name(BasisCondition c) noexcept {
  return c == BasisCondition::all_tasks ? "all_tasks" : "simple_only";
}

BasisCondition parse_basis_condition(std::string_view s) {
  if (s == "all" || s == "all_tasks") return BasisCondition::all_tasks;
  if (s == "simple" || s == "simple_only") return BasisCondition::simple_only;
  throw Error(Errc::parse_error, "unknown basis condition '" + std::string(s) + "' (use all or simple)");
}

TaskFvMap select_task_fvs(std::span<const FunctionVector> fvs, std::string_view model_id, std::string_view extraction,
                          std::optional<int> layer) {
  TaskFvMap out;
  std::map<std::string, double, std::less<>> when;
  for (const auto& fv : fvs) {
    const auto& m = fv.meta;
    if (m.prompt_index || m.model_id != model_id) continue;
    if (!extraction.empty() && m.extraction != extraction) continue;
    if (layer && m.layer != *layer) continue;
    const auto it = when.find(m.task_id);
    if (it == when.end() || m.checkpoint_tokens_b >= it->second) {
      when[m.task_id] = m.checkpoint_tokens_b;
      out[m.task_id] = fv.as_double();
    }
  }
  return out;
}

namespace {

double mean_abs_error(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return a.empty() ? 0.0 : s / static_cast<double>(a.size());
}

}  // namespace

PredictionReport predict_held_out(const TrajectoryStore& store, std::string_view model_id, const TaskFvMap& fvs,
                                  std::string_view held_out, std::span<const std::string> basis_candidates,
                                  const LooOptions& o) {
  const auto fv_c = fvs.find(held_out);
  if (fv_c == fvs.end()) throw Error(Errc::missing_fv, "no function vector for " + std::string(held_out));
  const TrajectorySeries& target = store.series(model_id, held_out);

  PredictionReport rep;
  rep.model_id = std::string(model_id);
  rep.held_out_task_id = std::string(held_out);
  rep.condition = o.condition;
  rep.config = o.config;
  rep.grid = target.grid;
  rep.truth = smooth(target.values, o.smooth_sigma);

  std::vector<Vec> basis_fvs;
  std::vector<std::vector<double>> rows;
  for (const auto& t : basis_candidates) {
    if (t == held_out) continue;
    if (o.condition == BasisCondition::simple_only && is_composite_id(t)) continue;
    const auto fv = fvs.find(t);
    if (fv == fvs.end() || !store.contains(model_id, t)) continue;
    const auto& s = store.series(model_id, t);
    if (s.grid.size() < 2) continue;
    auto y = smooth(interpolate(s.grid, s.values, rep.grid), o.smooth_sigma);
    if (!passes_variance_filter(y, o.epsilon)) continue;
    basis_fvs.push_back(fv->second);
    rows.push_back(std::move(y));
    rep.basis_task_ids.push_back(t);
  }
  if (rows.empty()) {
    throw Error(Errc::empty_basis, "no basis task survives for " + std::string(held_out) + " under " +
                                       std::string(basis_condition_name(o.condition)));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto steps = static_cast<Eigen::Index>(rep.grid.size());
  Eigen::MatrixXd Y(n, steps);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < steps; ++j) Y(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  }
  const Eigen::MatrixXd K = kernel_matrix(basis_fvs, o.config.sigma_k);
  const Eigen::VectorXd k_c = kernel_vector(fv_c->second, basis_fvs, o.config.sigma_k);
  const KrrFit fit = fit_krr(K, Y, o.config.lambda);
  rep.lambda_used = fit.lambda_used;
  rep.predicted = predict_trajectory(k_c, fit.A);

  const double r = pearson(rep.predicted.raw, rep.truth);
  if (std::isnan(r)) {
    rep.r2 = 0.0;
    rep.r2_degenerate = true;
  } else {
    rep.r2 = r * r;
  }
  rep.mae = mean_abs_error(rep.predicted.raw, rep.truth);
  rep.mae_clipped = mean_abs_error(rep.predicted.clipped, rep.truth);
  return rep;
}

LooSummary loo_evaluate(const TrajectoryStore& store, std::string_view model_id, const TaskFvMap& fvs,
                        const LooOptions& o) {
  LooSummary sum;
  sum.model_id = std::string(model_id);
  sum.condition = o.condition;
  sum.config = o.config;
  const auto tasks = store.tasks(model_id);
  if (tasks.empty()) throw Error(Errc::invalid_argument, "no trajectories for model " + std::string(model_id));

  const bool strict = !o.targets.empty();
  std::vector<std::string> targets = o.targets;
  if (!strict) {
    for (const auto& t : tasks) {
      if (is_composite_id(t)) targets.push_back(t);
    }
  }
  for (const auto& c : targets) {
    if (!store.contains(model_id, c)) {
      if (strict) throw Error(Errc::invalid_argument, "no trajectory for held-out task " + c);
      continue;
    }
    if (!fvs.count(c)) {
      if (strict) throw Error(Errc::missing_fv, "no function vector for held-out task " + c);
      sum.skipped.push_back({c, "missing_fv"});
      continue;
    }
    const auto& s = store.series(model_id, c);
    if (!passes_variance_filter(smooth(s.values, o.smooth_sigma), o.epsilon)) {
      sum.skipped.push_back({c, "low_variance"});
      continue;
    }
    sum.reports.push_back(predict_held_out(store, model_id, fvs, c, tasks, o));
  }
  if (!sum.reports.empty()) {
    double r2 = 0.0, mae = 0.0, maec = 0.0;
    for (const auto& r : sum.reports) {
      r2 += r.r2;
      mae += r.mae;
      maec += r.mae_clipped;
    }
    const auto n = static_cast<double>(sum.reports.size());
    sum.mean_r2 = r2 / n;
    sum.mean_mae = mae / n;
    sum.mean_mae_clipped = maec / n;
  }
  return sum;
}

std::vector<double> default_sigma_grid() { return {0.02, 0.05, 0.1, 0.2, 0.35, 0.5, 0.75, 1.0, 1.5, 2.0, 4.0}; }

std::vector<double> default_lambda_grid() { return {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1}; }

TuningResult tune_kernel(const TrajectoryStore& store, std::string_view model_id, const TaskFvMap& fvs,
                         std::span<const double> sigmas, std::span<const double> lambdas, const KernelConfig& base) {
  if (sigmas.empty() || lambdas.empty()) throw Error(Errc::invalid_argument, "tune_kernel: empty grid");
  std::vector<std::string> elementals;
  for (const auto& t : store.tasks(model_id)) {
    if (!is_composite_id(t) && fvs.count(t)) {
      const auto& s = store.series(model_id, t);
      if (passes_variance_filter(smooth(s.values))) elementals.push_back(t);
    }
  }
  if (elementals.size() < 2) throw Error(Errc::empty_basis, "tune_kernel: fewer than two usable elemental tasks");
  TuningResult res;
  res.best_mae = std::numeric_limits<double>::infinity();
  for (double sk : sigmas) {
    for (double lam : lambdas) {
      LooOptions o;
      o.config = base;
      o.config.sigma_k = sk;
      o.config.lambda = lam;
      o.condition = BasisCondition::simple_only;
      double total = 0.0;
      std::size_t n = 0;
      for (const auto& t : elementals) {
        try {
          total += predict_held_out(store, model_id, fvs, t, elementals, o).mae;
          ++n;
        } catch (const Error& e) {
          if (e.code() != Errc::empty_basis && e.code() != Errc::solve_failure) throw;
        }
      }
      const double m = n ? total / static_cast<double>(n) : std::numeric_limits<double>::infinity();
      res.grid.push_back({sk, lam, m});
      if (m < res.best_mae) {
        res.best_mae = m;
        res.best = o.config;
      }
    }
  }
  return res;
}

}  // namespace curriculum
