#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "core/error.hpp"
#include "core/geometry.hpp"
#include "core/prediction.hpp"
#include "core/synthetic.hpp"
#include "core/trajectory.hpp"
#include "support/oracles.hpp"

using namespace curriculum;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::ok;
}

Eigen::MatrixXd random_gram(std::mt19937_64& g, int n, int d, double sigma) {
  std::normal_distribution<double> nd(0, 1);
  std::vector<Vec> vs(n, Vec(d));
  for (auto& v : vs) {
    for (auto& x : v) x = nd(g);
  }
  return kernel_matrix(vs, sigma);
}

oracle::Matrix to_rows(const Eigen::MatrixXd& m) {
  oracle::Matrix r(m.rows(), std::vector<double>(m.cols()));
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) r[i][j] = m(i, j);
  }
  return r;
}

struct World {
  SyntheticWorld world;
  TrajectoryStore store;
};

World make_world(std::uint64_t seed, double traj_noise = 0.0, double fv_noise = 0.0) {
  SyntheticParams p;
  p.seed = seed;
  p.traj_noise = traj_noise;
  p.fv_noise = fv_noise;
  World w{generate_world(p), {}};
  w.store.add_all(w.world.records);
  return w;
}

}  // namespace

TEST_CASE("krr: closed-form solves") {
  Eigen::MatrixXd K(1, 1), Y(1, 1);
  K << 1.0;
  Y << 0.7;
  const auto f = fit_krr(K, Y, 1e-4);
  CHECK(std::fabs(f.A(0, 0) - 0.7 / 1.0001) < 1e-15);
  CHECK(std::fabs(f.A(0, 0) - 0.69993) < 1e-5);
  Eigen::VectorXd kc(1);
  kc << 0.5;
  const auto p = predict_trajectory(kc, f.A);
  CHECK(std::fabs(p.raw[0] - 0.5 * 0.7 / 1.0001) < 1e-15);
  CHECK(std::fabs(p.raw[0] - 0.34997) < 1e-5);

  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(4, 4);
  const Eigen::MatrixXd Y4 = Eigen::MatrixXd::Random(4, 6);
  CHECK((fit_krr(I, Y4, 1.0).A - Y4 / 2).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(fit_krr(I, Eigen::MatrixXd::Zero(4, 6), 0.1).A.cwiseAbs().maxCoeff() == 0.0);

  const auto zero = predict_trajectory(Eigen::VectorXd::Zero(4), fit_krr(I, Y4, 0.5).A);
  for (double v : zero.raw) CHECK(v == 0.0);
  CHECK(code_of([&] { predict_trajectory(Eigen::VectorXd::Zero(3), Y4); }) == Errc::dimension_mismatch);
}

TEST_CASE("krr: agrees with Gaussian elimination and meets the residual bound") {
  std::mt19937_64 g(10);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 4 + trial;
    const auto K = random_gram(g, n, 8, 0.5 + 0.1 * trial);
    const Eigen::MatrixXd Y = (Eigen::MatrixXd::Random(n, 20).array() + 1.0) / 2.0;
    const double lambda = std::pow(10.0, -1 - (trial % 5));
    const auto f = fit_krr(K, Y, lambda);
    const Eigen::MatrixXd Kl = K + f.lambda_used * Eigen::MatrixXd::Identity(n, n);
    const double resid = (Kl * f.A - Y).cwiseAbs().maxCoeff();
    CHECK(resid <= 1e-8 * (1.0 + Y.cwiseAbs().maxCoeff()));
    const auto want = oracle::solve(to_rows(Kl), to_rows(Y));
    double scale = 0, diff = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < 20; ++j) {
        diff = std::max(diff, std::fabs(f.A(i, j) - want[i][j]));
        scale = std::max(scale, std::fabs(want[i][j]));
      }
    }
    CHECK(diff <= 1e-8 * (1.0 + scale));
  }
}

TEST_CASE("krr: near-zero ridge interpolates the basis") {
  std::mt19937_64 g(3);
  const int n = 6;
  Eigen::MatrixXd K = random_gram(g, n, 10, 2.0);
  const Eigen::MatrixXd Y = (Eigen::MatrixXd::Random(n, 15).array() + 1.0) / 2.0;
  const auto f = fit_krr(K, Y, 1e-10);
  for (int j = 0; j < n; ++j) {
    const auto p = predict_trajectory(K.col(j), f.A);
    for (int s = 0; s < 15; ++s) CHECK(std::fabs(p.raw[s] - Y(j, s)) < 1e-6);
  }
}

TEST_CASE("krr: non-finite inputs fail") {
  Eigen::MatrixXd K = Eigen::MatrixXd::Identity(2, 2), Y = Eigen::MatrixXd::Ones(2, 2);
  Y(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK(code_of([&] { fit_krr(K, Y, 0.1); }) == Errc::solve_failure);
}

TEST_CASE("loo: summary statistics match brute force") {
  auto w = make_world(2, 0.01, 0.0);
  const auto model = w.world.models.front().model_id;
  const auto fvs = select_task_fvs(w.world.fvs, model);
  LooOptions o;
  o.config = {0.5, 1e-4, "", std::nullopt};
  const auto sum = loo_evaluate(w.store, model, fvs, o);
  REQUIRE(!sum.reports.empty());
  double r2 = 0, mae = 0;
  for (const auto& r : sum.reports) {
    const double pr = oracle::pearson(r.predicted.raw, r.truth);
    CHECK(std::fabs(r.r2 - pr * pr) < 1e-12);
    CHECK(std::fabs(r.mae - oracle::mae(r.predicted.raw, r.truth)) < 1e-12);
    CHECK(std::fabs(r.mae_clipped - oracle::mae(r.predicted.clipped, r.truth)) < 1e-12);
    for (std::size_t i = 0; i < r.predicted.raw.size(); ++i) {
      CHECK(r.predicted.clipped[i] == std::clamp(r.predicted.raw[i], 0.0, 1.0));
    }
    CHECK(std::find(r.basis_task_ids.begin(), r.basis_task_ids.end(), r.held_out_task_id) == r.basis_task_ids.end());
    r2 += r.r2;
    mae += r.mae;
  }
  CHECK(std::fabs(sum.mean_r2 - r2 / sum.reports.size()) < 1e-12);
  CHECK(std::fabs(sum.mean_mae - mae / sum.reports.size()) < 1e-12);
}

TEST_CASE("loo: truth is the smoothed held-out trajectory") {
  auto w = make_world(4, 0.02, 0.0);
  const auto model = w.world.models.front().model_id;
  const auto fvs = select_task_fvs(w.world.fvs, model);
  LooOptions o;
  const auto sum = loo_evaluate(w.store, model, fvs, o);
  const auto& r = sum.reports.front();
  const auto& s = w.store.series(model, r.held_out_task_id);
  const auto want = oracle::gaussian_smooth(s.values, 1.0);
  REQUIRE(r.truth.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(std::fabs(r.truth[i] - want[i]) < 1e-12);
}

TEST_CASE("loo: duplicate task is recovered") {
  auto w = make_world(6, 0.0, 0.0);
  const auto model = w.world.models.front().model_id;
  auto fvs = select_task_fvs(w.world.fvs, model);
  const std::string src = "compositional:synthetic_c00";
  const std::string dup = "compositional:synthetic_dup";
  fvs[dup] = fvs.at(src);
  for (const auto& rec : w.world.records) {
    if (rec.model_id == model && rec.task_id == src) {
      auto copy = rec;
      copy.task_id = dup;
      w.store.add(copy);
    }
  }
  LooOptions o;
  o.config = {1.0, 1e-8, "", std::nullopt};
  std::vector<std::string> basis;
  for (const auto& t : w.store.tasks(model)) basis.push_back(t);
  const auto r = predict_held_out(w.store, model, fvs, dup, basis, o);
  CHECK(r.r2 >= 0.999);
  CHECK(r.mae < 1e-3);
}

TEST_CASE("loo: predictions do not depend on basis order") {
  auto w = make_world(8, 0.02, 0.05);
  const auto model = w.world.models.front().model_id;
  const auto fvs = select_task_fvs(w.world.fvs, model);
  std::vector<std::string> basis = w.store.tasks(model);
  const std::string target = "compositional:synthetic_c03";
  LooOptions o;
  o.config = {0.7, 1e-3, "", std::nullopt};
  const auto a = predict_held_out(w.store, model, fvs, target, basis, o);
  std::mt19937_64 g(1);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(basis.begin(), basis.end(), g);
    const auto b = predict_held_out(w.store, model, fvs, target, basis, o);
    for (std::size_t i = 0; i < a.predicted.raw.size(); ++i) {
      CHECK(std::fabs(a.predicted.raw[i] - b.predicted.raw[i]) < 1e-10);
    }
  }
}

TEST_CASE("loo: basis conditions and missing inputs") {
  auto w = make_world(9, 0.01, 0.0);
  const auto model = w.world.models.front().model_id;
  const auto fvs = select_task_fvs(w.world.fvs, model);

  TaskFvMap composites_only;
  for (const auto& [task, v] : fvs) {
    if (task.rfind("compositional:", 0) == 0) composites_only.emplace(task, v);
  }
  LooOptions simple;
  simple.condition = BasisCondition::simple_only;
  CHECK(code_of([&] { loo_evaluate(w.store, model, composites_only, simple); }) == Errc::empty_basis);

  const auto s = loo_evaluate(w.store, model, fvs, simple);
  for (const auto& r : s.reports) {
    for (const auto& b : r.basis_task_ids) CHECK(b.rfind("compositional:", 0) != 0);
  }

  auto partial = fvs;
  partial.erase("compositional:synthetic_c01");
  LooOptions explicit_target;
  explicit_target.targets = {"compositional:synthetic_c01"};
  CHECK(code_of([&] { loo_evaluate(w.store, model, partial, explicit_target); }) == Errc::missing_fv);
  const auto skipped = loo_evaluate(w.store, model, partial, LooOptions{});
  CHECK(std::any_of(skipped.skipped.begin(), skipped.skipped.end(),
                    [](const SkippedTask& t) { return t.task_id == "compositional:synthetic_c01"; }));
  CHECK(basis_condition_name(parse_basis_condition("simple")) == "simple_only");
  CHECK(parse_basis_condition("all") == BasisCondition::all_tasks);
}

TEST_CASE("fv selection keeps task-level vectors at the latest checkpoint") {
  std::vector<FunctionVector> fvs(3);
  for (auto& f : fvs) {
    f.meta.model_id = "m";
    f.meta.task_id = "t";
    f.values = {1, 0};
  }
  fvs[0].meta.checkpoint_tokens_b = 100;
  fvs[1].meta.checkpoint_tokens_b = 200;
  fvs[1].values = {0, 1};
  fvs[2].meta.checkpoint_tokens_b = 300;
  fvs[2].meta.prompt_index = 0;
  const auto sel = select_task_fvs(fvs, "m");
  REQUIRE(sel.size() == 1);
  CHECK(sel.at("t") == Vec{0, 1});
  CHECK(select_task_fvs(fvs, "other").empty());
}

TEST_CASE("tuning searches only over the supplied grid") {
  auto w = make_world(12, 0.02, 0.02);
  const auto model = w.world.models.front().model_id;
  const auto fvs = select_task_fvs(w.world.fvs, model);
  const std::vector<double> sig{0.3, 1.0}, lam{1e-4, 1e-2};
  const auto t = tune_kernel(w.store, model, fvs, sig, lam);
  CHECK(t.grid.size() == 4);
  CHECK(std::find(sig.begin(), sig.end(), t.best.sigma_k) != sig.end());
  CHECK(std::find(lam.begin(), lam.end(), t.best.lambda) != lam.end());
  for (const auto& e : t.grid) CHECK(t.best_mae <= e.mean_mae);
}
