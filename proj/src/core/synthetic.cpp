#include "core/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "core/error.hpp"
#include "core/io.hpp"
#include "core/rng.hpp"

namespace curriculum {

namespace {

constexpr double kElementalLo = 150.0, kElementalHi = 450.0;
constexpr double kCompositeLo = 550.0, kCompositeHi = 850.0;
constexpr double kInversionLo = 400.0, kInversionHi = 800.0;
constexpr double kInversionSlope = 30.0, kInversionCeiling = 0.95;
constexpr std::size_t kExamples = 100;

std::string pad2(std::size_t i) { return (i < 10 ? "0" : "") + std::to_string(i); }

// Composite crossing no earlier than each parent's at every threshold it
// reaches (checked on a dense grid of thresholds).
bool curriculum_consistent(const SigmoidTask& c, const std::vector<const SigmoidTask*>& parents) {
  for (int i = 1; i < 50; ++i) {
    const double th = 0.02 * i;
    const auto tc = sigmoid_crossing(c, th);
    if (!tc) break;
    for (const auto* p : parents) {
      const auto tp = sigmoid_crossing(*p, th);
      if (!tp || *tc < *tp) return false;
    }
  }
  return true;
}

std::vector<SigmoidTask> base_tasks(const SyntheticParams& p, Rng& rng) {
  const std::size_t n_comp = std::max<std::size_t>(1, p.n_tasks * 2 / 5);
  const std::size_t n_elem = p.n_tasks - n_comp;
  std::vector<SigmoidTask> tasks;
  for (std::size_t i = 0; i < n_elem; ++i) {
    SigmoidTask t;
    t.task_id = "synthetic:e" + pad2(i);
    if (p.mode == SyntheticMode::consistent) {
      t.midpoint = rng.uniform(kElementalLo, kElementalHi);
      t.slope = rng.uniform(15.0, 40.0);
      t.ceiling = rng.uniform(0.85, 1.0);
    } else {
      t.midpoint = rng.uniform(kInversionLo, kInversionHi);
      t.slope = kInversionSlope;
      t.ceiling = kInversionCeiling;
    }
    tasks.push_back(std::move(t));
  }
  for (std::size_t i = 0; i < n_comp; ++i) {
    SigmoidTask t;
    t.task_id = "compositional:synthetic_c" + pad2(i);
    t.composite = true;
    const auto a = static_cast<std::size_t>(rng.below(n_elem));
    auto b = static_cast<std::size_t>(rng.below(n_elem - 1));
    if (b >= a) ++b;
    const auto lo = std::min(a, b), hi = std::max(a, b);
    t.parents = {tasks[lo].task_id, tasks[hi].task_id};
    const std::vector<const SigmoidTask*> ps{&tasks[lo], &tasks[hi]};
    if (p.mode == SyntheticMode::consistent) {
      const double cap = std::min(ps[0]->ceiling, ps[1]->ceiling);
      bool ok = false;
      for (int attempt = 0; attempt < 1000 && !ok; ++attempt) {
        t.midpoint = rng.uniform(kCompositeLo, kCompositeHi);
        t.slope = rng.uniform(15.0, 40.0);
        t.ceiling = rng.uniform(0.70, cap);
        ok = curriculum_consistent(t, ps);
      }
      if (!ok) throw Error(Errc::internal, "could not place a curriculum-consistent composite");
    } else {
      t.midpoint = std::min(ps[0]->midpoint, ps[1]->midpoint) - p.inversion_shift;
      t.slope = kInversionSlope;
      t.ceiling = kInversionCeiling;
    }
    tasks.push_back(std::move(t));
  }
  return tasks;
}

// Orthonormal-ish embedding of the sigmoid parameters on top of a common
// offset, so FV proximity tracks trajectory similarity.
std::vector<double> embed(const SigmoidTask& t, const std::vector<double>& base,
                          const std::vector<std::vector<double>>& axes) {
  const double z[3] = {(t.midpoint - 500.0) / 350.0, (t.slope - 27.5) / 25.0, (t.ceiling - 0.85) / 0.6};
  std::vector<double> v = base;
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += z[k] * axes[k][i];
  }
  return v;
}

std::vector<std::vector<double>> random_orthonormal(std::size_t count, std::size_t dim, Rng& rng) {
  std::vector<std::vector<double>> out;
  while (out.size() < count) {
    std::vector<double> v(dim);
    for (double& x : v) x = rng.normal();
    for (const auto& u : out) {
      double d = 0.0;
      for (std::size_t i = 0; i < dim; ++i) d += v[i] * u[i];
      for (std::size_t i = 0; i < dim; ++i) v[i] -= d * u[i];
    }
    double n = 0.0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    if (n < 1e-9) continue;
    for (double& x : v) x /= n;
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

double sigmoid_accuracy(const SigmoidTask& t, double tokens) noexcept {
  return t.ceiling / (1.0 + std::exp(-(tokens - t.midpoint) / t.slope));
}

std::optional<double> sigmoid_crossing(const SigmoidTask& t, double threshold) noexcept {
  if (!(threshold < t.ceiling)) return std::nullopt;
  return t.midpoint + t.slope * std::log(threshold / (t.ceiling - threshold));
}

SyntheticWorld generate_world(const SyntheticParams& p) {
  auto bad = [](const std::string& why) { return Error(Errc::invalid_params, "simulate: " + why); };
  if (p.n_tasks < 3) throw bad("need at least 3 tasks");
  if (p.n_models < 1) throw bad("need at least 1 model");
  if (p.n_checkpoints < 2) throw bad("need at least 2 checkpoints");
  if (!(p.traj_noise >= 0.0) || !(p.fv_noise >= 0.0) || !(p.model_jitter >= 0.0)) throw bad("noise must be >= 0");
  if (!(p.t_max > p.t_min) || p.t_min < 0) throw bad("need 0 <= t_min < t_max");
  if (p.dim < 4) throw bad("dim must be >= 4");
  if (p.inversion_shift < 0) throw bad("inversion shift must be >= 0");

  SyntheticWorld w;
  w.params = p;
  for (std::size_t i = 0; i < p.n_checkpoints; ++i) {
    w.grid.push_back(p.t_min + (p.t_max - p.t_min) * static_cast<double>(i) / static_cast<double>(p.n_checkpoints - 1));
  }
  std::vector<EmergenceDefinition> defs;
  for (const auto& d : p.definitions) defs.push_back(parse_definition(d));

  Rng world_rng(p.seed);
  const auto tasks = base_tasks(p, world_rng);
  for (const auto& t : tasks) {
    for (const auto& parent : t.parents) w.edges.emplace_back(parent, t.task_id);
  }

  for (std::size_t m = 0; m < p.n_models; ++m) {
    SyntheticModel model;
    model.model_id = "synthetic_m" + pad2(m);
    Rng rng(p.seed ^ (0x9e3779b97f4a7c15ULL * (m + 1)));
    model.tasks = tasks;
    if (p.model_jitter > 0) {
      for (auto& t : model.tasks) t.midpoint += p.model_jitter * rng.normal();
    }
    const auto axes = random_orthonormal(4, p.dim, rng);
    const std::vector<double> base = axes[3];
    const std::vector<std::vector<double>> feat(axes.begin(), axes.begin() + 3);
    for (const auto& t : model.tasks) {
      double best = 0.0;
      std::vector<double> values;
      for (double g : w.grid) {
        double a = sigmoid_accuracy(t, g);
        if (p.traj_noise > 0) a += rng.uniform(-p.traj_noise, p.traj_noise);
        a = std::clamp(a, 0.0, 1.0);
        best = std::max(best, sigmoid_accuracy(t, g));
        w.records.push_back({model.model_id, t.task_id, g, a, kExamples});
      }
      auto v = embed(t, base, feat);
      const double sd = p.fv_noise / std::sqrt(static_cast<double>(p.dim));
      FunctionVector fv;
      fv.meta.model_id = model.model_id;
      fv.meta.task_id = t.task_id;
      fv.meta.extraction = "hidden_state";
      fv.meta.layer = 0;
      fv.meta.n_correct_prompts = kExamples;
      fv.meta.checkpoint_tokens_b = w.grid.back();
      for (double x : v) fv.values.push_back(static_cast<float>(x + (sd > 0 ? sd * rng.normal() : 0.0)));
      w.fvs.push_back(std::move(fv));

      for (const auto& def : defs) {
        std::optional<double> truth;
        const double th =
            def.kind == EmergenceDefinition::Kind::absolute ? def.threshold : def.threshold * best;
        if (const auto cross = sigmoid_crossing(t, th)) {
          // first checkpoint at or after the analytic crossing
          for (std::size_t i = 0; i + def.stability_k <= w.grid.size(); ++i) {
            if (w.grid[i] >= *cross) {
              truth = w.grid[i];
              break;
            }
          }
        }
        w.ground_truth[def.to_string()][model.model_id][t.task_id] = truth;
      }
    }
    w.models.push_back(std::move(model));
  }
  return w;
}

std::string world_manifest_json(const SyntheticWorld& w) {
  nlohmann::ordered_json j;
  j["suite_version"] = "synthetic-1";
  j["seed"] = w.params.seed;
  j["tasks"] = nlohmann::ordered_json::array();
  for (const auto& t : w.models.front().tasks) {
    nlohmann::ordered_json tj;
    tj["task_id"] = t.task_id;
    tj["category"] = "synthetic";
    tj["components"] = t.parents;
    tj["n_instances"] = 0;
    j["tasks"].push_back(std::move(tj));
  }
  j["edges"] = nlohmann::ordered_json::array();
  for (const auto& [a, b] : w.edges) j["edges"].push_back({a, b});
  return j.dump(2) + "\n";
}

std::string world_ground_truth_json(const SyntheticWorld& w) {
  nlohmann::ordered_json j;
  const auto& p = w.params;
  j["seed"] = p.seed;
  j["mode"] = p.mode == SyntheticMode::consistent ? "consistent" : "inversion";
  j["n_tasks"] = p.n_tasks;
  j["n_models"] = p.n_models;
  j["traj_noise"] = p.traj_noise;
  j["fv_noise"] = p.fv_noise;
  j["grid"] = w.grid;
  j["horizon"] = w.horizon();
  j["sentinel"] = w.horizon() + 1.0;
  j["models"] = nlohmann::ordered_json::array();
  for (const auto& m : w.models) {
    nlohmann::ordered_json mj;
    mj["model_id"] = m.model_id;
    mj["tasks"] = nlohmann::ordered_json::array();
    for (const auto& t : m.tasks) {
      mj["tasks"].push_back({{"task_id", t.task_id},
                             {"composite", t.composite},
                             {"parents", t.parents},
                             {"midpoint", t.midpoint},
                             {"slope", t.slope},
                             {"ceiling", t.ceiling}});
    }
    j["models"].push_back(std::move(mj));
  }
  nlohmann::ordered_json em = nlohmann::ordered_json::object();
  for (const auto& d : p.definitions) {
    const auto key = parse_definition(d).to_string();
    const auto& by_model = w.ground_truth.at(key);
    nlohmann::ordered_json dj = nlohmann::ordered_json::object();
    for (const auto& [model, tasks] : by_model) {
      nlohmann::ordered_json tj = nlohmann::ordered_json::object();
      for (const auto& [task, t] : tasks) tj[task] = t ? nlohmann::ordered_json(*t) : nlohmann::ordered_json(nullptr);
      dj[model] = std::move(tj);
    }
    em[key] = std::move(dj);
  }
  j["emergence"] = std::move(em);
  return j.dump(2) + "\n";
}

void write_world(const SyntheticWorld& w, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  TrajectoryStore store;
  store.add_all(w.records);
  write_text_file(dir / "trajectories.csv", store.to_csv());
  for (const auto& fv : w.fvs) write_fvec(fv, dir / "fvs" / fvec_relative_path(fv.meta));
  write_text_file(dir / "manifest.json", world_manifest_json(w));
  write_text_file(dir / "ground_truth.json", world_ground_truth_json(w));
}

}  // namespace curriculum
