// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 on any
// failure.

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "core/calibration.hpp"
#include "core/emergence.hpp"
#include "core/error.hpp"
#include "core/fvec.hpp"
#include "core/geometry.hpp"
#include "core/lexicon.hpp"
#include "core/ops.hpp"
#include "core/prediction.hpp"
#include "core/presets.hpp"
#include "core/stats.hpp"
#include "core/synthetic.hpp"
#include "core/task_suite.hpp"
#include "core/trajectory.hpp"
#include "support/oracles.hpp"
#include "support/worlds.hpp"

using namespace curriculum;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail << "failed: ";
      else detail << "; ";
      detail << what;
      pass = false;
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void criterion(const std::string& name, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = Clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  const double s = seconds_since(t0);
  if (!o.pass) ++failures;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3fs", s);
  std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << "  [" << buf << "]  " << o.detail.str() << std::endl;
}

struct Exemplar {
  const char* task;
  const char* input;
  const char* gold;
};

// Every elemental and composite exemplar pair with a fixed gold, verbatim.
const std::vector<Exemplar> kExemplars{
    {"copying", "gTpigTHK", "gTpigTHK"},
    {"token_reversal", "cat", "tac"},
    {"string_analogy", "abc → abd, ijk → ?", "ijl"},
    {"simple_icl:uppercase", "b", "B"},
    {"simple_icl:lowercase", "B", "b"},
    {"simple_icl:first_letter", "the cat went up the tree", "t"},
    {"simple_icl:last_letter", "the cat went up the tree", "e"},
    {"simple_icl:present_to_gerund", "run", "running"},
    {"simple_icl:singular_to_plural", "child", "children"},
    {"simple_icl:translate_eng_fr", "hello", "bonjour"},
    {"simple_icl:translate_fr_eng", "bonjour", "hello"},
    {"simple_icl:translate_eng_sp", "hello", "hola"},
    {"simple_icl:translate_sp_eng", "hola", "hello"},
    {"simple_icl:country_to_capital", "Afghanistan", "Kabul"},
    {"simple_icl:country_to_currency", "United States", "Dollar"},
    {"basic_arithmetic", "What is 5 + 3?", "8"},
    {"math", "4 * 1", "4"},
    {"multistep_arithmetic:two_step", "3 + 4, then multiply by 2", "14"},
    {"multistep_arithmetic:three_step", "Start with 10, subtract 3, then multiply by 4", "28"},
    {"logical_ops:negation",
     "Statement: All robots can move.\nCandidate: Some robots cannot move.\nIs this a correct logical negation?", "True"},
    {"logical_ops:conjunction", "Fact A is True. Fact B is True.\nClaim: A AND B. Is the claim true?", "True"},
    {"logical_ops:conditional", "Rule: If it rains, the ground gets wet.\nFact: It rains. Does the conclusion follow?",
     "True"},
    {"fact_extraction:extract_entity", "Passage: \"Alice gave five apples to Bob at the park.\" Who received the apples?",
     "Bob"},
    {"fact_extraction:extract_number",
     "Passage: \"John gave 5 apples to Mary on Tuesday.\" How many apples did John give?", "5"},
    {"fact_extraction:extract_location", "Passage: \"The cat sat on the red mat in the kitchen.\" Where is the mat?",
     "the kitchen"},
    {"coreference:pronoun_simple", "\"Alice told Bob that she would be late.\" Who does \"she\" refer to?", "Alice"},
    {"coreference:pronoun_hard",
     "\"The trophy didn't fit in the suitcase because it was too big.\" What was too big?", "the trophy"},
    {"ignoring_context", "Some text here. X = 5. More text.\nQuestion: What is X?", "5"},
    {"ioi_task", "Then, Henry and Phil had a lot of fun at the harbor. Henry gave a basket to", "Phil"},
    {"part_of_speech", "The cat is in the house. The part of speech for \"cat\" is _", "noun"},
    {"compositional:gerund_lower", "RUN", "running"},
    {"compositional:gerund_upper", "run", "RUNNING"},
    {"compositional:gerund_reverse", "run", "gninnur"},
    {"compositional:gerund_upper_reverse", "run", "GNINNUR"},
    {"compositional:plural_lower", "CHILD", "children"},
    {"compositional:plural_upper", "child", "CHILDREN"},
    {"compositional:plural_reverse", "child", "nerdlihc"},
    {"compositional:plural_upper_reverse", "child", "NERDLIHC"},
    {"compositional:translate_eng_fr_first", "hello", "b"},
    {"compositional:translate_eng_fr_last", "hello", "r"},
    {"compositional:translate_eng_fr_lower", "HELLO", "bonjour"},
    {"compositional:translate_eng_fr_reverse", "hello", "ruojnob"},
    {"compositional:translate_eng_fr_upper", "hello", "BONJOUR"},
    {"compositional:translate_eng_fr_upper_reverse", "hello", "RUOJNOB"},
    {"compositional:translate_eng_sp_first", "hello", "h"},
    {"compositional:translate_eng_sp_last", "hello", "a"},
    {"compositional:translate_eng_sp_lower", "HELLO", "hola"},
    {"compositional:translate_eng_sp_reverse", "hello", "aloh"},
    {"compositional:translate_eng_sp_upper", "hello", "HOLA"},
    {"compositional:translate_eng_sp_upper_reverse", "hello", "ALOH"},
    {"compositional:translate_fr_eng_first", "bonjour", "h"},
    {"compositional:translate_fr_eng_last", "bonjour", "o"},
    {"compositional:translate_fr_eng_lower", "BONJOUR", "hello"},
    {"compositional:translate_fr_eng_reverse", "bonjour", "olleh"},
    {"compositional:translate_fr_eng_upper", "bonjour", "HELLO"},
    {"compositional:translate_sp_eng_first", "hola", "h"},
    {"compositional:translate_sp_eng_last", "hola", "o"},
    {"compositional:translate_sp_eng_lower", "HOLA", "hello"},
    {"compositional:translate_sp_eng_reverse", "hola", "olleh"},
    {"compositional:translate_sp_eng_upper", "hola", "HELLO"},
    {"compositional:lower_first", "AFGHANISTAN", "a"},
    {"compositional:lower_last", "AFGHANISTAN", "n"},
    {"compositional:lower_reverse", "AFGHANISTAN", "natsinahgfa"},
    {"compositional:upper_first", "afghanistan", "A"},
    {"compositional:upper_last", "afghanistan", "N"},
    {"compositional:upper_reverse", "afghanistan", "NATSINAHGFA"},
    {"compositional:reverse_first", "Afghanistan", "n"},
    {"compositional:reverse_last", "Afghanistan", "A"},
};

// Kernel hyperparameters per model as published.
struct PublishedPreset {
  const char* model;
  const char* extraction;
  int layer;
  int k_heads;  // 0: none
  double sigma_k;
  double lambda;
};
const std::vector<PublishedPreset> kPublishedPresets{
    {"amber", "hidden_state", 21, 0, 6.02568, 0.0001},     {"crystal", "hidden_state", 8, 0, 6.25822, 0.0001},
    {"pythia_410m", "hidden_state", 3, 0, 0.33991, 0.001}, {"pythia_1.4b", "hidden_state", 12, 0, 5.93639, 0.001},
    {"pythia_12b", "hidden_state", 9, 0, 4.02777, 0.0001}, {"olmo2_1b", "hidden_state", 8, 0, 3.46810, 0.0001},
    {"olmo2_7b", "hidden_state", 16, 0, 1.05641, 0.005},   {"olmo2_13b", "cie_heads", 10, 15, 0.96582, 0.005},
    {"olmo3_7b", "hidden_state", 16, 0, 4.37314, 0.001},
};

std::vector<EmergenceDefinition> parse_all(std::initializer_list<const char*> defs) {
  std::vector<EmergenceDefinition> out;
  for (const char* d : defs) out.push_back(parse_definition(d));
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

}  // namespace

int main() {
  const fs::path tmp(CURRICULUM_TEST_TMP);
  fs::remove_all(tmp);
  fs::create_directories(tmp);

  criterion("suite fidelity: exemplars, 38 composites, constructed edges, < 5 s", [](Outcome& o) {
    const auto t0 = Clock::now();
    const auto lex = load_lexicons(default_data_dir());
    const auto suite = build_suite(SuiteConfig{}, lex);
    const double elapsed = seconds_since(t0);
    std::size_t found = 0;
    for (const auto& e : kExemplars) {
      bool hit = false;
      for (const auto* inst : suite.instances_of(e.task)) {
        if (inst->input == e.input && !inst->golds.empty() && inst->golds.front() == e.gold) hit = true;
      }
      o.require(hit, std::string("missing exemplar ") + e.task + " '" + e.input + "'");
      found += hit;
    }
    std::size_t composites = 0;
    std::set<Edge> expected;
    for (const auto& t : suite.manifest.tasks) {
      if (!is_composite_id(t.task_id)) continue;
      ++composites;
      for (const auto& op : t.components) expected.insert({operation_task_id(op), t.task_id});
    }
    const std::set<Edge> actual(suite.manifest.edges.begin(), suite.manifest.edges.end());
    o.require(composites == 38, "composites = " + std::to_string(composites));
    o.require(actual == expected, "edge set differs from component chains");
    o.require(elapsed < 5.0, "generation took " + fmt(elapsed) + " s");
    o.detail << found << "/" << kExemplars.size() << " exemplars, " << composites << " composites, " << actual.size()
             << " edges, generation " << fmt(elapsed) << " s";
  });

  criterion("emergence oracle: noiseless world, analytic crossings under abs:0.5 and abs:0.8, sentinel 1001, < 2 s",
            [](Outcome& o) {
              const auto t0 = Clock::now();
              SyntheticParams p;
              p.seed = 2024;
              p.n_tasks = 40;
              p.n_checkpoints = 20;
              const auto w = generate_world(p);
              TrajectoryStore store;
              store.add_all(w.records);
              const auto defs = parse_all({"abs:0.5", "abs:0.8"});
              const auto results = compute_emergence(store, defs);
              const double elapsed = seconds_since(t0);
              std::map<std::pair<std::string, std::string>, const SigmoidTask*> tasks;
              for (const auto& m : w.models) {
                for (const auto& t : m.tasks) tasks[{m.model_id, t.task_id}] = &t;
              }
              std::size_t agree = 0, unemerged = 0;
              for (const auto& r : results) {
                const auto& t = *tasks.at({r.model_id, r.task_id});
                const double theta = parse_definition(r.definition).threshold;
                double expect = 1001.0;
                if (t.ceiling > theta) {
                  const double cross = t.midpoint + t.slope * std::log(theta / (t.ceiling - theta));
                  for (double g : w.grid) {
                    if (g >= cross) {
                      expect = g;
                      break;
                    }
                  }
                }
                if (!r.emerged()) {
                  ++unemerged;
                  o.require(r.sentinel == 1001.0, "sentinel " + fmt(r.sentinel));
                }
                if (r.rank_value() == expect) ++agree;
              }
              o.require(agree == results.size(), std::to_string(results.size() - agree) + " tasks disagree");
              o.require(results.size() == 2 * 2 * 40, "result count");
              o.require(elapsed < 2.0, "took " + fmt(elapsed) + " s");
              o.detail << agree << "/" << results.size() << " exact, " << unemerged << " at sentinel, " << fmt(elapsed)
                       << " s";
            });

  criterion("rank statistics: brute-force agreement within 1e-12 on 200 tied rankings, exact +1 and -1",
            [](Outcome& o) {
              std::mt19937_64 g(1234);
              double worst = 0;
              std::size_t compared = 0;
              for (int trial = 0; trial < 200; ++trial) {
                const std::size_t n = 5 + g() % 60;
                std::uniform_int_distribution<int> pick(0, static_cast<int>(n / 3) + 1);
                std::vector<double> a(n), b(n);
                for (auto& x : a) x = pick(g);
                for (auto& x : b) x = pick(g);
                const double want = oracle::spearman(a, b);
                const auto got = spearman(a, b);
                if (std::isnan(want)) {
                  o.require(got.degenerate, "degenerate ranking not flagged");
                  continue;
                }
                worst = std::max(worst, std::fabs(got.rho - want));
                ++compared;
              }
              o.require(worst <= 1e-12, "max deviation " + fmt(worst));
              bool exact = true;
              for (std::size_t n : {3u, 7u, 10u, 11u, 38u, 86u}) {
                std::vector<double> a(n), r(n);
                for (std::size_t i = 0; i < n; ++i) {
                  a[i] = 20.0 * static_cast<double>(i);
                  r[i] = -a[i];
                }
                exact = exact && spearman(a, a).rho == 1.0 && spearman(a, r).rho == -1.0;
              }
              o.require(exact, "identity/reversal not exact");
              o.detail << compared << " rankings, max |diff| " << fmt(worst);
            });

  criterion("violation logic: consistent world 0 strong, 100B-shifted world 100% strong", [](Outcome& o) {
    const auto defs = parse_all({"abs:0.5", "abs:0.8", "rel:0.5", "rel:0.8"});
    std::size_t strong_consistent = 0, evaluated_consistent = 0, strong_shifted = 0, evaluated_shifted = 0;
    for (auto mode : {SyntheticMode::consistent, SyntheticMode::inversion}) {
      SyntheticParams p;
      p.seed = 77;
      p.mode = mode;
      p.inversion_shift = 100.0;
      const auto w = generate_world(p);
      TrajectoryStore store;
      store.add_all(w.records);
      const auto tables = group_emergence(compute_emergence(store, defs));
      for (const auto& [def, models] : tables.by_definition) {
        for (const auto& [model, table] : models) {
          const auto r = violation_report(table, w.edges);
          auto& strong = mode == SyntheticMode::consistent ? strong_consistent : strong_shifted;
          auto& eval = mode == SyntheticMode::consistent ? evaluated_consistent : evaluated_shifted;
          strong += r.strong_inversions;
          eval += r.composites_evaluated;
        }
      }
    }
    o.require(evaluated_consistent > 0 && strong_consistent == 0,
              std::to_string(strong_consistent) + " strong inversions in the consistent world");
    o.require(evaluated_shifted > 0 && strong_shifted == evaluated_shifted,
              std::to_string(strong_shifted) + "/" + std::to_string(evaluated_shifted) + " strong in shifted world");
    o.detail << "consistent " << strong_consistent << "/" << evaluated_consistent << ", shifted " << strong_shifted
             << "/" << evaluated_shifted;
  });

  criterion("smoothing and interpolation: brute-force convolution within 1e-12, constant fixed points, exact knots",
            [](Outcome& o) {
              std::mt19937_64 g(55);
              std::uniform_real_distribution<double> u(0, 1);
              double worst = 0;
              bool constants = true, knots = true;
              for (int trial = 0; trial < 200; ++trial) {
                const std::size_t n = 1 + g() % 40;
                const double sigma = 0.3 + 3.0 * u(g);
                std::vector<double> x(n);
                for (auto& v : x) v = u(g);
                const auto got = smooth(x, sigma);
                const auto want = oracle::gaussian_smooth(x, sigma);
                for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::fabs(got[i] - want[i]));
                const double c = u(g);
                for (double v : smooth(std::vector<double>(n, c), sigma)) constants = constants && v == c;
                if (n >= 2) {
                  std::vector<double> grid(n);
                  double t = 0;
                  for (auto& v : grid) v = (t += 1 + 50 * u(g));
                  knots = knots && interpolate(grid, x, grid) == x;
                }
              }
              o.require(worst <= 1e-12, "smoothing deviation " + fmt(worst));
              o.require(constants, "constant series changed");
              o.require(knots, "interpolation not exact on knots");
              o.detail << "max smoothing |diff| " << fmt(worst);
            });

  criterion("kernel ridge: relative residual <= 1e-8, lambda=1e-10 interpolation within 1e-6, duplicate task r2 >= 0.999",
            [](Outcome& o) {
              std::mt19937_64 g(8);
              std::normal_distribution<double> nd(0, 1);
              double worst_rel = 0, worst_interp = 0;
              for (int trial = 0; trial < 30; ++trial) {
                const int n = 5 + trial;
                std::vector<Vec> vs(n, Vec(12));
                for (auto& v : vs) {
                  for (auto& x : v) x = nd(g);
                }
                const auto K = kernel_matrix(vs, 1.0 + 0.1 * trial);
                const Eigen::MatrixXd Y = (Eigen::MatrixXd::Random(n, 25).array() + 1.0) / 2.0;
                const auto f = fit_krr(K, Y, std::pow(10.0, -(trial % 6)));
                const Eigen::MatrixXd Kl = K + f.lambda_used * Eigen::MatrixXd::Identity(n, n);
                worst_rel = std::max(worst_rel, (Kl * f.A - Y).cwiseAbs().maxCoeff() / (1.0 + Y.cwiseAbs().maxCoeff()));
                if (trial < 10) {
                  const auto fi = fit_krr(K, Y, 1e-10);
                  for (int j = 0; j < n; ++j) {
                    const auto pred = predict_trajectory(K.col(j), fi.A);
                    for (int s = 0; s < 25; ++s) worst_interp = std::max(worst_interp, std::fabs(pred.raw[s] - Y(j, s)));
                  }
                }
              }
              o.require(worst_rel <= 1e-8, "relative residual " + fmt(worst_rel));
              o.require(worst_interp <= 1e-6, "interpolation error " + fmt(worst_interp));

              SyntheticParams p;
              p.seed = 606;
              const auto w = generate_world(p);
              TrajectoryStore store;
              store.add_all(w.records);
              const auto model = w.models.front().model_id;
              auto fvs = select_task_fvs(w.fvs, model);
              double worst_r2 = 1.0;
              for (const auto& src : {"compositional:synthetic_c00", "compositional:synthetic_c05", "synthetic:e03"}) {
                const std::string dup = std::string(src) + "_dup";
                fvs[dup] = fvs.at(src);
                for (const auto& rec : w.records) {
                  if (rec.model_id == model && rec.task_id == src) {
                    auto c = rec;
                    c.task_id = dup;
                    store.add(c);
                  }
                }
                LooOptions opts;
                opts.config = {1.0, 1e-8, "", std::nullopt};
                std::vector<std::string> basis = store.tasks(model);
                const auto r = predict_held_out(store, model, fvs, dup, basis, opts);
                worst_r2 = std::min(worst_r2, r.r2);
                fvs.erase(dup);
              }
              o.require(worst_r2 >= 0.999, "duplicate-task r2 " + fmt(worst_r2));
              o.detail << "residual " << fmt(worst_rel) << ", interpolation " << fmt(worst_interp)
                       << ", duplicate r2 " << fmt(worst_r2);
            });

  criterion("end-to-end prediction at noise 0.02: mean LOO r2 >= 0.95, MAE <= 0.05, simple-only MAE >= 2x, < 60 s",
            [&tmp](Outcome& o) {
              const auto t0 = Clock::now();
              SyntheticParams p;
              p.seed = 42;
              p.traj_noise = 0.02;
              p.fv_noise = 0.02;
              const auto dir = tmp / "h3_world";
              write_world(generate_world(p), dir);
              const std::vector<fs::path> files{dir / "trajectories.csv"};
              const auto store = ingest_files(files);
              const auto fvs = read_fvecs(dir / "fvs");
              bool all_ok = true;
              for (const auto& model : store.models()) {
                const auto task_fvs = select_task_fvs(fvs, model);
                const auto sig = default_sigma_grid();
                const auto lam = default_lambda_grid();
                const auto tuned = tune_kernel(store, model, task_fvs, sig, lam);
                LooOptions all;
                all.config = tuned.best;
                LooOptions simple = all;
                simple.condition = BasisCondition::simple_only;
                const auto a = loo_evaluate(store, model, task_fvs, all);
                const auto s = loo_evaluate(store, model, task_fvs, simple);
                const bool ok = a.mean_r2 >= 0.95 && a.mean_mae <= 0.05 && s.mean_mae >= 2.0 * a.mean_mae &&
                                !a.reports.empty();
                all_ok = all_ok && ok;
                o.detail << model << ": sigma_k " << fmt(tuned.best.sigma_k) << " lambda " << fmt(tuned.best.lambda)
                         << ", n " << a.reports.size() << ", r2 " << fmt(a.mean_r2) << ", MAE " << fmt(a.mean_mae)
                         << ", simple-only MAE " << fmt(s.mean_mae) << "; ";
              }
              const double elapsed = seconds_since(t0);
              o.require(all_ok, "thresholds not met");
              o.require(elapsed < 60.0, "took " + fmt(elapsed) + " s");
              o.detail << fmt(elapsed) << " s";
            });

  criterion("calibration: planted winner selected, published kernel presets load", [](Outcome& o) {
    const auto w = fixtures::calibration_world(9);
    const auto outcome = calibrate(w.candidates, w.fvs, w.edges, 3);
    const auto& win = outcome.scores[outcome.winner];
    o.require(win.candidate.label == w.planted_label, "winner " + win.candidate.label);
    const auto presets = load_presets(default_presets_path());
    o.require(presets.size() == kPublishedPresets.size(), "preset count " + std::to_string(presets.size()));
    for (const auto& want : kPublishedPresets) {
      const auto* got = find_preset(presets, want.model);
      const bool ok = got && got->extraction == want.extraction && got->layer == want.layer &&
                      got->k_heads.value_or(0) == want.k_heads && got->sigma_k == want.sigma_k &&
                      got->lambda == want.lambda;
      o.require(ok, std::string("preset mismatch for ") + want.model);
    }
    o.detail << "winner " << win.candidate.label << " (rank sum " << win.rank_sum << "), " << presets.size()
             << " presets";
  });

  criterion("formats: FVEC bit-exact round trip, trajectory CSV value-exact round trip", [&tmp](Outcome& o) {
    std::mt19937_64 g(99);
    std::size_t fv_files = 0;
    for (int trial = 0; trial < 50; ++trial) {
      FunctionVector fv;
      fv.meta.model_id = "model_" + std::to_string(trial);
      fv.meta.task_id = trial % 2 ? "compositional:gerund_upper" : "simple_icl:uppercase";
      if (trial % 3 == 0) {
        fv.meta.extraction = "cie_heads";
        fv.meta.layer = 10;
        for (int h = 0; h < 15; ++h) fv.meta.heads.emplace_back(10, h);
      }
      fv.meta.n_correct_prompts = 1 + g() % 100;
      fv.meta.checkpoint_tokens_b = std::uniform_real_distribution<double>(0, 5000)(g);
      if (trial % 4 == 0) fv.meta.prompt_index = g() % 50;
      const std::size_t dim = 1 + g() % 2048;
      for (std::size_t i = 0; i < dim; ++i) {
        float x;
        do {
          x = std::bit_cast<float>(static_cast<std::uint32_t>(g()));
        } while (!std::isfinite(x));
        fv.values.push_back(x);
      }
      const auto path = tmp / "fvec" / fvec_relative_path(fv.meta);
      write_fvec(fv, path);
      const auto back = read_fvec(path);
      const bool ok = back.values.size() == fv.values.size() &&
                      std::memcmp(back.values.data(), fv.values.data(), 4 * dim) == 0 &&
                      back.meta.model_id == fv.meta.model_id && back.meta.task_id == fv.meta.task_id &&
                      back.meta.heads == fv.meta.heads && back.meta.prompt_index == fv.meta.prompt_index &&
                      back.meta.checkpoint_tokens_b == fv.meta.checkpoint_tokens_b &&
                      back.meta.n_correct_prompts == fv.meta.n_correct_prompts;
      o.require(ok, "FVEC mismatch in trial " + std::to_string(trial));
      ++fv_files;
    }

    TrajectoryStore store;
    std::uniform_real_distribution<double> u(0, 1);
    std::size_t records = 0;
    for (int m = 0; m < 4; ++m) {
      for (int t = 0; t < 30; ++t) {
        double tokens = 0;
        for (int k = 0; k < 25; ++k) {
          tokens += std::ldexp(u(g), 3 + static_cast<int>(g() % 40) - 20) + 1e-9;
          store.add({"m" + std::to_string(m), "compositional:t" + std::to_string(t), tokens, u(g),
                     static_cast<std::size_t>(1 + g() % 500)});
          ++records;
        }
      }
    }
    const auto dir = tmp / "csv_store";
    save_store(store, dir);
    const auto back = load_store(dir);
    bool exact = back.series_count() == store.series_count();
    for (const auto& [model, tasks] : store.all()) {
      for (const auto& [task, s] : tasks) {
        const auto& b = back.series(model, task);
        exact = exact && b.grid.size() == s.grid.size();
        for (std::size_t i = 0; exact && i < s.grid.size(); ++i) {
          exact = std::bit_cast<std::uint64_t>(b.grid[i]) == std::bit_cast<std::uint64_t>(s.grid[i]) &&
                  std::bit_cast<std::uint64_t>(b.values[i]) == std::bit_cast<std::uint64_t>(s.values[i]) &&
                  b.n_examples[i] == s.n_examples[i];
        }
      }
    }
    o.require(exact, "CSV round trip changed values");
    o.require(back.warnings().empty(), "CSV round trip produced warnings");
    o.detail << fv_files << " FVEC files, " << records << " CSV records";
  });

  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
