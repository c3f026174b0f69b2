#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "curriculum/curriculum.h"

namespace {

using nlohmann::json;

struct Failure {
  cur_status status;
};

// 2: bad input or unreadable files; 3: the analysis itself could not run.
int exit_code_for(cur_status s) {
  switch (s) {
    case CUR_OK:
      return 0;
    case CUR_E_NOT_ENOUGH_INSTANCES:
    case CUR_E_TOO_FEW_POINTS:
    case CUR_E_EMPTY_SERIES:
    case CUR_E_TOO_FEW_SHARED_TASKS:
    case CUR_E_ZERO_VECTOR:
    case CUR_E_DIMENSION_MISMATCH:
    case CUR_E_TOO_FEW_PROMPTS:
    case CUR_E_SOLVE_FAILURE:
    case CUR_E_EMPTY_BASIS:
    case CUR_E_INTERNAL:
      return 3;
    default:
      return 2;
  }
}

void check(cur_status s) {
  if (s != CUR_OK) throw Failure{s};
}

std::string take(char* s) {
  std::string out = s ? s : "";
  cur_string_free(s);
  return out;
}

const char* c_or_null(const std::optional<std::string>& s) { return s ? s->c_str() : nullptr; }

std::vector<const char*> c_strings(const std::vector<std::string>& v) {
  std::vector<const char*> out;
  for (const auto& s : v) out.push_back(s.c_str());
  return out;
}

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  ~Handle() { Free(p); }
};
using Suite = Handle<cur_suite, cur_suite_free>;
using Store = Handle<cur_store, cur_store_free>;
using Emergence = Handle<cur_emergence, cur_emergence_free>;

struct Output {
  bool as_json = false;

  void emit(const json& summary, const std::string& human) const {
    if (as_json) {
      std::cout << summary.dump() << '\n';
    } else {
      std::cout << human;
    }
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string fmt_json_number(const json& v) {
  if (v.is_number()) return fmt(v.get<double>());
  if (v.is_null()) return "nan";
  return v.dump();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curriculum: task suite, emergence analysis and trajectory prediction toolkit"};
  app.require_subcommand(1);
  Output out;
  app.add_flag("--json", out.as_json, "Print machine-readable JSON instead of tables");
  std::optional<std::string> log_level;
  app.add_option("--log-level", log_level, "debug|info|warn|error|off (overrides CURRICULUM_LOG)");
  app.add_flag_function("--version", [](std::int64_t) {
    std::cout << cur_version() << '\n';
    std::exit(0);
  }, "Print the library version");

  // gen-tasks
  auto* gen = app.add_subcommand("gen-tasks", "Generate the task suite (manifest.json, instances.jsonl)");
  std::string gen_out;
  std::uint64_t gen_seed = 0;
  std::optional<std::string> gen_include, gen_frct, gen_data;
  bool gen_diacritics = false;
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--seed", gen_seed, "Generation seed")->required();
  gen->add_option("--include", gen_include, "Comma-separated categories to keep");
  gen->add_option("--frct-items", gen_frct, "JSONL file with externally supplied FRCT items");
  gen->add_option("--data-dir", gen_data, "Directory holding lexicons/ (default: installed data)");
  gen->add_flag("--diacritic-aliases", gen_diacritics, "Accept diacritic-stripped golds for translation tasks");

  // render-prompt
  auto* render = app.add_subcommand("render-prompt", "Render a few-shot prompt for one query instance");
  std::string rp_suite, rp_task;
  std::size_t rp_query = 0, rp_shots = 10;
  std::uint64_t rp_seed = 0;
  render->add_option("--suite", rp_suite, "Suite directory from gen-tasks")->required();
  render->add_option("--task", rp_task, "Task id")->required();
  render->add_option("--query", rp_query, "Query instance index");
  render->add_option("--shots", rp_shots, "Number of demonstrations");
  render->add_option("--seed", rp_seed, "Demonstration sampling seed");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Ingest trajectory CSV files into a store");
  std::vector<std::string> ing_files;
  std::string ing_out;
  ingest->add_option("--traj", ing_files, "Trajectory CSV files")->required()->expected(1, -1);
  ingest->add_option("--out", ing_out, "Store directory")->required();

  // emergence
  auto* emer = app.add_subcommand("emergence", "Compute emergence times");
  std::string em_store, em_out;
  std::vector<std::string> em_defs;
  std::optional<double> em_horizon;
  emer->add_option("--store", em_store, "Store directory")->required();
  emer->add_option("--def", em_defs, "Definition such as abs:0.8:k3 (repeatable; default abs:0.5,abs:0.8,rel:0.5,rel:0.8)")
      ->delimiter(',');
  emer->add_option("--horizon", em_horizon, "Horizon in billions of tokens (default: last checkpoint per model)");
  emer->add_option("--out", em_out, "Output CSV")->required();

  // correlate
  auto* corr = app.add_subcommand("correlate", "Pairwise Spearman rank correlation of emergence orders");
  std::string co_in, co_out;
  std::optional<std::string> co_def;
  corr->add_option("--emergence", co_in, "Emergence CSV")->required();
  corr->add_option("--def", co_def, "Restrict to one definition");
  corr->add_option("--out", co_out, "Output CSV")->required();

  // violations
  auto* viol = app.add_subcommand("violations", "Audit composites against their prerequisites");
  std::string vi_in, vi_manifest, vi_out;
  viol->add_option("--emergence", vi_in, "Emergence CSV")->required();
  viol->add_option("--manifest", vi_manifest, "Suite or synthetic manifest.json")->required();
  viol->add_option("--out", vi_out, "Output JSON report")->required();

  // heatmap-data
  auto* heat = app.add_subcommand("heatmap-data", "Export the tasks x models emergence matrix");
  std::string hm_in, hm_out;
  std::optional<std::string> hm_def;
  heat->add_option("--emergence", hm_in, "Emergence CSV")->required();
  heat->add_option("--def", hm_def, "Definition (default: first in file)");
  heat->add_option("--out", hm_out, "Output TSV")->required();

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "Rank extraction candidates by the three quality criteria");
  std::string ca_fvs, ca_cand, ca_out;
  std::optional<std::string> ca_manifest;
  std::uint64_t ca_seed = 0;
  cal->add_option("--fvs", ca_fvs, "FVEC file or directory")->required();
  cal->add_option("--candidates", ca_cand, "Candidate list JSON")->required();
  cal->add_option("--manifest", ca_manifest, "Manifest with composite edges (default: built-in catalog)");
  cal->add_option("--seed", ca_seed, "Split-half seed");
  cal->add_option("--out", ca_out, "Output scores JSON")->required();

  // predict
  auto* pred = app.add_subcommand("predict", "Leave-one-out kernel prediction of held-out trajectories");
  std::string pr_store, pr_fvs, pr_out, pr_condition = "all";
  std::optional<std::string> pr_config, pr_model;
  std::vector<std::string> pr_targets;
  bool pr_tune = false;
  double pr_sigma = 1.0, pr_eps = 1e-4;
  pred->add_option("--store", pr_store, "Store directory")->required();
  pred->add_option("--fvs", pr_fvs, "FVEC file or directory")->required();
  pred->add_option("--config", pr_config, "Kernel config JSON or presets file (default: installed presets)");
  pred->add_option("--condition", pr_condition, "all|simple|both")
      ->check(CLI::IsMember({"all", "simple", "both"}));
  pred->add_option("--model", pr_model, "Only this model");
  pred->add_option("--targets", pr_targets, "Held-out task ids (default: every composite)")->delimiter(',');
  pred->add_flag("--tune", pr_tune, "Grid-search sigma_k and lambda on elemental tasks first");
  pred->add_option("--smooth-sigma", pr_sigma, "Gaussian smoothing width in checkpoints");
  pred->add_option("--epsilon", pr_eps, "Variance filter threshold");
  pred->add_option("--out", pr_out, "Reports directory")->required();

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic world with known ground truth");
  cur_simulate_options so;
  cur_simulate_options_init(&so);
  std::string si_out;
  double si_noise = 0.0;
  std::optional<double> si_fv_noise;
  bool si_inversion = false;
  sim->add_option("--seed", so.seed, "World seed");
  sim->add_option("--tasks", so.n_tasks, "Number of tasks");
  sim->add_option("--models", so.n_models, "Number of models");
  sim->add_option("--checkpoints", so.n_checkpoints, "Checkpoints per trajectory");
  sim->add_option("--dim", so.dim, "Function vector dimension");
  sim->add_option("--noise", si_noise, "Noise level for trajectories and FVs");
  sim->add_option("--fv-noise", si_fv_noise, "FV noise (default: --noise)");
  sim->add_option("--jitter", so.model_jitter, "Per-model midpoint jitter in billions");
  sim->add_flag("--inversion", si_inversion, "Plant composites ahead of their parents");
  sim->add_option("--shift", so.inversion_shift, "Inversion shift in billions");
  sim->add_option("--out", si_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (log_level) check(cur_set_log_level(log_level->c_str()));

    if (*gen) {
      cur_suite_options o;
      cur_suite_options_init(&o);
      o.seed = gen_seed;
      o.include = c_or_null(gen_include);
      o.frct_items = c_or_null(gen_frct);
      o.data_dir = c_or_null(gen_data);
      o.diacritic_aliases = gen_diacritics ? 1 : 0;
      Suite s;
      check(cur_suite_build(&o, &s.p));
      check(cur_suite_write(s.p, gen_out.c_str()));
      json j{{"out", gen_out},
             {"n_tasks", cur_suite_task_count(s.p)},
             {"n_composites", cur_suite_composite_count(s.p)},
             {"n_edges", cur_suite_edge_count(s.p)},
             {"n_instances", cur_suite_instance_count(s.p)}};
      out.emit(j, "wrote " + gen_out + ": " + std::to_string(cur_suite_task_count(s.p)) + " tasks (" +
                      std::to_string(cur_suite_composite_count(s.p)) + " composite), " +
                      std::to_string(cur_suite_edge_count(s.p)) + " edges, " +
                      std::to_string(cur_suite_instance_count(s.p)) + " instances\n");
    } else if (*render) {
      Suite s;
      check(cur_suite_load(rp_suite.c_str(), &s.p));
      char* prompt = nullptr;
      check(cur_suite_render_prompt(s.p, rp_task.c_str(), rp_query, rp_shots, rp_seed, &prompt));
      const std::string text = take(prompt);
      out.emit(json{{"task_id", rp_task}, {"prompt", text}}, text + "\n");
    } else if (*ingest) {
      auto files = c_strings(ing_files);
      Store s;
      check(cur_store_ingest(files.data(), files.size(), &s.p));
      check(cur_store_save(s.p, ing_out.c_str()));
      json j{{"out", ing_out},
             {"n_models", cur_store_model_count(s.p)},
             {"n_series", cur_store_series_count(s.p)},
             {"n_points", cur_store_point_count(s.p)},
             {"n_warnings", cur_store_warning_count(s.p)}};
      out.emit(j, "ingested " + std::to_string(cur_store_point_count(s.p)) + " points in " +
                      std::to_string(cur_store_series_count(s.p)) + " series across " +
                      std::to_string(cur_store_model_count(s.p)) + " models (" +
                      std::to_string(cur_store_warning_count(s.p)) + " warnings) -> " + ing_out + "\n");
    } else if (*emer) {
      if (em_defs.empty()) em_defs = {"abs:0.5", "abs:0.8", "rel:0.5", "rel:0.8"};
      auto defs = c_strings(em_defs);
      Store s;
      check(cur_store_open(em_store.c_str(), &s.p));
      Emergence e;
      check(cur_emergence_compute(s.p, defs.data(), defs.size(), em_horizon ? &*em_horizon : nullptr, &e.p));
      check(cur_emergence_write(e.p, em_out.c_str()));
      json j{{"out", em_out},
             {"definitions", em_defs},
             {"n_results", cur_emergence_count(e.p)},
             {"n_emerged", cur_emergence_emerged_count(e.p)}};
      out.emit(j, "wrote " + std::to_string(cur_emergence_count(e.p)) + " emergence rows (" +
                      std::to_string(cur_emergence_emerged_count(e.p)) + " emerged) -> " + em_out + "\n");
    } else if (*corr) {
      Emergence e;
      check(cur_emergence_read(co_in.c_str(), &e.p));
      char* raw = nullptr;
      check(cur_correlate(e.p, c_or_null(co_def), co_out.c_str(), &raw));
      const json j = json::parse(take(raw));
      std::string human = "definition\tmodels\tpairs\tmean_rho\tmin_rho\tmax_rho\n";
      for (const auto& d : j["definitions"]) {
        human += d["definition"].get<std::string>() + '\t' + std::to_string(d["n_models"].get<int>()) + '\t' +
                 std::to_string(d["n_pairs"].get<int>()) + '\t' + fmt_json_number(d["mean_rho"]) + '\t' +
                 fmt_json_number(d["min_rho"]) + '\t' + fmt_json_number(d["max_rho"]) + '\n';
      }
      out.emit(j, human);
    } else if (*viol) {
      Emergence e;
      check(cur_emergence_read(vi_in.c_str(), &e.p));
      char* raw = nullptr;
      check(cur_violations(e.p, vi_manifest.c_str(), vi_out.c_str(), &raw));
      const json j = json::parse(take(raw));
      std::string human = "definition\tconsistent\tweak\tstrong\tviolating_pairs\ttotal_pairs\n";
      for (const auto& d : j["definitions"]) {
        human += d["definition"].get<std::string>() + '\t' + d["consistent"].dump() + '\t' +
                 d["weak_inversions"].dump() + '\t' + d["strong_inversions"].dump() + '\t' +
                 d["violating_pairs"].dump() + '\t' + d["total_pairs"].dump() + '\n';
      }
      out.emit(j, human);
    } else if (*heat) {
      Emergence e;
      check(cur_emergence_read(hm_in.c_str(), &e.p));
      char* raw = nullptr;
      check(cur_heatmap_data(e.p, c_or_null(hm_def), hm_out.c_str(), &raw));
      const json j = json::parse(take(raw));
      out.emit(j, "wrote " + j["n_tasks"].dump() + " x " + j["n_models"].dump() + " matrix (" +
                      j["definition"].get<std::string>() + ") -> " + hm_out + "\n");
    } else if (*cal) {
      cur_calibrate_options o;
      cur_calibrate_options_init(&o);
      o.fvs = ca_fvs.c_str();
      o.candidates = ca_cand.c_str();
      o.manifest = c_or_null(ca_manifest);
      o.out = ca_out.c_str();
      o.seed = ca_seed;
      char* raw = nullptr;
      check(cur_calibrate(&o, &raw));
      const json j = json::parse(take(raw));
      out.emit(j, "winner: " + j["winner"].get<std::string>() + " (rank sum " + j["rank_sum"].dump() + " of " +
                      j["n_candidates"].dump() + " candidates) -> " + ca_out + "\n");
    } else if (*pred) {
      std::string targets;
      for (const auto& t : pr_targets) targets += (targets.empty() ? "" : ",") + t;
      cur_predict_options o;
      cur_predict_options_init(&o);
      o.store = pr_store.c_str();
      o.fvs = pr_fvs.c_str();
      o.config = c_or_null(pr_config);
      o.condition = pr_condition.c_str();
      o.out = pr_out.c_str();
      o.model = c_or_null(pr_model);
      o.targets = targets.empty() ? nullptr : targets.c_str();
      o.tune = pr_tune ? 1 : 0;
      o.smooth_sigma = pr_sigma;
      o.epsilon = pr_eps;
      char* raw = nullptr;
      check(cur_predict(&o, &raw));
      const json j = json::parse(take(raw));
      std::string human = "model\tcondition\tsigma_k\tlambda\tevaluated\tskipped\tmean_r2\tmean_mae\n";
      for (const auto& m : j["models"]) {
        for (const auto& c : m["conditions"]) {
          human += m["model_id"].get<std::string>() + '\t' + c["condition"].get<std::string>() + '\t' +
                   fmt_json_number(m["sigma_k"]) + '\t' + fmt_json_number(m["lambda"]) + '\t' +
                   c["n_evaluated"].dump() + '\t' + c["n_skipped"].dump() + '\t' + fmt_json_number(c["mean_r2"]) +
                   '\t' + fmt_json_number(c["mean_mae"]) + '\n';
        }
      }
      out.emit(j, human);
    } else if (*sim) {
      so.traj_noise = si_noise;
      so.fv_noise = si_fv_noise ? *si_fv_noise : si_noise;
      so.inversion = si_inversion ? 1 : 0;
      so.out = si_out.c_str();
      char* raw = nullptr;
      check(cur_simulate(&so, &raw));
      const json j = json::parse(take(raw));
      out.emit(j, "synthetic world: " + j["n_models"].dump() + " models x " + j["n_tasks"].dump() + " tasks (" +
                      j["n_composites"].dump() + " composite), " + j["n_checkpoints"].dump() +
                      " checkpoints -> " + si_out + "\n");
    }
  } catch (const Failure& f) {
    const long pos = cur_last_error_position();
    std::cerr << "error [" << cur_status_name(f.status) << "]: " << cur_last_error();
    if (pos >= 0) std::cerr << " (position " << pos << ")";
    std::cerr << '\n';
    return exit_code_for(f.status);
  } catch (const json::exception& e) {
    std::cerr << "error: malformed summary from library: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
