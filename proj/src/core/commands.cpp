#include "core/commands.hpp"

#include <cmath>
#include <set>

#include <json.hpp>

#include "core/calibration.hpp"
#include "core/error.hpp"
#include "core/fvec.hpp"
#include "core/io.hpp"
#include "core/log.hpp"
#include "core/prediction.hpp"
#include "core/presets.hpp"
#include "core/task_suite.hpp"

namespace curriculum::commands {

using nlohmann::ordered_json;

namespace {

ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return nullptr;
  return v > 0 ? "inf" : "-inf";
}

std::string select_definition(const EmergenceTables& tables, const std::optional<std::string>& requested) {
  if (tables.definitions.empty()) throw Error(Errc::invalid_argument, "emergence table is empty");
  if (!requested) return tables.definitions.front();
  const std::string key = parse_definition(*requested).to_string();
  if (!tables.by_definition.count(key)) throw Error(Errc::invalid_argument, "definition " + key + " not in emergence table");
  return key;
}

std::string task_file_stem(std::string_view task_id) {
  std::string out;
  for (char c : task_id) {
    if (c == ':') {
      out += "__";
    } else if (c == '/') {
      out += '_';
    } else {
      out += c;
    }
  }
  return out;
}

}  // namespace

std::string correlate(std::span<const EmergenceResult> results, const std::optional<std::string>& definition,
                      const path& out) {
  const auto tables = group_emergence(results);
  std::vector<std::string> defs = tables.definitions;
  if (definition) defs = {select_definition(tables, definition)};
  std::string csv = "definition,model_a,model_b,n,rho,p,p_method,degenerate\n";
  ordered_json summary;
  summary["definitions"] = ordered_json::array();
  for (const auto& d : defs) {
    const auto m = pairwise_stability(tables.by_definition.at(d));
    for (const auto& p : m.pairs) {
      csv += d + ',' + p.model_a + ',' + p.model_b + ',' + std::to_string(p.stat.n) + ',' + format_double(p.stat.rho) +
             ',' + format_double(p.stat.p) + ',' + (p.stat.exact_p ? "permutation" : "t") + ',' +
             (p.stat.degenerate ? "1" : "0") + '\n';
    }
    summary["definitions"].push_back({{"definition", d},
                                      {"n_models", m.models.size()},
                                      {"n_pairs", m.pairs.size()},
                                      {"mean_rho", m.mean_rho},
                                      {"min_rho", m.min_rho},
                                      {"max_rho", m.max_rho}});
  }
  write_text_file(out, csv);
  summary["out"] = out.string();
  return summary.dump();
}

std::string violations(std::span<const EmergenceResult> results, const path& manifest, const path& out) {
  const auto edges = edges_from_manifest_json(read_text_file(manifest));
  if (edges.empty()) log::warn("manifest ", manifest.string(), " has no edges");
  const auto tables = group_emergence(results);
  ordered_json report;
  report["definitions"] = ordered_json::array();
  ordered_json summary;
  summary["definitions"] = ordered_json::array();
  for (const auto& d : tables.definitions) {
    std::vector<ViolationReport> reps;
    ordered_json models = ordered_json::array();
    for (const auto& [model, table] : tables.by_definition.at(d)) {
      auto r = violation_report(table, edges);
      r.model_id = model;
      r.definition = d;
      ordered_json details = ordered_json::array();
      for (const auto& v : r.details) {
        ordered_json parents = ordered_json::array();
        for (const auto& p : v.parents) {
          parents.push_back({{"task_id", p.parent}, {"t_star", p.t_parent}, {"composite_earlier", p.violated}});
        }
        details.push_back({{"composite", v.composite},
                           {"t_star", v.t_composite},
                           {"class", inversion_class_name(v.verdict)},
                           {"parents", std::move(parents)}});
      }
      models.push_back({{"model_id", model},
                        {"composites_evaluated", r.composites_evaluated},
                        {"consistent", r.consistent},
                        {"weak_inversions", r.weak_inversions},
                        {"strong_inversions", r.strong_inversions},
                        {"total_pairs", r.total_pairs},
                        {"violating_pairs", r.violating_pairs},
                        {"violation_rate", r.violation_rate},
                        {"composite_violation_rate", r.composite_violation_rate},
                        {"missing_tasks", r.missing_tasks},
                        {"details", std::move(details)}});
      reps.push_back(std::move(r));
    }
    const auto agg = aggregate_violations(reps);
    std::size_t weak = 0, strong = 0, consistent = 0;
    for (const auto& r : reps) {
      weak += r.weak_inversions;
      strong += r.strong_inversions;
      consistent += r.consistent;
    }
    ordered_json totals{{"consistent", consistent},
                        {"weak_inversions", weak},
                        {"strong_inversions", strong},
                        {"total_pairs", agg.total_pairs},
                        {"violating_pairs", agg.violating_pairs},
                        {"violation_rate", agg.violation_rate}};
    report["definitions"].push_back({{"definition", d}, {"totals", totals}, {"models", std::move(models)}});
    totals["definition"] = d;
    summary["definitions"].push_back(std::move(totals));
  }
  write_text_file(out, report.dump(2) + "\n");
  summary["out"] = out.string();
  return summary.dump();
}

std::string heatmap_data(std::span<const EmergenceResult> results, const std::optional<std::string>& definition,
                         const path& out) {
  const auto tables = group_emergence(results);
  const auto d = select_definition(tables, definition);
  const auto& by_model = tables.by_definition.at(d);
  write_text_file(out, heatmap_tsv(by_model));
  ordered_json s{{"definition", d}, {"n_models", by_model.size()}, {"n_tasks", consensus_order(by_model).size()},
                 {"out", out.string()}};
  return s.dump();
}

std::string calibrate(const CalibrateArgs& a) {
  const auto candidates = parse_candidates(read_text_file(a.candidates));
  const auto fvs = read_fvecs(a.fvs);
  const auto edges = a.manifest ? edges_from_manifest_json(read_text_file(*a.manifest)) : catalog_edges();
  const auto outcome = calibrate(candidates, fvs, edges, a.seed);
  ordered_json scores = ordered_json::array();
  for (const auto& s : outcome.scores) {
    ordered_json c{{"label", s.candidate.label},
                   {"extraction", s.candidate.extraction},
                   {"layer", s.candidate.layer},
                   {"k_heads", s.candidate.k_heads ? ordered_json(*s.candidate.k_heads) : ordered_json(nullptr)},
                   {"consistency", number(s.values.consistency)},
                   {"discriminability", number(s.values.discriminability)},
                   {"reconstruction", number(s.values.reconstruction)},
                   {"ranks", s.ranks},
                   {"rank_sum", s.rank_sum}};
    if (s.candidate.sigma_k) c["sigma_k"] = *s.candidate.sigma_k;
    if (s.candidate.lambda) c["lambda"] = *s.candidate.lambda;
    scores.push_back(std::move(c));
  }
  const auto& win = outcome.scores[outcome.winner];
  ordered_json doc{{"winner", win.candidate.label}, {"winner_index", outcome.winner}, {"scores", scores}};
  write_text_file(a.out, doc.dump(2) + "\n");
  ordered_json s{{"winner", win.candidate.label},
                 {"winner_index", outcome.winner},
                 {"rank_sum", win.rank_sum},
                 {"n_candidates", outcome.scores.size()},
                 {"out", a.out.string()}};
  return s.dump();
}

namespace {

struct ConfigSource {
  std::optional<KernelConfig> single;
  std::vector<KernelPreset> presets;
};

ConfigSource load_config_source(const std::optional<path>& p) {
  ConfigSource src;
  const path file = p ? *p : default_presets_path();
  if (!p && !std::filesystem::exists(file)) return src;
  const std::string text = read_text_file(file);
  try {
    const auto j = nlohmann::json::parse(text);
    if (j.contains("presets")) {
      src.presets = parse_presets(text);
      return src;
    }
    KernelConfig c;
    c.sigma_k = j.at("sigma_k").get<double>();
    c.lambda = j.at("lambda").get<double>();
    c.extraction = j.value("extraction", std::string());
    if (j.contains("layer") && !j.at("layer").is_null()) c.layer = j.at("layer").get<int>();
    if (!(c.sigma_k > 0) || !(c.lambda > 0)) throw Error(Errc::invalid_argument, "config: sigma_k and lambda must be > 0");
    src.single = c;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::malformed_file, file.string() + ": " + e.what());
  }
  return src;
}

void write_report(const PredictionReport& r, const path& dir) {
  ordered_json j{{"model_id", r.model_id},
                 {"held_out_task_id", r.held_out_task_id},
                 {"basis_condition", basis_condition_name(r.condition)},
                 {"sigma_k", r.config.sigma_k},
                 {"lambda", r.config.lambda},
                 {"lambda_used", r.lambda_used},
                 {"r2", r.r2},
                 {"pearson_r2", r.r2},
                 {"r2_degenerate", r.r2_degenerate},
                 {"mae", r.mae},
                 {"mae_clipped", r.mae_clipped},
                 {"grid", r.grid},
                 {"truth", r.truth},
                 {"predicted", r.predicted.raw},
                 {"predicted_clipped", r.predicted.clipped},
                 {"basis_task_ids", r.basis_task_ids}};
  const std::string stem = task_file_stem(r.held_out_task_id);
  write_text_file(dir / (stem + ".json"), j.dump(2) + "\n");
  std::string tsv = "step\ttruth\tpredicted\n";
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    tsv += format_double(r.grid[i]) + '\t' + format_double(r.truth[i]) + '\t' + format_double(r.predicted.raw[i]) + '\n';
  }
  write_text_file(dir / (stem + ".tsv"), tsv);
}

}  // namespace

std::string predict(const PredictArgs& a) {
  const TrajectoryStore store = load_store(a.store);
  const auto fvs = read_fvecs(a.fvs);
  const ConfigSource src = load_config_source(a.config);
  std::vector<BasisCondition> conditions;
  for (const auto& c : a.conditions) {
    if (c == "both") {
      conditions = {BasisCondition::all_tasks, BasisCondition::simple_only};
      break;
    }
    conditions.push_back(parse_basis_condition(c));
  }
  if (conditions.empty()) throw Error(Errc::invalid_argument, "predict: no basis condition");
  std::vector<std::string> models = a.model ? std::vector<std::string>{*a.model} : store.models();

  ordered_json summary;
  summary["models"] = ordered_json::array();
  summary["out"] = a.out.string();
  for (const auto& model : models) {
    if (store.tasks(model).empty()) throw Error(Errc::invalid_argument, "no trajectories for model " + model);
    KernelConfig cfg;
    bool have = false;
    std::string source;
    if (src.single) {
      cfg = *src.single;
      have = true;
      source = "config";
    } else if (const auto* p = find_preset(src.presets, model)) {
      cfg.sigma_k = p->sigma_k;
      cfg.lambda = p->lambda;
      cfg.extraction = p->extraction;
      cfg.layer = p->layer;
      have = true;
      source = "preset";
    }
    TaskFvMap task_fvs = select_task_fvs(fvs, model, cfg.extraction, cfg.layer);
    if (task_fvs.empty() && have && source == "preset") {
      log::warn("no FVs for ", model, " at the preset extraction/layer; using every task-level FV of the model");
      cfg.extraction.clear();
      cfg.layer.reset();
      task_fvs = select_task_fvs(fvs, model);
    }
    ordered_json mj;
    mj["model_id"] = model;
    if (a.tune) {
      const auto sig = default_sigma_grid();
      const auto lam = default_lambda_grid();
      const auto t = tune_kernel(store, model, task_fvs, sig, lam, cfg);
      cfg = t.best;
      have = true;
      source = "tuned";
      mj["tuning_mae"] = t.best_mae;
    }
    if (!have) {
      throw Error(Errc::invalid_argument, "no kernel config for model " + model + "; pass --config or --tune");
    }
    mj["config_source"] = source;
    mj["sigma_k"] = cfg.sigma_k;
    mj["lambda"] = cfg.lambda;
    mj["conditions"] = ordered_json::array();
    std::vector<double> maes;
    for (const auto cond : conditions) {
      LooOptions o;
      o.config = cfg;
      o.condition = cond;
      o.smooth_sigma = a.smooth_sigma;
      o.epsilon = a.epsilon;
      o.targets = a.targets;
      const auto sum = loo_evaluate(store, model, task_fvs, o);
      const path dir = a.out / task_file_stem(model) / std::string(basis_condition_name(cond));
      for (const auto& r : sum.reports) write_report(r, dir);
      ordered_json skipped = ordered_json::array();
      for (const auto& s : sum.skipped) skipped.push_back({{"task_id", s.task_id}, {"reason", s.reason}});
      ordered_json per_task = ordered_json::array();
      for (const auto& r : sum.reports) {
        per_task.push_back({{"task_id", r.held_out_task_id}, {"r2", r.r2}, {"mae", r.mae}, {"n_basis", r.basis_task_ids.size()}});
      }
      mj["conditions"].push_back({{"condition", basis_condition_name(cond)},
                                  {"n_evaluated", sum.reports.size()},
                                  {"n_skipped", sum.skipped.size()},
                                  {"mean_r2", sum.mean_r2},
                                  {"mean_mae", sum.mean_mae},
                                  {"mean_mae_clipped", sum.mean_mae_clipped},
                                  {"tasks", std::move(per_task)},
                                  {"skipped", std::move(skipped)}});
      maes.push_back(sum.mean_mae);
    }
    if (conditions.size() == 2) mj["delta_mae"] = maes[1] - maes[0];
    summary["models"].push_back(std::move(mj));
  }
  write_text_file(a.out / "summary.json", summary.dump(2) + "\n");
  return summary.dump();
}

std::string simulate(const SyntheticParams& params, const path& out) {
  const auto world = generate_world(params);
  write_world(world, out);
  std::size_t composites = 0;
  for (const auto& t : world.models.front().tasks) composites += t.composite ? 1 : 0;
  ordered_json s{{"seed", params.seed},
                 {"n_tasks", world.models.front().tasks.size()},
                 {"n_composites", composites},
                 {"n_models", world.models.size()},
                 {"n_checkpoints", world.grid.size()},
                 {"n_edges", world.edges.size()},
                 {"horizon", world.horizon()},
                 {"out", out.string()}};
  return s.dump();
}

}  // namespace curriculum::commands
