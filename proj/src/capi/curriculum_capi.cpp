#include "curriculum/curriculum.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <filesystem>
#include <new>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/commands.hpp"
#include "core/emergence.hpp"
#include "core/error.hpp"
#include "core/fvec.hpp"
#include "core/io.hpp"
#include "core/lexicon.hpp"
#include "core/log.hpp"
#include "core/ops.hpp"
#include "core/stats.hpp"
#include "core/task_suite.hpp"
#include "core/text.hpp"
#include "core/trajectory.hpp"

struct cur_suite {
  curriculum::Suite suite;
};
struct cur_store {
  curriculum::TrajectoryStore store;
};
struct cur_emergence {
  std::vector<curriculum::EmergenceResult> results;
};
struct cur_fvec {
  curriculum::FunctionVector fv;
};

namespace {

using namespace curriculum;

struct LastError {
  std::string message;
  long position = -1;
};

LastError& last_error() {
  thread_local LastError e;
  return e;
}

cur_status fail(Errc code, const std::string& message, long position = -1) {
  last_error() = {message, position};
  return static_cast<cur_status>(code);
}

template <typename F>
cur_status guarded(F&& body) {
  try {
    body();
    last_error() = {};
    return CUR_OK;
  } catch (const Error& e) {
    return fail(e.code(), e.what(), e.position() ? static_cast<long>(*e.position()) : -1);
  } catch (const std::bad_alloc&) {
    return fail(Errc::internal, "out of memory");
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(Errc::io_error, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(Errc::parse_error, e.what());
  } catch (const std::exception& e) {
    return fail(Errc::internal, e.what());
  } catch (...) {
    return fail(Errc::internal, "unknown exception");
  }
}

void require(const void* p, const char* what) {
  if (!p) throw Error(Errc::invalid_argument, std::string(what) + " is NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void put_string(char** out, const std::string& s) {
  require(out, "output pointer");
  *out = dup_string(s);
}

std::optional<std::string> opt(const char* s) {
  if (!s || !*s) return std::nullopt;
  return std::string(s);
}

std::vector<std::string> split_list(const char* s) {
  std::vector<std::string> out;
  if (!s) return out;
  std::string_view rest = s;
  while (true) {
    const auto comma = rest.find(',');
    const auto t = text::trim(rest.substr(0, comma));
    if (!t.empty()) out.emplace_back(t);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

std::vector<std::string> string_array(const char* const* items, size_t n, const char* what) {
  if (n > 0) require(items, what);
  std::vector<std::string> out;
  for (size_t i = 0; i < n; ++i) {
    require(items[i], what);
    out.emplace_back(items[i]);
  }
  return out;
}

LexiconSet lexicons_for(const char* data_dir) {
  return load_lexicons(data_dir && *data_dir ? std::filesystem::path(data_dir) : default_data_dir());
}

}  // namespace

extern "C" {

const char* cur_version(void) { return "1.0.0"; }

const char* cur_status_name(cur_status status) {
  const int s = static_cast<int>(status);
  if (s < 0 || s > static_cast<int>(Errc::internal)) return "unknown";
  return errc_name(static_cast<Errc>(s)).data();
}

const char* cur_last_error(void) { return last_error().message.c_str(); }

long cur_last_error_position(void) { return last_error().position; }

cur_status cur_set_log_level(const char* level) {
  return guarded([&] {
    require(level, "level");
    const std::string l = level;
    if (l == "debug") {
      log::set_threshold(log::Level::debug);
    } else if (l == "info") {
      log::set_threshold(log::Level::info);
    } else if (l == "warn") {
      log::set_threshold(log::Level::warn);
    } else if (l == "error") {
      log::set_threshold(log::Level::error);
    } else if (l == "off") {
      log::set_threshold(log::Level::off);
    } else {
      throw Error(Errc::invalid_argument, "unknown log level '" + l + "'");
    }
  });
}

void cur_string_free(char* s) { std::free(s); }

cur_status cur_compose(const char* data_dir, const char* const* chain, size_t n_ops, const char* input,
                       char** out_json) {
  return guarded([&] {
    require(input, "input");
    const auto ops = string_array(chain, n_ops, "chain");
    const auto lex = lexicons_for(data_dir);
    put_string(out_json, nlohmann::json(compose(ops, input, lex)).dump());
  });
}

cur_status cur_score_exact_match(const char* prediction, const char* const* golds, size_t n_golds, int* out_correct) {
  return guarded([&] {
    require(prediction, "prediction");
    require(out_correct, "out_correct");
    const auto g = string_array(golds, n_golds, "golds");
    *out_correct = score_exact_match(prediction, g);
  });
}

void cur_suite_options_init(cur_suite_options* o) {
  if (o) *o = cur_suite_options{nullptr, 0, nullptr, nullptr, 0};
}

cur_status cur_suite_build(const cur_suite_options* o, cur_suite** out) {
  return guarded([&] {
    require(o, "options");
    require(out, "out");
    SuiteConfig cfg;
    cfg.seed = o->seed;
    if (o->include && *o->include) {
      std::set<Category> cats;
      for (const auto& c : split_list(o->include)) cats.insert(parse_category(c));
      cfg.include = std::move(cats);
    }
    if (o->frct_items && *o->frct_items) cfg.frct_items = std::filesystem::path(o->frct_items);
    cfg.diacritic_aliases = o->diacritic_aliases != 0;
    const auto lex = lexicons_for(o->data_dir);
    *out = new cur_suite{build_suite(cfg, lex)};
  });
}

cur_status cur_suite_load(const char* dir, cur_suite** out) {
  return guarded([&] {
    require(dir, "dir");
    require(out, "out");
    *out = new cur_suite{load_suite(dir)};
  });
}

cur_status cur_suite_write(const cur_suite* s, const char* dir) {
  return guarded([&] {
    require(s, "suite");
    require(dir, "dir");
    write_suite(s->suite, dir);
  });
}

size_t cur_suite_task_count(const cur_suite* s) { return s ? s->suite.manifest.tasks.size() : 0; }

size_t cur_suite_composite_count(const cur_suite* s) {
  if (!s) return 0;
  size_t n = 0;
  for (const auto& t : s->suite.manifest.tasks) n += t.components.empty() ? 0 : 1;
  return n;
}

size_t cur_suite_edge_count(const cur_suite* s) { return s ? s->suite.manifest.edges.size() : 0; }

size_t cur_suite_instance_count(const cur_suite* s) { return s ? s->suite.instances.size() : 0; }

cur_status cur_suite_manifest_json(const cur_suite* s, char** out_json) {
  return guarded([&] {
    require(s, "suite");
    put_string(out_json, manifest_to_json(s->suite.manifest));
  });
}

cur_status cur_suite_instances_json(const cur_suite* s, const char* task_id, char** out_json) {
  return guarded([&] {
    require(s, "suite");
    require(task_id, "task_id");
    if (!s->suite.manifest.find(task_id)) throw Error(Errc::invalid_argument, std::string("unknown task ") + task_id);
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto* inst : s->suite.instances_of(task_id)) {
      arr.push_back({{"input", inst->input}, {"golds", inst->golds}});
    }
    put_string(out_json, arr.dump());
  });
}

cur_status cur_suite_render_prompt(const cur_suite* s, const char* task_id, size_t query_index, size_t n_shots,
                                   uint64_t seed, char** out_prompt) {
  return guarded([&] {
    require(s, "suite");
    require(task_id, "task_id");
    const auto* spec = s->suite.manifest.find(task_id);
    if (!spec) throw Error(Errc::invalid_argument, std::string("unknown task ") + task_id);
    std::vector<TaskInstance> inst;
    for (const auto* p : s->suite.instances_of(task_id)) inst.push_back(*p);
    put_string(out_prompt, render_prompt(*spec, inst, query_index, n_shots, seed));
  });
}

void cur_suite_free(cur_suite* s) { delete s; }

cur_status cur_store_ingest(const char* const* files, size_t n_files, cur_store** out) {
  return guarded([&] {
    require(out, "out");
    const auto names = string_array(files, n_files, "files");
    if (names.empty()) throw Error(Errc::invalid_argument, "no trajectory files given");
    std::vector<std::filesystem::path> paths(names.begin(), names.end());
    *out = new cur_store{ingest_files(paths)};
  });
}

cur_status cur_store_open(const char* dir, cur_store** out) {
  return guarded([&] {
    require(dir, "dir");
    require(out, "out");
    *out = new cur_store{load_store(dir)};
  });
}

cur_status cur_store_save(const cur_store* s, const char* dir) {
  return guarded([&] {
    require(s, "store");
    require(dir, "dir");
    save_store(s->store, dir);
  });
}

size_t cur_store_model_count(const cur_store* s) { return s ? s->store.models().size() : 0; }
size_t cur_store_series_count(const cur_store* s) { return s ? s->store.series_count() : 0; }
size_t cur_store_point_count(const cur_store* s) { return s ? s->store.point_count() : 0; }
size_t cur_store_warning_count(const cur_store* s) { return s ? s->store.warnings().size() : 0; }
void cur_store_free(cur_store* s) { delete s; }

cur_status cur_definition_parse(const char* text, cur_definition* out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    const auto d = parse_definition(text);
    out->relative = d.kind == EmergenceDefinition::Kind::relative ? 1 : 0;
    out->threshold = d.threshold;
    out->stability_k = d.stability_k;
  });
}

cur_status cur_emergence_compute(const cur_store* s, const char* const* definitions, size_t n_definitions,
                                 const double* horizon, cur_emergence** out) {
  return guarded([&] {
    require(s, "store");
    require(out, "out");
    std::vector<EmergenceDefinition> defs;
    for (const auto& d : string_array(definitions, n_definitions, "definitions")) defs.push_back(parse_definition(d));
    if (defs.empty()) throw Error(Errc::invalid_argument, "no emergence definitions given");
    std::optional<double> h;
    if (horizon) h = *horizon;
    *out = new cur_emergence{compute_emergence(s->store, defs, h)};
  });
}

cur_status cur_emergence_read(const char* path, cur_emergence** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new cur_emergence{emergence_from_csv(read_text_file(path), path)};
  });
}

cur_status cur_emergence_write(const cur_emergence* e, const char* path) {
  return guarded([&] {
    require(e, "emergence");
    require(path, "path");
    write_text_file(path, emergence_to_csv(e->results));
  });
}

size_t cur_emergence_count(const cur_emergence* e) { return e ? e->results.size() : 0; }

size_t cur_emergence_emerged_count(const cur_emergence* e) {
  if (!e) return 0;
  size_t n = 0;
  for (const auto& r : e->results) n += r.emerged() ? 1 : 0;
  return n;
}

void cur_emergence_free(cur_emergence* e) { delete e; }

cur_status cur_correlate(const cur_emergence* e, const char* definition, const char* out_path, char** out_summary) {
  return guarded([&] {
    require(e, "emergence");
    require(out_path, "out_path");
    put_string(out_summary, commands::correlate(e->results, opt(definition), out_path));
  });
}

cur_status cur_violations(const cur_emergence* e, const char* manifest_path, const char* out_path,
                          char** out_summary) {
  return guarded([&] {
    require(e, "emergence");
    require(manifest_path, "manifest_path");
    require(out_path, "out_path");
    put_string(out_summary, commands::violations(e->results, manifest_path, out_path));
  });
}

cur_status cur_heatmap_data(const cur_emergence* e, const char* definition, const char* out_path,
                            char** out_summary) {
  return guarded([&] {
    require(e, "emergence");
    require(out_path, "out_path");
    put_string(out_summary, commands::heatmap_data(e->results, opt(definition), out_path));
  });
}

cur_status cur_spearman(const double* a, const double* b, size_t n, double* out_rho, double* out_p) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    require(out_rho, "out_rho");
    const auto r = spearman(std::span<const double>(a, n), std::span<const double>(b, n));
    *out_rho = r.rho;
    if (out_p) *out_p = r.p;
  });
}

cur_status cur_fvec_create(const float* values, size_t dim, const char* metadata_json, cur_fvec** out) {
  return guarded([&] {
    require(values, "values");
    require(metadata_json, "metadata_json");
    require(out, "out");
    FunctionVector fv;
    fv.meta = metadata_from_json(metadata_json);
    fv.values.assign(values, values + dim);
    validate(fv);
    *out = new cur_fvec{std::move(fv)};
  });
}

cur_status cur_fvec_read(const char* path, cur_fvec** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new cur_fvec{read_fvec(path)};
  });
}

cur_status cur_fvec_write(const cur_fvec* fv, const char* path) {
  return guarded([&] {
    require(fv, "fvec");
    require(path, "path");
    write_fvec(fv->fv, path);
  });
}

size_t cur_fvec_dim(const cur_fvec* fv) { return fv ? fv->fv.values.size() : 0; }
const float* cur_fvec_data(const cur_fvec* fv) { return fv ? fv->fv.values.data() : nullptr; }

cur_status cur_fvec_metadata_json(const cur_fvec* fv, char** out_json) {
  return guarded([&] {
    require(fv, "fvec");
    put_string(out_json, metadata_to_json(fv->fv.meta));
  });
}

void cur_fvec_free(cur_fvec* fv) { delete fv; }

void cur_calibrate_options_init(cur_calibrate_options* o) {
  if (o) *o = cur_calibrate_options{nullptr, nullptr, nullptr, nullptr, 0};
}

cur_status cur_calibrate(const cur_calibrate_options* o, char** out_summary) {
  return guarded([&] {
    require(o, "options");
    require(o->fvs, "fvs");
    require(o->candidates, "candidates");
    require(o->out, "out");
    commands::CalibrateArgs a;
    a.fvs = o->fvs;
    a.candidates = o->candidates;
    if (auto m = opt(o->manifest)) a.manifest = std::filesystem::path(*m);
    a.out = o->out;
    a.seed = o->seed;
    put_string(out_summary, commands::calibrate(a));
  });
}

void cur_predict_options_init(cur_predict_options* o) {
  if (o) {
    *o = cur_predict_options{nullptr, nullptr, nullptr, "all", nullptr, nullptr, nullptr, 0,
                             kDefaultSmoothSigma, kDefaultVarianceEpsilon};
  }
}

cur_status cur_predict(const cur_predict_options* o, char** out_summary) {
  return guarded([&] {
    require(o, "options");
    require(o->store, "store");
    require(o->fvs, "fvs");
    require(o->out, "out");
    commands::PredictArgs a;
    a.store = o->store;
    a.fvs = o->fvs;
    if (auto c = opt(o->config)) a.config = std::filesystem::path(*c);
    a.conditions = {o->condition ? std::string(o->condition) : std::string("all")};
    a.out = o->out;
    a.model = opt(o->model);
    a.targets = split_list(o->targets);
    a.tune = o->tune != 0;
    a.smooth_sigma = o->smooth_sigma;
    a.epsilon = o->epsilon;
    put_string(out_summary, commands::predict(a));
  });
}

void cur_simulate_options_init(cur_simulate_options* o) {
  if (!o) return;
  const SyntheticParams d;
  *o = cur_simulate_options{d.seed, d.n_tasks, d.n_models, d.n_checkpoints, d.dim, d.traj_noise, d.fv_noise,
                            d.t_min, d.t_max, d.inversion_shift, d.model_jitter, 0, nullptr};
}

cur_status cur_simulate(const cur_simulate_options* o, char** out_summary) {
  return guarded([&] {
    require(o, "options");
    require(o->out, "out");
    SyntheticParams p;
    p.seed = o->seed;
    p.n_tasks = o->n_tasks;
    p.n_models = o->n_models;
    p.n_checkpoints = o->n_checkpoints;
    p.dim = o->dim;
    p.traj_noise = o->traj_noise;
    p.fv_noise = o->fv_noise;
    p.t_min = o->t_min;
    p.t_max = o->t_max;
    p.inversion_shift = o->inversion_shift;
    p.model_jitter = o->model_jitter;
    p.mode = o->inversion ? SyntheticMode::inversion : SyntheticMode::consistent;
    put_string(out_summary, commands::simulate(p, o->out));
  });
}

}  // extern "C"
