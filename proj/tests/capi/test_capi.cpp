#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "curriculum/curriculum.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::path(CURRICULUM_TEST_TMP) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string take(char* s) {
  std::string out = s ? s : "";
  cur_string_free(s);
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes a noiseless two-model world and returns its directory.
fs::path simulate(const std::string& name, int inversion = 0) {
  const auto dir = scratch(name);
  cur_simulate_options o;
  cur_simulate_options_init(&o);
  o.seed = 17;
  o.inversion = inversion;
  const std::string out = (dir / "world").string();
  o.out = out.c_str();
  char* summary = nullptr;
  REQUIRE(cur_simulate(&o, &summary) == CUR_OK);
  CHECK(json::parse(take(summary))["n_tasks"] == 40);
  return dir;
}

}  // namespace

TEST_CASE("capi: version, status names and error reporting") {
  CHECK(std::string(cur_version()) == "1.0.0");
  CHECK(std::string(cur_status_name(CUR_OK)) == "ok");
  CHECK(std::string(cur_status_name(CUR_E_PARSE_ERROR)) == "ParseError");
  CHECK(std::string(cur_status_name(static_cast<cur_status>(99))) == "unknown");

  cur_definition d;
  CHECK(cur_definition_parse("abs:0.8:k3", &d) == CUR_OK);
  CHECK(d.relative == 0);
  CHECK(d.threshold == 0.8);
  CHECK(d.stability_k == 3);
  CHECK(std::string(cur_last_error()).empty());
  CHECK(cur_definition_parse("abs:1.5", &d) == CUR_E_PARSE_ERROR);
  CHECK(std::string(cur_last_error()).find("1.5") != std::string::npos);
  CHECK(cur_definition_parse(nullptr, &d) == CUR_E_INVALID_ARGUMENT);
  CHECK(cur_set_log_level("loud") == CUR_E_INVALID_ARGUMENT);
  CHECK(cur_set_log_level("error") == CUR_OK);
}

TEST_CASE("capi: compose, score and chain errors") {
  const char* chain[] = {"present_to_gerund", "uppercase"};
  char* out = nullptr;
  REQUIRE(cur_compose(nullptr, chain, 2, "run", &out) == CUR_OK);
  CHECK(take(out) == "[\"RUNNING\"]");
  const char* bad[] = {"uppercase", "present_to_gerund"};
  CHECK(cur_compose(nullptr, bad, 2, "run", &out) == CUR_E_CHAIN_DOMAIN_ERROR);
  CHECK(cur_last_error_position() == 1);
  const char* unknown[] = {"rot13"};
  CHECK(cur_compose(nullptr, unknown, 1, "run", &out) == CUR_E_UNKNOWN_OPERATION);

  const char* golds[] = {"running"};
  int ok = -1;
  REQUIRE(cur_score_exact_match(" running\nmore", golds, 1, &ok) == CUR_OK);
  CHECK(ok == 1);
  REQUIRE(cur_score_exact_match("Running", golds, 1, &ok) == CUR_OK);
  CHECK(ok == 0);
}

TEST_CASE("capi: suite build, write, load and prompts") {
  cur_suite_options o;
  cur_suite_options_init(&o);
  o.seed = 3;
  cur_suite* s = nullptr;
  REQUIRE(cur_suite_build(&o, &s) == CUR_OK);
  CHECK(cur_suite_task_count(s) == 86);
  CHECK(cur_suite_composite_count(s) == 38);
  CHECK(cur_suite_edge_count(s) > 38);
  const auto dir = scratch("suite");
  REQUIRE(cur_suite_write(s, dir.string().c_str()) == CUR_OK);
  cur_suite* back = nullptr;
  REQUIRE(cur_suite_load(dir.string().c_str(), &back) == CUR_OK);
  CHECK(cur_suite_instance_count(back) == cur_suite_instance_count(s));
  char* m1 = nullptr;
  char* m2 = nullptr;
  REQUIRE(cur_suite_manifest_json(s, &m1) == CUR_OK);
  REQUIRE(cur_suite_manifest_json(back, &m2) == CUR_OK);
  CHECK(take(m1) == take(m2));

  char* inst = nullptr;
  REQUIRE(cur_suite_instances_json(s, "compositional:gerund_upper", &inst) == CUR_OK);
  const auto items = json::parse(take(inst));
  CHECK(items[0]["input"] == "run");
  CHECK(items[0]["golds"][0] == "RUNNING");

  char* p = nullptr;
  REQUIRE(cur_suite_render_prompt(s, "simple_icl:present_to_gerund", 0, 2, 7, &p) == CUR_OK);
  const auto prompt = take(p);
  CHECK(prompt.substr(prompt.size() - 9) == "Q: run\nA:");
  CHECK(cur_suite_render_prompt(s, "nope", 0, 2, 7, &p) == CUR_E_INVALID_ARGUMENT);
  CHECK(cur_suite_render_prompt(s, "simple_icl:present_to_gerund", 0, 100000, 7, &p) == CUR_E_NOT_ENOUGH_INSTANCES);
  cur_suite_free(back);
  cur_suite_free(s);

  o.include = "string_ops,morphology";
  REQUIRE(cur_suite_build(&o, &s) == CUR_OK);
  CHECK(cur_suite_composite_count(s) > 0);
  CHECK(cur_suite_composite_count(s) < 38);
  cur_suite_free(s);
  o.include = "astrology";
  CHECK(cur_suite_build(&o, &s) == CUR_E_PARSE_ERROR);
}

TEST_CASE("capi: store, emergence and analyses") {
  const auto dir = simulate("analysis");
  const std::string csv = (dir / "world" / "trajectories.csv").string();
  const char* files[] = {csv.c_str()};
  cur_store* store = nullptr;
  REQUIRE(cur_store_ingest(files, 1, &store) == CUR_OK);
  CHECK(cur_store_model_count(store) == 2);
  CHECK(cur_store_series_count(store) == 80);
  CHECK(cur_store_point_count(store) == 1600);
  CHECK(cur_store_warning_count(store) == 0);
  REQUIRE(cur_store_save(store, (dir / "store").string().c_str()) == CUR_OK);
  cur_store* reopened = nullptr;
  REQUIRE(cur_store_open((dir / "store").string().c_str(), &reopened) == CUR_OK);
  CHECK(cur_store_point_count(reopened) == 1600);

  const char* defs[] = {"abs:0.5", "abs:0.8"};
  cur_emergence* em = nullptr;
  REQUIRE(cur_emergence_compute(reopened, defs, 2, nullptr, &em) == CUR_OK);
  CHECK(cur_emergence_count(em) == 160);
  CHECK(cur_emergence_emerged_count(em) <= 160);
  const auto em_path = (dir / "emergence.csv").string();
  REQUIRE(cur_emergence_write(em, em_path.c_str()) == CUR_OK);
  cur_emergence* em2 = nullptr;
  REQUIRE(cur_emergence_read(em_path.c_str(), &em2) == CUR_OK);
  CHECK(cur_emergence_count(em2) == 160);

  char* summary = nullptr;
  REQUIRE(cur_correlate(em2, nullptr, (dir / "corr.csv").string().c_str(), &summary) == CUR_OK);
  const auto corr = json::parse(take(summary));
  CHECK(corr["definitions"].size() == 2);
  CHECK(corr["definitions"][0]["mean_rho"] == 1.0);
  CHECK(slurp(dir / "corr.csv").rfind("definition,model_a,model_b,n,rho,p,p_method,degenerate\n", 0) == 0);

  REQUIRE(cur_violations(em2, (dir / "world" / "manifest.json").string().c_str(),
                         (dir / "violations.json").string().c_str(), &summary) == CUR_OK);
  const auto viol = json::parse(take(summary));
  for (const auto& d : viol["definitions"]) CHECK(d["strong_inversions"] == 0);
  const auto report = json::parse(slurp(dir / "violations.json"));
  CHECK(report["definitions"][0]["models"].size() == 2);

  REQUIRE(cur_heatmap_data(em2, "abs:0.5", (dir / "heat.tsv").string().c_str(), &summary) == CUR_OK);
  CHECK(json::parse(take(summary))["n_tasks"] == 40);
  CHECK(cur_heatmap_data(em2, "rel:0.3", (dir / "heat.tsv").string().c_str(), &summary) == CUR_E_INVALID_ARGUMENT);

  const double a[] = {1, 2, 3, 4, 5}, b[] = {1, 3, 2, 5, 4};
  double rho = 0, p = 0;
  REQUIRE(cur_spearman(a, b, 5, &rho, &p) == CUR_OK);
  CHECK(std::fabs(rho - 0.8) < 1e-15);
  CHECK(cur_spearman(a, b, 2, &rho, &p) == CUR_E_TOO_FEW_SHARED_TASKS);

  CHECK(cur_store_open((dir / "missing").string().c_str(), &store) == CUR_E_IO_ERROR);
  cur_emergence_free(em2);
  cur_emergence_free(em);
  cur_store_free(reopened);
  cur_store_free(store);
}

TEST_CASE("capi: fvec handles") {
  const float values[] = {0.5f, -0.0f, 1e-40f, 3.0f};
  const char* meta =
      R"({"model_id":"m","task_id":"compositional:x","extraction":"cie_heads","layer":4,"heads":[[4,1],[4,2]],)"
      R"("n_correct_prompts":3,"checkpoint_tokens_b":20})";
  cur_fvec* fv = nullptr;
  REQUIRE(cur_fvec_create(values, 4, meta, &fv) == CUR_OK);
  const auto dir = scratch("fvec");
  const auto path = (dir / "x.fvec").string();
  REQUIRE(cur_fvec_write(fv, path.c_str()) == CUR_OK);
  cur_fvec* back = nullptr;
  REQUIRE(cur_fvec_read(path.c_str(), &back) == CUR_OK);
  REQUIRE(cur_fvec_dim(back) == 4);
  CHECK(std::memcmp(cur_fvec_data(back), values, sizeof values) == 0);
  char* m1 = nullptr;
  REQUIRE(cur_fvec_metadata_json(back, &m1) == CUR_OK);
  CHECK(json::parse(take(m1)) == json::parse(meta));
  cur_fvec_free(back);
  cur_fvec_free(fv);
  CHECK(cur_fvec_create(values, 4, R"({"model_id":"m"})", &fv) == CUR_E_MALFORMED_FILE);
  { std::ofstream(dir / "junk.fvec") << "junk"; }
  CHECK(cur_fvec_read((dir / "junk.fvec").string().c_str(), &fv) == CUR_E_MALFORMED_FILE);
}

TEST_CASE("capi: predict and simulate are deterministic") {
  const auto d1 = simulate("predict_a");
  const auto d2 = simulate("predict_b");
  std::string summaries[2];
  int i = 0;
  for (const auto& dir : {d1, d2}) {
    const std::string csv = (dir / "world" / "trajectories.csv").string();
    const char* files[] = {csv.c_str()};
    cur_store* store = nullptr;
    REQUIRE(cur_store_ingest(files, 1, &store) == CUR_OK);
    REQUIRE(cur_store_save(store, (dir / "store").string().c_str()) == CUR_OK);
    cur_store_free(store);
    { std::ofstream(dir / "kernel.json") << R"({"sigma_k":0.5,"lambda":0.0001})"; }
    cur_predict_options o;
    cur_predict_options_init(&o);
    const std::string st = (dir / "store").string(), fvs = (dir / "world" / "fvs").string(),
                      cfg = (dir / "kernel.json").string(), out = (dir / "reports").string();
    o.store = st.c_str();
    o.fvs = fvs.c_str();
    o.config = cfg.c_str();
    o.out = out.c_str();
    o.condition = "both";
    char* summary = nullptr;
    REQUIRE(cur_predict(&o, &summary) == CUR_OK);
    summaries[i++] = take(summary);
    const auto j = json::parse(summaries[i - 1]);
    REQUIRE(j["models"].size() == 2);
    const auto& all = j["models"][0]["conditions"][0];
    CHECK(all["condition"] == "all_tasks");
    CHECK(all["mean_r2"].get<double>() > 0.95);
    CHECK(fs::exists(dir / "reports" / "summary.json"));
    CHECK(fs::exists(dir / "reports" / "synthetic_m00" / "all_tasks" / "compositional__synthetic_c00.json"));
    CHECK(fs::exists(dir / "reports" / "synthetic_m00" / "simple_only" / "compositional__synthetic_c00.tsv"));
    o.condition = "neither";
    CHECK(cur_predict(&o, &summary) == CUR_E_PARSE_ERROR);
  }
  json a = json::parse(summaries[0]), b = json::parse(summaries[1]);
  a.erase("out");
  b.erase("out");
  CHECK(a == b);
  CHECK(slurp(d1 / "world" / "trajectories.csv") == slurp(d2 / "world" / "trajectories.csv"));
  CHECK(slurp(d1 / "reports" / "synthetic_m01" / "all_tasks" / "compositional__synthetic_c02.json") ==
        slurp(d2 / "reports" / "synthetic_m01" / "all_tasks" / "compositional__synthetic_c02.json"));
}

TEST_CASE("capi: calibrate selects the cleaner layer") {
  const auto dir = scratch("calibrate");
  std::mt19937_64 g(2);
  std::normal_distribution<float> n(0, 1);
  std::vector<std::vector<float>> centers(6, std::vector<float>(16));
  for (auto& c : centers) {
    for (auto& x : c) x = n(g);
  }
  const char* tasks[] = {"a", "b", "c", "d", "e", "compositional:f"};
  for (int k = 0; k < 16; ++k) centers[5][k] = centers[0][k] + centers[1][k];
  for (int layer : {1, 2}) {
    const float noise = layer == 1 ? 0.02f : 1.5f;
    for (int t = 0; t < 6; ++t) {
      for (int p = 0; p < 6; ++p) {
        std::vector<float> v(16);
        for (int k = 0; k < 16; ++k) v[k] = centers[t][k] + noise * n(g);
        json m{{"model_id", "m"}, {"task_id", tasks[t]}, {"extraction", "hidden_state"}, {"layer", layer},
               {"heads", json::array()}, {"n_correct_prompts", 6}, {"checkpoint_tokens_b", 10}, {"prompt_index", p}};
        cur_fvec* fv = nullptr;
        REQUIRE(cur_fvec_create(v.data(), v.size(), m.dump().c_str(), &fv) == CUR_OK);
        const auto path = dir / "fvs" / ("l" + std::to_string(layer) + "_" + std::to_string(t) + "_" +
                                         std::to_string(p) + ".fvec");
        REQUIRE(cur_fvec_write(fv, path.string().c_str()) == CUR_OK);
        cur_fvec_free(fv);
      }
    }
  }
  {
    std::ofstream(dir / "candidates.json")
        << R"([{"label":"noisy","extraction":"hidden_state","layer":2},{"label":"clean","extraction":"hidden_state","layer":1}])";
    std::ofstream(dir / "manifest.json")
        << R"({"tasks":[],"edges":[["a","compositional:f"],["b","compositional:f"]]})";
  }
  cur_calibrate_options o;
  cur_calibrate_options_init(&o);
  const std::string fvs = (dir / "fvs").string(), cand = (dir / "candidates.json").string(),
                    man = (dir / "manifest.json").string(), out = (dir / "scores.json").string();
  o.fvs = fvs.c_str();
  o.candidates = cand.c_str();
  o.manifest = man.c_str();
  o.out = out.c_str();
  char* summary = nullptr;
  REQUIRE(cur_calibrate(&o, &summary) == CUR_OK);
  CHECK(json::parse(take(summary))["winner"] == "clean");
  CHECK(json::parse(slurp(dir / "scores.json"))["scores"].size() == 2);
}
