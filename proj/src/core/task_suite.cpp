#include "core/task_suite.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "core/error.hpp"
#include "core/generators.hpp"
#include "core/io.hpp"
#include "core/log.hpp"
#include "core/ops.hpp"
#include "core/rng.hpp"
#include "core/task_catalog.hpp"
#include "core/text.hpp"

namespace curriculum {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::array<std::pair<Category, std::string_view>, 8> kCategoryNames{{
    {Category::string_ops, "string_ops"},
    {Category::morphology, "morphology"},
    {Category::translation, "translation"},
    {Category::world_knowledge, "world_knowledge"},
    {Category::arithmetic, "arithmetic"},
    {Category::logic, "logic"},
    {Category::reading_comprehension, "reading_comprehension"},
    {Category::frct_placeholder, "frct_placeholder"},
}};

std::string prepare(std::string_view key, InputPrep prep) {
  switch (prep) {
    case InputPrep::upper:
      return text::to_upper(key);
    case InputPrep::lower:
      return text::to_lower(key);
    case InputPrep::none:
      break;
  }
  return std::string(key);
}

std::uint64_t task_seed(std::uint64_t seed, std::string_view task_id) {
  // splitmix64 finalizer over the combined value
  std::uint64_t z = seed ^ text::fnv1a64(task_id);
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::map<std::string, std::vector<std::pair<std::string, std::vector<std::string>>>> load_frct_items(
    const std::filesystem::path& path) {
  std::map<std::string, std::vector<std::pair<std::string, std::vector<std::string>>>> out;
  std::istringstream in(read_text_file(path));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      const json j = json::parse(line);
      auto golds = j.at("golds").get<std::vector<std::string>>();
      if (golds.empty()) throw Error(Errc::malformed_record, "empty golds");
      out[j.at("task_id").get<std::string>()].emplace_back(j.at("input").get<std::string>(), std::move(golds));
    } catch (const json::exception& e) {
      throw Error(Errc::malformed_record, path.string() + ":" + std::to_string(line_no) + ": " + e.what(), line_no);
    } catch (const Error& e) {
      throw Error(Errc::malformed_record, path.string() + ":" + std::to_string(line_no) + ": " + e.what(), line_no);
    }
  }
  return out;
}

bool chain_translates(const std::vector<std::string>& chain) {
  return std::any_of(chain.begin(), chain.end(), [](const std::string& op) { return op.rfind("translate_", 0) == 0; });
}

void add_diacritic_aliases(std::vector<std::string>& golds) {
  const std::size_t n = golds.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::string alias = text::strip_diacritics(golds[i]);
    if (std::find(golds.begin(), golds.end(), alias) == golds.end()) golds.push_back(std::move(alias));
  }
}

std::vector<std::pair<std::string, std::vector<std::string>>> instantiate(
    const TaskRecipe& r, const LexiconSet& lexicons, Rng& rng) {
  std::vector<std::pair<std::string, std::vector<std::string>>> items;
  auto apply = [&](std::string input) {
    auto golds = compose(r.chain, input, lexicons);
    items.emplace_back(std::move(input), std::move(golds));
  };
  switch (r.source) {
    case Source::lexicon_keys: {
      const Lexicon& lex = lexicons.get(r.lexicon);
      if (lex.size() < r.n) {
        throw Error(Errc::count_mismatch, r.task_id + ": lexicon " + r.lexicon + " has " +
                                              std::to_string(lex.size()) + " entries, need " + std::to_string(r.n));
      }
      for (std::size_t i = 0; i < r.n; ++i) apply(prepare(lex.entries()[i].key, r.prep));
      break;
    }
    case Source::sampled_keys: {
      const Lexicon& lex = lexicons.get(r.lexicon);
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < lex.size(); ++i) {
        if (lex.entries()[i].key != r.param) idx.push_back(i);
      }
      rng.shuffle(std::span<std::size_t>(idx));
      if (!r.param.empty() && idx.size() < lex.size()) apply(prepare(r.param, r.prep));
      for (std::size_t i = 0; i < idx.size() && items.size() < r.n; ++i) apply(prepare(lex.entries()[idx[i]].key, r.prep));
      break;
    }
    case Source::alphabet_lower:
    case Source::alphabet_upper:
      for (char c = 'a'; c <= 'z'; ++c) {
        apply(std::string(1, r.source == Source::alphabet_lower ? c : static_cast<char>(c - 'a' + 'A')));
      }
      break;
    case Source::random_strings:
      if (!r.param.empty()) apply(r.param);
      for (auto& v : random_letter_strings(r.n + 1, r.param.empty() ? 8 : r.param.size(), rng)) {
        if (items.size() < r.n && v != r.param) apply(std::move(v));
      }
      break;
    case Source::procedural:
      for (auto& item : generate_items(r.param, r.n, rng)) items.emplace_back(std::move(item.input), std::move(item.golds));
      break;
    case Source::frct:
      break;
  }
  return items;
}

}  // namespace

std::string_view category_name(Category c) noexcept {
  for (const auto& [cat, name] : kCategoryNames) {
    if (cat == c) return name;
  }
  return "unknown";
}

Category parse_category(std::string_view name) {
  for (const auto& [cat, n] : kCategoryNames) {
    if (n == name) return cat;
  }
  throw Error(Errc::parse_error, "unknown category: " + std::string(name));
}

const TaskSpec* SuiteManifest::find(std::string_view task_id) const {
  for (const auto& t : tasks) {
    if (t.task_id == task_id) return &t;
  }
  return nullptr;
}

std::vector<const TaskInstance*> Suite::instances_of(std::string_view task_id) const {
  std::vector<const TaskInstance*> out;
  for (const auto& inst : instances) {
    if (inst.task_id == task_id) out.push_back(&inst);
  }
  return out;
}

std::vector<Edge> derive_edges(std::span<const TaskSpec> tasks) {
  std::vector<Edge> edges;
  for (const auto& t : tasks) {
    for (const auto& op : t.components) {
      Edge e{operation_task_id(op), t.task_id};
      if (std::find(edges.begin(), edges.end(), e) == edges.end()) edges.push_back(std::move(e));
    }
  }
  return edges;
}

std::vector<Edge> catalog_edges() {
  std::vector<TaskSpec> specs;
  for (const auto& r : task_catalog()) {
    if (r.composite) specs.push_back({r.task_id, r.category, r.chain, r.n, AnswerMode::single_gold, 0});
  }
  return derive_edges(specs);
}

void validate_manifest(const SuiteManifest& m) {
  auto fail = [](const std::string& msg) { throw Error(Errc::invalid_argument, "manifest: " + msg); };
  std::set<std::string> ids;
  for (const auto& t : m.tasks) {
    if (!ids.insert(t.task_id).second) fail("duplicate task_id " + t.task_id);
    const bool composite = is_composite_id(t.task_id);
    if (composite != !t.components.empty()) fail("component list does not match task_id prefix for " + t.task_id);
    if (composite && t.components.size() < 2) fail(t.task_id + " has fewer than two components");
    for (const auto& op : t.components) {
      if (!is_registered_operation(op)) fail(t.task_id + " names unregistered operation " + op);
    }
  }
  for (const auto& [pre, comp] : m.edges) {
    const TaskSpec* p = m.find(pre);
    if (p == nullptr || m.find(comp) == nullptr) fail("edge references unknown task " + pre + " -> " + comp);
    // Every edge runs from an elemental task to a composite, so the graph is
    // bipartite and therefore acyclic; checking the orientation suffices.
    if (!p->components.empty() || !is_composite_id(comp)) fail("edge " + pre + " -> " + comp + " is not elemental -> composite");
  }
  auto derived = derive_edges(m.tasks);
  std::erase_if(derived, [&](const Edge& e) { return m.find(e.first) == nullptr; });
  auto expected = derived;
  auto actual = m.edges;
  std::sort(expected.begin(), expected.end());
  std::sort(actual.begin(), actual.end());
  if (expected != actual) fail("edge set differs from the one implied by component lists");
}

Suite build_suite(const SuiteConfig& config, const LexiconSet& lexicons) {
  Suite suite;
  SuiteManifest& m = suite.manifest;
  m.suite_version = std::string(kSuiteVersion);
  m.seed = config.seed;
  for (const auto& [name, sha] : lexicons.checksums()) m.lexicon_checksums.emplace(name, sha);

  std::map<std::string, std::vector<std::pair<std::string, std::vector<std::string>>>> frct_items;
  if (config.frct_items) frct_items = load_frct_items(*config.frct_items);

  const auto included = [&](Category c) { return !config.include || config.include->count(c) > 0; };
  std::set<std::string> present;
  for (const auto& r : task_catalog()) {
    if (!r.composite && included(r.category)) present.insert(r.task_id);
  }

  for (const auto& r : task_catalog()) {
    if (!included(r.category)) continue;
    if (r.composite) {
      const bool parents_present = std::all_of(r.chain.begin(), r.chain.end(), [&](const std::string& op) {
        return present.count(operation_task_id(op)) > 0;
      });
      if (!parents_present) {
        log::info("dropping ", r.task_id, ": a prerequisite category is excluded");
        continue;
      }
    }
    Rng rng(task_seed(config.seed, r.task_id));
    auto items = instantiate(r, lexicons, rng);
    if (r.source == Source::frct) {
      auto it = frct_items.find(r.task_id);
      if (it != frct_items.end()) items = std::move(it->second);
      if (it != frct_items.end() && items.size() != r.n) {
        throw Error(Errc::count_mismatch, r.task_id + ": item file supplies " + std::to_string(items.size()) +
                                              " instances, declared " + std::to_string(r.n));
      }
    } else if (items.size() != r.n) {
      throw Error(Errc::count_mismatch,
                  r.task_id + ": produced " + std::to_string(items.size()) + ", declared " + std::to_string(r.n));
    }

    TaskSpec spec;
    spec.task_id = r.task_id;
    spec.category = r.category;
    if (r.composite) spec.components = r.chain;
    spec.n_instances = r.n;
    spec.instances_emitted = items.size();
    const bool alias = config.diacritic_aliases && chain_translates(r.chain);
    for (std::size_t i = 0; i < items.size(); ++i) {
      TaskInstance inst{r.task_id, std::move(items[i].first), std::move(items[i].second), i};
      if (alias) add_diacritic_aliases(inst.golds);
      if (inst.golds.size() > 1) spec.answer_mode = AnswerMode::any_of_golds;
      suite.instances.push_back(std::move(inst));
    }
    m.tasks.push_back(std::move(spec));
  }
  for (const auto& r : task_catalog()) {
    if (r.source == Source::frct) frct_items.erase(r.task_id);
  }
  for (const auto& [id, _] : frct_items) log::warn("item file names unknown task ", id, "; ignored");

  m.edges = derive_edges(m.tasks);
  validate_manifest(m);
  return suite;
}

std::string render_prompt(const TaskSpec& task, std::span<const TaskInstance> instances, std::size_t query_index,
                          std::size_t n_shots, std::uint64_t seed) {
  if (query_index >= instances.size()) {
    throw Error(Errc::invalid_argument, task.task_id + ": query index " + std::to_string(query_index) +
                                            " out of range (" + std::to_string(instances.size()) + " instances)");
  }
  if (n_shots + 1 > instances.size()) {
    throw Error(Errc::not_enough_instances, task.task_id + ": " + std::to_string(n_shots) + " shots need " +
                                                std::to_string(n_shots + 1) + " instances, have " +
                                                std::to_string(instances.size()));
  }
  std::vector<std::size_t> pool;
  pool.reserve(instances.size() - 1);
  for (std::size_t i = 0; i < instances.size(); ++i) {
    if (i != query_index) pool.push_back(i);
  }
  Rng rng(seed);
  // Partial Fisher-Yates: the first n_shots slots are the sample, in draw order.
  for (std::size_t i = 0; i < n_shots; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  std::string out;
  for (std::size_t i = 0; i < n_shots; ++i) {
    const TaskInstance& d = instances[pool[i]];
    if (d.golds.empty()) throw Error(Errc::invalid_argument, task.task_id + ": demonstration without a gold");
    out += "Q: " + d.input + "\nA: " + d.golds.front() + "\n\n";
  }
  out += "Q: " + instances[query_index].input + "\nA:";
  return out;
}

int score_exact_match(std::string_view prediction, std::span<const std::string> golds) {
  std::size_t b = 0;
  while (b < prediction.size() && std::isspace(static_cast<unsigned char>(prediction[b]))) ++b;
  std::string_view p = prediction.substr(b);
  const auto nl = p.find('\n');
  if (nl != std::string_view::npos) p = p.substr(0, nl);
  while (!p.empty() && std::isspace(static_cast<unsigned char>(p.back()))) p.remove_suffix(1);
  for (const auto& g : golds) {
    if (p == g) return 1;
  }
  return 0;
}

std::string manifest_to_json(const SuiteManifest& m) {
  ordered_json j;
  j["suite_version"] = m.suite_version;
  j["seed"] = m.seed;
  j["tasks"] = ordered_json::array();
  for (const auto& t : m.tasks) {
    ordered_json tj;
    tj["task_id"] = t.task_id;
    tj["category"] = category_name(t.category);
    tj["components"] = t.components;
    tj["n_instances"] = t.n_instances;
    tj["answer_mode"] = t.answer_mode == AnswerMode::any_of_golds ? "any_of_golds" : "single_gold";
    tj["instances_emitted"] = t.instances_emitted;
    j["tasks"].push_back(std::move(tj));
  }
  j["edges"] = ordered_json::array();
  for (const auto& [a, b] : m.edges) j["edges"].push_back({a, b});
  j["lexicon_checksums"] = ordered_json::object();
  for (const auto& [k, v] : m.lexicon_checksums) j["lexicon_checksums"][k] = v;
  return j.dump(2) + "\n";
}

namespace {

std::vector<Edge> parse_edges(const json& j) {
  std::vector<Edge> edges;
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2) throw Error(Errc::malformed_file, "manifest: edge must be a [prerequisite, composite] pair");
    edges.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
  }
  return edges;
}

}  // namespace

SuiteManifest manifest_from_json(std::string_view text) {
  try {
    const json j = json::parse(text);
    SuiteManifest m;
    m.suite_version = j.at("suite_version").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& tj : j.at("tasks")) {
      TaskSpec t;
      t.task_id = tj.at("task_id").get<std::string>();
      t.category = parse_category(tj.at("category").get<std::string>());
      t.components = tj.at("components").get<std::vector<std::string>>();
      t.n_instances = tj.at("n_instances").get<std::size_t>();
      const auto mode = tj.at("answer_mode").get<std::string>();
      if (mode == "any_of_golds") {
        t.answer_mode = AnswerMode::any_of_golds;
      } else if (mode != "single_gold") {
        throw Error(Errc::malformed_file, "manifest: unknown answer_mode " + mode);
      }
      t.instances_emitted = tj.value("instances_emitted", t.n_instances);
      m.tasks.push_back(std::move(t));
    }
    m.edges = parse_edges(j);
    if (j.contains("lexicon_checksums")) {
      for (const auto& [k, v] : j.at("lexicon_checksums").items()) m.lexicon_checksums[k] = v.get<std::string>();
    }
    return m;
  } catch (const json::exception& e) {
    throw Error(Errc::malformed_file, std::string("manifest: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::parse_error) throw Error(Errc::malformed_file, std::string("manifest: ") + e.what());
    throw;
  }
}

std::vector<Edge> edges_from_manifest_json(std::string_view text) {
  try {
    return parse_edges(json::parse(text));
  } catch (const json::exception& e) {
    throw Error(Errc::malformed_file, std::string("manifest: ") + e.what());
  }
}

void write_instances_jsonl(std::ostream& out, std::span<const TaskInstance> instances) {
  for (const auto& inst : instances) {
    ordered_json j;
    j["task_id"] = inst.task_id;
    j["input"] = inst.input;
    j["golds"] = inst.golds;
    j["instance_index"] = inst.instance_index;
    out << j.dump() << '\n';
  }
}

std::vector<TaskInstance> read_instances_jsonl(std::istream& in, std::string_view source) {
  std::vector<TaskInstance> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    try {
      const json j = json::parse(line);
      out.push_back({j.at("task_id").get<std::string>(), j.at("input").get<std::string>(),
                     j.at("golds").get<std::vector<std::string>>(), j.at("instance_index").get<std::size_t>()});
    } catch (const json::exception& e) {
      throw Error(Errc::malformed_record, std::string(source) + ":" + std::to_string(line_no) + ": " + e.what(),
                  line_no);
    }
  }
  return out;
}

void write_suite(const Suite& suite, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "manifest.json", manifest_to_json(suite.manifest));
  std::ostringstream os;
  write_instances_jsonl(os, suite.instances);
  write_text_file(dir / "instances.jsonl", os.str());
}

Suite load_suite(const std::filesystem::path& dir) {
  Suite suite;
  suite.manifest = manifest_from_json(read_text_file(dir / "manifest.json"));
  validate_manifest(suite.manifest);
  const auto path = dir / "instances.jsonl";
  std::istringstream in(read_text_file(path));
  suite.instances = read_instances_jsonl(in, path.string());
  return suite;
}

}  // namespace curriculum
