#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "core/lexicon.hpp"

namespace curriculum {

enum class Category {
  string_ops,
  morphology,
  translation,
  world_knowledge,
  arithmetic,
  logic,
  reading_comprehension,
  frct_placeholder,
};

std::string_view category_name(Category c) noexcept;
/// Throws parse_error.
Category parse_category(std::string_view name);

enum class AnswerMode { single_gold, any_of_golds };

inline constexpr std::string_view kCompositePrefix = "compositional:";

inline bool is_composite_id(std::string_view task_id) noexcept {
  return task_id.substr(0, kCompositePrefix.size()) == kCompositePrefix;
}

struct TaskSpec {
  std::string task_id;
  Category category = Category::string_ops;
  std::vector<std::string> components;  // elemental op chain; empty for elemental tasks
  std::size_t n_instances = 0;          // declared N
  AnswerMode answer_mode = AnswerMode::single_gold;
  std::size_t instances_emitted = 0;    // 0 for FRCT placeholders without an item file
};

struct TaskInstance {
  std::string task_id;
  std::string input;
  std::vector<std::string> golds;
  std::size_t instance_index = 0;
};

using Edge = std::pair<std::string, std::string>;  // (prerequisite, composite)

struct SuiteManifest {
  std::string suite_version;
  std::uint64_t seed = 0;
  std::vector<TaskSpec> tasks;
  std::vector<Edge> edges;
  std::map<std::string, std::string> lexicon_checksums;

  const TaskSpec* find(std::string_view task_id) const;
};

struct SuiteConfig {
  std::uint64_t seed = 0;
  std::optional<std::set<Category>> include;  // nullopt = every category
  std::optional<std::filesystem::path> frct_items;
  bool diacritic_aliases = false;
};

struct Suite {
  SuiteManifest manifest;
  std::vector<TaskInstance> instances;

  std::vector<const TaskInstance*> instances_of(std::string_view task_id) const;
};

inline constexpr std::string_view kSuiteVersion = "1.0.0";

/// Edge set implied by component chains: (operation_task_id(op), composite).
std::vector<Edge> derive_edges(std::span<const TaskSpec> tasks);

/// Edges of the full built-in catalog, independent of any generated suite.
std::vector<Edge> catalog_edges();

/// Throws invalid_argument naming the first violated manifest invariant.
void validate_manifest(const SuiteManifest& manifest);

/// Throws lexicon_missing or count_mismatch (also for a FRCT item file whose
/// per-task counts differ from the declared N).
Suite build_suite(const SuiteConfig& config, const LexiconSet& lexicons);

/// n_shots demonstrations drawn without replacement (query excluded) in
/// seed order, then the open query:
///   "Q: {input}\nA: {gold}\n\n" ... "Q: {query}\nA:"
/// Throws not_enough_instances, invalid_argument.
std::string render_prompt(const TaskSpec& task, std::span<const TaskInstance> instances, std::size_t query_index,
                          std::size_t n_shots, std::uint64_t seed);

/// Leading whitespace stripped, cut at the first newline, trailing
/// whitespace stripped; then byte-exact, case-sensitive membership.
int score_exact_match(std::string_view prediction, std::span<const std::string> golds);

std::string manifest_to_json(const SuiteManifest& manifest);
SuiteManifest manifest_from_json(std::string_view json_text);
/// Edges only; accepts suite and synthetic manifests alike.
std::vector<Edge> edges_from_manifest_json(std::string_view json_text);

void write_instances_jsonl(std::ostream& out, std::span<const TaskInstance> instances);
std::vector<TaskInstance> read_instances_jsonl(std::istream& in, std::string_view source);

void write_suite(const Suite& suite, const std::filesystem::path& dir);
Suite load_suite(const std::filesystem::path& dir);

}  // namespace curriculum
