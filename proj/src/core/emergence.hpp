#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/stats.hpp"
#include "core/task_suite.hpp"
#include "core/trajectory.hpp"

namespace curriculum {

struct EmergenceDefinition {
  enum class Kind { absolute, relative };
  Kind kind = Kind::absolute;
  double threshold = 0.5;
  std::size_t stability_k = 1;

  /// Canonical text form, e.g. "abs:0.8:k3" or "rel:0.5".
  std::string to_string() const;
};

/// "abs:θ", "rel:α", optionally followed by ":kN". Throws parse_error naming
/// the offending token.
EmergenceDefinition parse_definition(std::string_view text);

struct EmergenceResult {
  std::string model_id;
  std::string task_id;
  std::string definition;
  std::optional<double> t_star;  // nullopt when unemerged
  double sentinel = 0.0;         // horizon + 1
  bool zero_max = false;         // relative definition on an all-zero series

  bool emerged() const noexcept { return t_star.has_value(); }
  double rank_value() const noexcept { return t_star ? *t_star : sentinel; }
};

/// Throws empty_series.
EmergenceResult emergence_time(const TrajectorySeries& series, const EmergenceDefinition& def, double horizon);

/// Every series in the store under each definition. The horizon defaults to
/// the largest checkpoint observed for the model.
std::vector<EmergenceResult> compute_emergence(const TrajectoryStore& store,
                                               std::span<const EmergenceDefinition> defs,
                                               std::optional<double> horizon = std::nullopt);

std::string emergence_to_csv(std::span<const EmergenceResult> results);
std::vector<EmergenceResult> emergence_from_csv(std::string_view text, std::string_view source);

/// task -> t* or sentinel, for one model under one definition.
using EmergenceTable = std::map<std::string, double, std::less<>>;
/// definition -> model -> table, in first-seen definition order.
struct EmergenceTables {
  std::vector<std::string> definitions;
  std::map<std::string, std::map<std::string, EmergenceTable>> by_definition;
};
EmergenceTables group_emergence(std::span<const EmergenceResult> results);

/// Spearman over the tasks both tables share.
SpearmanResult spearman_tables(const EmergenceTable& a, const EmergenceTable& b);

struct PairStability {
  std::string model_a;
  std::string model_b;
  SpearmanResult stat;
};

struct StabilityMatrix {
  std::vector<std::string> models;
  std::vector<PairStability> pairs;
  double mean_rho = 0.0;
  double min_rho = 0.0;
  double max_rho = 0.0;
};

/// Throws invalid_argument for fewer than two models; spearman errors propagate.
StabilityMatrix pairwise_stability(const std::map<std::string, EmergenceTable>& tables);

enum class InversionClass { consistent, weak, strong };
std::string_view inversion_class_name(InversionClass c) noexcept;

struct ParentComparison {
  std::string parent;
  double t_parent = 0.0;
  bool violated = false;  // composite strictly earlier than this parent
};

struct CompositeVerdict {
  std::string composite;
  double t_composite = 0.0;
  std::vector<ParentComparison> parents;
  InversionClass verdict = InversionClass::consistent;
};

struct ViolationReport {
  std::string model_id;
  std::string definition;
  std::size_t composites_evaluated = 0;
  std::size_t consistent = 0;
  std::size_t weak_inversions = 0;
  std::size_t strong_inversions = 0;
  std::size_t total_pairs = 0;      // (composite, prerequisite) pairs, i.e. triples for this model
  std::size_t violating_pairs = 0;
  double violation_rate = 0.0;      // violating_pairs / total_pairs
  double composite_violation_rate = 0.0;  // (weak + strong) / composites_evaluated
  std::vector<CompositeVerdict> details;
  std::vector<std::string> missing_tasks;
};

/// Ties count as consistent. A composite with a missing parent is excluded
/// and listed alongside the missing task.
ViolationReport violation_report(const EmergenceTable& table, std::span<const Edge> edges);

struct ViolationSummary {
  std::size_t total_pairs = 0;
  std::size_t violating_pairs = 0;
  double violation_rate = 0.0;
};
ViolationSummary aggregate_violations(std::span<const ViolationReport> reports) noexcept;

/// Ascending mean average-rank across the models containing each task,
/// ties broken by task id.
std::vector<std::string> consensus_order(const std::map<std::string, EmergenceTable>& tables);

/// TSV: header "task_id<TAB>model..." then one consensus-ordered row per task
/// holding t* (or the sentinel); "NA" where a model lacks the task.
std::string heatmap_tsv(const std::map<std::string, EmergenceTable>& tables);

}  // namespace curriculum
