#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/fvec.hpp"
#include "core/task_suite.hpp"

namespace curriculum {

struct CalibrationCandidate {
  std::string label;
  std::string extraction = "hidden_state";
  int layer = 0;
  std::optional<int> k_heads;
  std::optional<double> sigma_k;
  std::optional<double> lambda;
};

struct CriterionValues {
  double consistency = 0.0;
  double discriminability = 0.0;
  double reconstruction = 0.0;
};

struct CalibrationScore {
  CalibrationCandidate candidate;
  CriterionValues values;
  std::array<int, 3> ranks{};  // 1 = best, competition ranking
  int rank_sum = 0;
};

struct CalibrationOutcome {
  std::vector<CalibrationScore> scores;  // candidate order
  std::size_t winner = 0;
};

/// Higher is better on every criterion. Minimal rank sum wins; ties go to
/// the lexicographically larger (consistency, discriminability,
/// reconstruction), then the earlier candidate. Throws invalid_argument
/// when empty.
CalibrationOutcome rank_candidates(std::span<const CalibrationCandidate> candidates,
                                   std::span<const CriterionValues> values);

std::vector<CalibrationCandidate> parse_candidates(std::string_view json_text);

/// Scores each candidate from the per-prompt FVs (those with prompt_index)
/// whose extraction, layer and head count match it. Composite components
/// come from `edges`. Consistency and reconstruction average over the
/// tasks/composites they can be computed for.
CriterionValues evaluate_candidate(const CalibrationCandidate& candidate, std::span<const FunctionVector> fvs,
                                   std::span<const Edge> edges, std::uint64_t seed);

CalibrationOutcome calibrate(std::span<const CalibrationCandidate> candidates, std::span<const FunctionVector> fvs,
                             std::span<const Edge> edges, std::uint64_t seed);

bool candidate_matches(const CalibrationCandidate& c, const FvMetadata& m) noexcept;

}  // namespace curriculum
