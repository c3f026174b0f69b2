#include "core/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include <json.hpp>

#include "core/error.hpp"
#include "core/geometry.hpp"
#include "core/log.hpp"
#include "core/text.hpp"

namespace curriculum {

namespace {

std::vector<int> competition_ranks(const std::vector<double>& v) {
  std::vector<int> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    int better = 0;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] > v[i]) ++better;
    }
    r[i] = better + 1;
  }
  return r;
}

}  // namespace

CalibrationOutcome rank_candidates(std::span<const CalibrationCandidate> candidates,
                                   std::span<const CriterionValues> values) {
  if (candidates.empty()) throw Error(Errc::invalid_argument, "calibration needs at least one candidate");
  if (candidates.size() != values.size()) throw Error(Errc::invalid_argument, "candidate/value count mismatch");
  std::vector<double> c, d, r;
  for (const auto& v : values) {
    c.push_back(v.consistency);
    d.push_back(v.discriminability);
    r.push_back(v.reconstruction);
  }
  const auto rc = competition_ranks(c);
  const auto rd = competition_ranks(d);
  const auto rr = competition_ranks(r);
  CalibrationOutcome out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    CalibrationScore s{candidates[i], values[i], {rc[i], rd[i], rr[i]}, rc[i] + rd[i] + rr[i]};
    out.scores.push_back(std::move(s));
  }
  auto key = [](const CriterionValues& v) { return std::tuple(v.consistency, v.discriminability, v.reconstruction); };
  for (std::size_t i = 1; i < out.scores.size(); ++i) {
    const auto& cur = out.scores[i];
    const auto& best = out.scores[out.winner];
    if (cur.rank_sum < best.rank_sum || (cur.rank_sum == best.rank_sum && key(cur.values) > key(best.values))) {
      out.winner = i;
    }
  }
  return out;
}

std::vector<CalibrationCandidate> parse_candidates(std::string_view text) {
  std::vector<CalibrationCandidate> out;
  try {
    const auto j = nlohmann::json::parse(text);
    const auto& list = j.is_array() ? j : j.at("candidates");
    for (const auto& cj : list) {
      CalibrationCandidate c;
      c.extraction = cj.value("extraction", std::string("hidden_state"));
      c.layer = cj.at("layer").get<int>();
      if (cj.contains("k_heads") && !cj.at("k_heads").is_null()) c.k_heads = cj.at("k_heads").get<int>();
      if (cj.contains("sigma_k")) c.sigma_k = cj.at("sigma_k").get<double>();
      if (cj.contains("lambda")) c.lambda = cj.at("lambda").get<double>();
      c.label = cj.value("label", c.extraction + "@" + std::to_string(c.layer) +
                                      (c.k_heads ? "/k" + std::to_string(*c.k_heads) : std::string()));
      out.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::malformed_file, std::string("candidates: ") + e.what());
  }
  if (out.empty()) throw Error(Errc::invalid_argument, "candidates: empty list");
  return out;
}

bool candidate_matches(const CalibrationCandidate& c, const FvMetadata& m) noexcept {
  if (c.extraction != m.extraction || c.layer != m.layer) return false;
  if (c.k_heads && static_cast<std::size_t>(*c.k_heads) != m.heads.size()) return false;
  return true;
}

CriterionValues evaluate_candidate(const CalibrationCandidate& candidate, std::span<const FunctionVector> fvs,
                                   std::span<const Edge> edges, std::uint64_t seed) {
  std::map<std::string, std::vector<Vec>> prompts;
  for (const auto& fv : fvs) {
    if (fv.meta.prompt_index && candidate_matches(candidate, fv.meta)) prompts[fv.meta.task_id].push_back(fv.as_double());
  }
  CriterionValues out;
  if (prompts.empty()) {
    log::warn("candidate ", candidate.label, " matches no per-prompt FVs");
    const double worst = -std::numeric_limits<double>::infinity();
    return {worst, worst, worst};
  }
  double cons = 0.0;
  std::size_t cons_n = 0;
  std::vector<std::vector<Vec>> sets;
  std::map<std::string, Vec> means;
  for (const auto& [task, vs] : prompts) {
    if (vs.size() >= 4) {
      cons += split_half_consistency(vs, seed ^ text::fnv1a64(task));
      ++cons_n;
    }
    if (vs.size() >= 2) sets.push_back(vs);
    means[task] = mean_vector(vs);
  }
  out.consistency = cons_n ? cons / static_cast<double>(cons_n) : -std::numeric_limits<double>::infinity();
  out.discriminability = sets.size() >= 2 ? discriminability(sets) : -std::numeric_limits<double>::infinity();

  std::map<std::string, std::vector<std::string>> parents;
  for (const auto& [pre, comp] : edges) parents[comp].push_back(pre);
  double rec = 0.0;
  std::size_t rec_n = 0;
  for (const auto& [comp, ps] : parents) {
    const auto it = means.find(comp);
    if (it == means.end()) continue;
    std::vector<Vec> comps;
    for (const auto& p : ps) {
      const auto jt = means.find(p);
      if (jt != means.end()) comps.push_back(jt->second);
    }
    if (comps.size() != ps.size()) continue;
    rec += composition_reconstruction(it->second, comps).cosine;
    ++rec_n;
  }
  out.reconstruction = rec_n ? rec / static_cast<double>(rec_n) : -std::numeric_limits<double>::infinity();
  return out;
}

CalibrationOutcome calibrate(std::span<const CalibrationCandidate> candidates, std::span<const FunctionVector> fvs,
                             std::span<const Edge> edges, std::uint64_t seed) {
  std::vector<CriterionValues> values;
  for (const auto& c : candidates) values.push_back(evaluate_candidate(c, fvs, edges, seed));
  return rank_candidates(candidates, values);
}

}  // namespace curriculum
