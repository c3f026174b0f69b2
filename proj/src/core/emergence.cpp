#include "core/emergence.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>

#include "core/error.hpp"
#include "core/log.hpp"

namespace curriculum {

std::string EmergenceDefinition::to_string() const {
  std::string out = kind == Kind::absolute ? "abs:" : "rel:";
  out += format_double(threshold);
  if (stability_k > 1) out += ":k" + std::to_string(stability_k);
  return out;
}

EmergenceDefinition parse_definition(std::string_view text) {
  auto fail = [&](std::string_view token, const std::string& why) {
    return Error(Errc::parse_error, "definition '" + std::string(text) + "': " + why + " (token '" +
                                        std::string(token) + "')");
  };
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto colon = text.find(':', start);
    parts.push_back(text.substr(start, colon == std::string_view::npos ? std::string_view::npos : colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  if (parts.size() < 2 || parts.size() > 3) throw fail(text, "expected KIND:THRESHOLD[:kN]");
  EmergenceDefinition d;
  if (parts[0] == "abs") {
    d.kind = EmergenceDefinition::Kind::absolute;
  } else if (parts[0] == "rel") {
    d.kind = EmergenceDefinition::Kind::relative;
  } else {
    throw fail(parts[0], "kind must be abs or rel");
  }
  const auto th = parts[1];
  const auto [p, ec] = std::from_chars(th.data(), th.data() + th.size(), d.threshold);
  if (ec != std::errc() || p != th.data() + th.size() || th.empty()) throw fail(th, "threshold is not a number");
  if (!(d.threshold > 0.0 && d.threshold <= 1.0)) throw fail(th, "threshold must lie in (0, 1]");
  if (parts.size() == 3) {
    const auto k = parts[2];
    if (k.size() < 2 || k[0] != 'k') throw fail(k, "stability must be written kN");
    const auto [q, ec2] = std::from_chars(k.data() + 1, k.data() + k.size(), d.stability_k);
    if (ec2 != std::errc() || q != k.data() + k.size()) throw fail(k, "stability is not a count");
    if (d.stability_k < 1) throw fail(k, "stability must be at least 1");
  }
  return d;
}

EmergenceResult emergence_time(const TrajectorySeries& s, const EmergenceDefinition& def, double horizon) {
  if (s.values.empty()) {
    throw Error(Errc::empty_series, "empty series for (" + s.model_id + ", " + s.task_id + ")");
  }
  EmergenceResult r;
  r.model_id = s.model_id;
  r.task_id = s.task_id;
  r.definition = def.to_string();
  r.sentinel = horizon + 1.0;
  double threshold = def.threshold;
  if (def.kind == EmergenceDefinition::Kind::relative) {
    const double mx = *std::max_element(s.values.begin(), s.values.end());
    if (!(mx > 0.0)) {
      r.zero_max = true;
      return r;
    }
    threshold = def.threshold * mx;
  }
  const std::size_t n = s.values.size();
  const std::size_t k = def.stability_k;
  for (std::size_t i = 0; i + k <= n; ++i) {
    bool ok = true;
    for (std::size_t j = i; j < i + k; ++j) {
      if (!(s.values[j] >= threshold)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      r.t_star = s.grid[i];
      return r;
    }
  }
  return r;
}

std::vector<EmergenceResult> compute_emergence(const TrajectoryStore& store,
                                               std::span<const EmergenceDefinition> defs,
                                               std::optional<double> horizon) {
  std::vector<EmergenceResult> out;
  for (const auto& def : defs) {
    for (const auto& [model, tasks] : store.all()) {
      double h = 0.0;
      if (horizon) {
        h = *horizon;
      } else {
        for (const auto& [_, s] : tasks) {
          if (!s.grid.empty()) h = std::max(h, s.grid.back());
        }
      }
      for (const auto& [task, s] : tasks) {
        auto r = emergence_time(s, def, h);
        if (r.zero_max) log::info("(", model, ", ", task, ") never above zero; unemerged under ", r.definition);
        out.push_back(std::move(r));
      }
    }
  }
  return out;
}

std::string emergence_to_csv(std::span<const EmergenceResult> results) {
  std::string out = "model_id,task_id,definition,t_star,unemerged\n";
  for (const auto& r : results) {
    out += r.model_id + ',' + r.task_id + ',' + r.definition + ',' + format_double(r.rank_value()) + ',' +
           (r.emerged() ? "0" : "1") + '\n';
  }
  return out;
}

std::vector<EmergenceResult> emergence_from_csv(std::string_view text, std::string_view source) {
  std::vector<EmergenceResult> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1) {
      if (line != "model_id,task_id,definition,t_star,unemerged") {
        throw Error(Errc::malformed_file, std::string(source) + ": unexpected emergence header");
      }
      continue;
    }
    if (line.empty()) continue;
    auto bad = [&](const std::string& why) {
      return Error(Errc::malformed_record, std::string(source) + ":" + std::to_string(line_no) + ": " + why, line_no);
    };
    std::vector<std::string_view> f;
    std::size_t s = 0;
    while (true) {
      const auto c = line.find(',', s);
      f.push_back(line.substr(s, c == std::string_view::npos ? std::string_view::npos : c - s));
      if (c == std::string_view::npos) break;
      s = c + 1;
    }
    if (f.size() != 5) throw bad("expected 5 fields");
    EmergenceResult r;
    r.model_id = std::string(f[0]);
    r.task_id = std::string(f[1]);
    try {
      r.definition = parse_definition(f[2]).to_string();
    } catch (const Error& e) {
      throw bad(e.what());
    }
    double t = 0.0;
    const auto [p, ec] = std::from_chars(f[3].data(), f[3].data() + f[3].size(), t);
    if (ec != std::errc() || p != f[3].data() + f[3].size() || !std::isfinite(t)) throw bad("t_star is not a number");
    if (f[4] == "1") {
      r.sentinel = t;
    } else if (f[4] == "0") {
      r.t_star = t;
    } else {
      throw bad("unemerged must be 0 or 1");
    }
    out.push_back(std::move(r));
  }
  if (line_no == 0) throw Error(Errc::malformed_file, std::string(source) + ": empty file");
  // Emerged rows carry no sentinel; recover it from unemerged rows of the
  // same (model, definition) so that round-trips are lossless.
  std::map<std::pair<std::string, std::string>, double> sentinels;
  for (const auto& r : out) {
    if (!r.emerged()) sentinels[{r.model_id, r.definition}] = r.sentinel;
  }
  for (auto& r : out) {
    if (r.emerged()) {
      const auto it = sentinels.find({r.model_id, r.definition});
      if (it != sentinels.end()) r.sentinel = it->second;
    }
  }
  return out;
}

EmergenceTables group_emergence(std::span<const EmergenceResult> results) {
  EmergenceTables t;
  for (const auto& r : results) {
    if (std::find(t.definitions.begin(), t.definitions.end(), r.definition) == t.definitions.end()) {
      t.definitions.push_back(r.definition);
    }
    t.by_definition[r.definition][r.model_id][r.task_id] = r.rank_value();
  }
  return t;
}

SpearmanResult spearman_tables(const EmergenceTable& a, const EmergenceTable& b) {
  std::vector<double> va, vb;
  for (const auto& [task, v] : a) {
    const auto it = b.find(task);
    if (it != b.end()) {
      va.push_back(v);
      vb.push_back(it->second);
    }
  }
  return spearman(va, vb);
}

StabilityMatrix pairwise_stability(const std::map<std::string, EmergenceTable>& tables) {
  if (tables.size() < 2) throw Error(Errc::invalid_argument, "pairwise stability needs at least two models");
  StabilityMatrix m;
  for (const auto& [id, _] : tables) m.models.push_back(id);
  double sum = 0.0;
  m.min_rho = std::numeric_limits<double>::infinity();
  m.max_rho = -std::numeric_limits<double>::infinity();
  for (auto i = tables.begin(); i != tables.end(); ++i) {
    for (auto j = std::next(i); j != tables.end(); ++j) {
      PairStability p{i->first, j->first, spearman_tables(i->second, j->second)};
      sum += p.stat.rho;
      m.min_rho = std::min(m.min_rho, p.stat.rho);
      m.max_rho = std::max(m.max_rho, p.stat.rho);
      m.pairs.push_back(std::move(p));
    }
  }
  m.mean_rho = sum / static_cast<double>(m.pairs.size());
  return m;
}

std::string_view inversion_class_name(InversionClass c) noexcept {
  switch (c) {
    case InversionClass::consistent:
      return "consistent";
    case InversionClass::weak:
      return "weak";
    case InversionClass::strong:
      return "strong";
  }
  return "consistent";
}

ViolationReport violation_report(const EmergenceTable& table, std::span<const Edge> edges) {
  ViolationReport rep;
  std::vector<std::string> composites;
  std::map<std::string, std::vector<std::string>> parents;
  for (const auto& [pre, comp] : edges) {
    if (!parents.count(comp)) composites.push_back(comp);
    parents[comp].push_back(pre);
  }
  std::set<std::string> missing;
  for (const auto& comp : composites) {
    const auto& ps = parents[comp];
    bool complete = table.count(comp) > 0;
    if (!complete) missing.insert(comp);
    for (const auto& p : ps) {
      if (!table.count(p)) {
        missing.insert(p);
        complete = false;
      }
    }
    if (!complete) continue;
    CompositeVerdict v;
    v.composite = comp;
    v.t_composite = table.find(comp)->second;
    std::size_t violated = 0;
    for (const auto& p : ps) {
      ParentComparison pc{p, table.find(p)->second, false};
      pc.violated = v.t_composite < pc.t_parent;
      violated += pc.violated ? 1 : 0;
      v.parents.push_back(std::move(pc));
    }
    rep.total_pairs += ps.size();
    rep.violating_pairs += violated;
    if (violated == 0) {
      v.verdict = InversionClass::consistent;
      ++rep.consistent;
    } else if (violated == ps.size()) {
      v.verdict = InversionClass::strong;
      ++rep.strong_inversions;
    } else {
      v.verdict = InversionClass::weak;
      ++rep.weak_inversions;
    }
    ++rep.composites_evaluated;
    rep.details.push_back(std::move(v));
  }
  rep.missing_tasks.assign(missing.begin(), missing.end());
  if (rep.total_pairs > 0) {
    rep.violation_rate = static_cast<double>(rep.violating_pairs) / static_cast<double>(rep.total_pairs);
  }
  if (rep.composites_evaluated > 0) {
    rep.composite_violation_rate = static_cast<double>(rep.weak_inversions + rep.strong_inversions) /
                                   static_cast<double>(rep.composites_evaluated);
  }
  return rep;
}

ViolationSummary aggregate_violations(std::span<const ViolationReport> reports) noexcept {
  ViolationSummary s;
  for (const auto& r : reports) {
    s.total_pairs += r.total_pairs;
    s.violating_pairs += r.violating_pairs;
  }
  if (s.total_pairs > 0) s.violation_rate = static_cast<double>(s.violating_pairs) / static_cast<double>(s.total_pairs);
  return s;
}

std::vector<std::string> consensus_order(const std::map<std::string, EmergenceTable>& tables) {
  std::map<std::string, std::pair<double, std::size_t>> acc;
  for (const auto& [_, table] : tables) {
    std::vector<double> values;
    for (const auto& [__, v] : table) values.push_back(v);
    const auto ranks = average_ranks(values);
    std::size_t i = 0;
    for (const auto& [task, __] : table) {
      auto& a = acc[task];
      a.first += ranks[i++];
      a.second += 1;
    }
  }
  std::vector<std::pair<double, std::string>> keyed;
  for (const auto& [task, a] : acc) keyed.emplace_back(a.first / static_cast<double>(a.second), task);
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::string> out;
  for (auto& [_, task] : keyed) out.push_back(std::move(task));
  return out;
}

std::string heatmap_tsv(const std::map<std::string, EmergenceTable>& tables) {
  std::string out = "task_id";
  for (const auto& [model, _] : tables) out += '\t' + model;
  out += '\n';
  for (const auto& task : consensus_order(tables)) {
    out += task;
    for (const auto& [_, table] : tables) {
      const auto it = table.find(task);
      out += '\t' + (it == table.end() ? std::string("NA") : format_double(it->second));
    }
    out += '\n';
  }
  return out;
}

}  // namespace curriculum
