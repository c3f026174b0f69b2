#include "core/trajectory.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "core/error.hpp"
#include "core/io.hpp"
#include "core/log.hpp"

namespace curriculum {

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string csv_field(const std::string& v) {
  if (v.find_first_of(",\"\n\r") == std::string::npos) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

template <typename T>
bool parse_number(const std::string& s, T& out) {
  const char* b = s.data();
  const char* e = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && ptr == e;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::vector<TrajectoryRecord> parse_trajectory_csv(std::string_view text, std::string_view source) {
  std::vector<TrajectoryRecord> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!header_seen) {
      if (line_no == 1 && line.size() >= 3 && line.substr(0, 3) == "\xEF\xBB\xBF") line.remove_prefix(3);
      if (line != kTrajectoryHeader) {
        throw Error(Errc::malformed_file, std::string(source) + ": expected header '" + std::string(kTrajectoryHeader) +
                                              "', got '" + std::string(line) + "'");
      }
      header_seen = true;
      continue;
    }
    if (line.empty()) continue;
    auto bad = [&](const std::string& why) {
      return Error(Errc::malformed_record, std::string(source) + ":" + std::to_string(line_no) + ": " + why, line_no);
    };
    const auto f = split_csv_line(line);
    if (f.size() != 5) throw bad("expected 5 fields, got " + std::to_string(f.size()));
    TrajectoryRecord r;
    r.model_id = f[0];
    r.task_id = f[1];
    if (r.model_id.empty() || r.task_id.empty()) throw bad("empty model_id or task_id");
    if (!parse_number(f[2], r.tokens_b) || !std::isfinite(r.tokens_b)) throw bad("tokens_b is not a number: " + f[2]);
    if (r.tokens_b < 0) throw bad("tokens_b must be non-negative: " + f[2]);
    if (!parse_number(f[3], r.accuracy) || !std::isfinite(r.accuracy)) throw bad("accuracy is not a number: " + f[3]);
    if (r.accuracy < 0 || r.accuracy > 1) throw bad("accuracy outside [0,1]: " + f[3]);
    if (!parse_number(f[4], r.n_examples)) throw bad("n_examples is not a count: " + f[4]);
    if (r.n_examples < 1) throw bad("n_examples must be >= 1");
    out.push_back(std::move(r));
    if (nl == text.size()) break;
  }
  if (!header_seen) throw Error(Errc::malformed_file, std::string(source) + ": empty file");
  return out;
}

void TrajectoryStore::add(const TrajectoryRecord& r) {
  TrajectorySeries& s = series_[r.model_id][r.task_id];
  if (s.model_id.empty()) {
    s.model_id = r.model_id;
    s.task_id = r.task_id;
  }
  const auto it = std::lower_bound(s.grid.begin(), s.grid.end(), r.tokens_b);
  const auto i = static_cast<std::size_t>(it - s.grid.begin());
  if (it != s.grid.end() && *it == r.tokens_b) {
    if (r.n_examples > s.n_examples[i]) {
      s.values[i] = r.accuracy;
      s.n_examples[i] = r.n_examples;
    } else if (r.n_examples == s.n_examples[i]) {
      std::ostringstream msg;
      msg << "duplicate (" << r.model_id << ", " << r.task_id << ", " << format_double(r.tokens_b)
          << ") with equal n_examples; keeping the later record";
      log::warn(msg.str());
      warnings_.push_back(msg.str());
      s.values[i] = r.accuracy;
    }
    return;
  }
  s.grid.insert(it, r.tokens_b);
  s.values.insert(s.values.begin() + static_cast<std::ptrdiff_t>(i), r.accuracy);
  s.n_examples.insert(s.n_examples.begin() + static_cast<std::ptrdiff_t>(i), r.n_examples);
}

void TrajectoryStore::add_all(std::span<const TrajectoryRecord> records) {
  for (const auto& r : records) add(r);
}

std::vector<std::string> TrajectoryStore::models() const {
  std::vector<std::string> out;
  for (const auto& [m, _] : series_) out.push_back(m);
  return out;
}

std::vector<std::string> TrajectoryStore::tasks(std::string_view model_id) const {
  std::vector<std::string> out;
  const auto it = series_.find(model_id);
  if (it == series_.end()) return out;
  for (const auto& [t, _] : it->second) out.push_back(t);
  return out;
}

bool TrajectoryStore::contains(std::string_view model_id, std::string_view task_id) const {
  const auto it = series_.find(model_id);
  return it != series_.end() && it->second.find(task_id) != it->second.end();
}

const TrajectorySeries& TrajectoryStore::series(std::string_view model_id, std::string_view task_id) const {
  const auto it = series_.find(model_id);
  if (it != series_.end()) {
    const auto jt = it->second.find(task_id);
    if (jt != it->second.end()) return jt->second;
  }
  throw Error(Errc::invalid_argument,
              "no trajectory for (" + std::string(model_id) + ", " + std::string(task_id) + ")");
}

std::size_t TrajectoryStore::series_count() const noexcept {
  std::size_t n = 0;
  for (const auto& [_, tasks] : series_) n += tasks.size();
  return n;
}

std::size_t TrajectoryStore::point_count() const noexcept {
  std::size_t n = 0;
  for (const auto& [_, tasks] : series_) {
    for (const auto& [__, s] : tasks) n += s.grid.size();
  }
  return n;
}

std::vector<TrajectoryRecord> TrajectoryStore::records() const {
  std::vector<TrajectoryRecord> out;
  for (const auto& [m, tasks] : series_) {
    for (const auto& [t, s] : tasks) {
      for (std::size_t i = 0; i < s.grid.size(); ++i) out.push_back({m, t, s.grid[i], s.values[i], s.n_examples[i]});
    }
  }
  return out;
}

std::string TrajectoryStore::to_csv() const {
  std::string out(kTrajectoryHeader);
  out += '\n';
  for (const auto& r : records()) {
    out += csv_field(r.model_id) + ',' + csv_field(r.task_id) + ',' + format_double(r.tokens_b) + ',' +
           format_double(r.accuracy) + ',' + std::to_string(r.n_examples) + '\n';
  }
  return out;
}

TrajectoryStore ingest_files(std::span<const std::filesystem::path> files) {
  TrajectoryStore store;
  for (const auto& f : files) store.add_all(parse_trajectory_csv(read_text_file(f), f.string()));
  return store;
}

void save_store(const TrajectoryStore& store, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text_file(dir / "trajectories.csv", store.to_csv());
  nlohmann::ordered_json j;
  j["format"] = "curriculum-trajectory-store";
  j["version"] = 1;
  j["models"] = store.models();
  j["n_series"] = store.series_count();
  j["n_points"] = store.point_count();
  j["warnings"] = store.warnings();
  write_text_file(dir / "store.json", j.dump(2) + "\n");
}

TrajectoryStore load_store(const std::filesystem::path& dir) {
  const auto csv = dir / "trajectories.csv";
  if (!std::filesystem::exists(csv)) throw Error(Errc::io_error, "not a trajectory store: " + dir.string());
  TrajectoryStore store;
  store.add_all(parse_trajectory_csv(read_text_file(csv), csv.string()));
  return store;
}

std::vector<double> interpolate(std::span<const double> grid, std::span<const double> values,
                                std::span<const double> target) {
  if (grid.size() != values.size()) throw Error(Errc::invalid_argument, "interpolate: grid/values length differ");
  if (grid.size() < 2) throw Error(Errc::too_few_points, "interpolate: need at least 2 points");
  for (std::size_t i = 1; i < target.size(); ++i) {
    if (!(target[i] > target[i - 1])) throw Error(Errc::invalid_argument, "interpolate: target grid not strictly increasing");
  }
  std::vector<double> out;
  out.reserve(target.size());
  for (double t : target) {
    if (t <= grid.front()) {
      out.push_back(values.front());
    } else if (t >= grid.back()) {
      out.push_back(values.back());
    } else {
      const auto hi = static_cast<std::size_t>(std::upper_bound(grid.begin(), grid.end(), t) - grid.begin());
      const std::size_t lo = hi - 1;
      if (grid[lo] == t) {
        out.push_back(values[lo]);
      } else {
        const double w = (t - grid[lo]) / (grid[hi] - grid[lo]);
        out.push_back(values[lo] + w * (values[hi] - values[lo]));
      }
    }
  }
  return out;
}

TrajectorySeries interpolate(const TrajectorySeries& s, std::span<const double> target) {
  TrajectorySeries out;
  out.model_id = s.model_id;
  out.task_id = s.task_id;
  out.grid.assign(target.begin(), target.end());
  out.values = interpolate(s.grid, s.values, target);
  out.smoothed = s.smoothed;
  out.sigma_smooth = s.sigma_smooth;
  return out;
}

std::vector<double> smooth(std::span<const double> values, double sigma) {
  if (!(sigma > 0) || !std::isfinite(sigma)) throw Error(Errc::invalid_argument, "smooth: sigma must be > 0");
  const auto n = static_cast<std::ptrdiff_t>(values.size());
  const auto half = static_cast<std::ptrdiff_t>(std::ceil(4.0 * sigma));
  std::vector<double> weights(static_cast<std::size_t>(half + 1));
  for (std::ptrdiff_t k = 0; k <= half; ++k) {
    weights[static_cast<std::size_t>(k)] = std::exp(-static_cast<double>(k * k) / (2.0 * sigma * sigma));
  }
  std::vector<double> out(values.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    // Weighted deviations from the centre sample: a constant window sums to
    // exactly zero, and the clamp keeps the result inside the window range
    // despite rounding.
    const double centre = values[static_cast<std::size_t>(i)];
    double num = 0.0;
    double den = 0.0;
    double vmin = centre;
    double vmax = centre;
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + half);
    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
      const double w = weights[static_cast<std::size_t>(std::abs(j - i))];
      const double v = values[static_cast<std::size_t>(j)];
      num += w * (v - centre);
      den += w;
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
    out[static_cast<std::size_t>(i)] = std::clamp(centre + num / den, vmin, vmax);
  }
  return out;
}

TrajectorySeries smooth(const TrajectorySeries& s, double sigma) {
  TrajectorySeries out = s;
  out.values = smooth(s.values, sigma);
  out.n_examples.clear();
  out.smoothed = true;
  out.sigma_smooth = sigma;
  return out;
}

double population_variance(std::span<const double> values) noexcept {
  if (values.empty()) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return acc / static_cast<double>(values.size());
}

bool passes_variance_filter(std::span<const double> values, double epsilon) noexcept {
  return !(population_variance(values) < epsilon);
}

VarianceFilterResult variance_filter(std::vector<TrajectorySeries> series, double epsilon) {
  VarianceFilterResult r;
  for (auto& s : series) {
    if (passes_variance_filter(s.values, epsilon)) {
      r.retained.push_back(std::move(s));
    } else {
      r.discarded.push_back(s.task_id);
    }
  }
  return r;
}

}  // namespace curriculum
