#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace curriculum {

struct TrajectoryRecord {
  std::string model_id;
  std::string task_id;
  double tokens_b = 0.0;
  double accuracy = 0.0;
  std::size_t n_examples = 0;
};

struct TrajectorySeries {
  std::string model_id;
  std::string task_id;
  std::vector<double> grid;    // strictly increasing tokens_b
  std::vector<double> values;
  std::vector<std::size_t> n_examples;  // per point; empty for derived series
  bool smoothed = false;
  double sigma_smooth = 0.0;
};

inline constexpr std::string_view kTrajectoryHeader = "model_id,task_id,tokens_b,accuracy,n_examples";
inline constexpr double kDefaultSmoothSigma = 1.0;
inline constexpr double kDefaultVarianceEpsilon = 1e-4;

/// Throws malformed_record (with the 1-based line in position()) or
/// malformed_file for a bad header.
std::vector<TrajectoryRecord> parse_trajectory_csv(std::string_view text, std::string_view source);

class TrajectoryStore {
 public:
  /// Groups records; a duplicate (model, task, tokens_b) keeps the record
  /// with more examples, and on a tie the later record (with a warning).
  void add(const TrajectoryRecord& record);
  void add_all(std::span<const TrajectoryRecord> records);

  std::vector<std::string> models() const;
  std::vector<std::string> tasks(std::string_view model_id) const;
  bool contains(std::string_view model_id, std::string_view task_id) const;
  /// Throws invalid_argument when absent.
  const TrajectorySeries& series(std::string_view model_id, std::string_view task_id) const;
  const std::map<std::string, std::map<std::string, TrajectorySeries, std::less<>>, std::less<>>& all() const noexcept {
    return series_;
  }

  std::size_t series_count() const noexcept;
  std::size_t point_count() const noexcept;
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  std::vector<TrajectoryRecord> records() const;
  std::string to_csv() const;

 private:
  std::map<std::string, std::map<std::string, TrajectorySeries, std::less<>>, std::less<>> series_;
  std::vector<std::string> warnings_;
};

std::string format_double(double v);

/// Reads each file in order into one store.
TrajectoryStore ingest_files(std::span<const std::filesystem::path> files);

/// dir/trajectories.csv plus dir/store.json (summary and ingest warnings).
void save_store(const TrajectoryStore& store, const std::filesystem::path& dir);
TrajectoryStore load_store(const std::filesystem::path& dir);

/// Piecewise-linear resampling with flat extrapolation. Throws
/// too_few_points (< 2 source points) or invalid_argument (target grid not
/// strictly increasing).
std::vector<double> interpolate(std::span<const double> grid, std::span<const double> values,
                                std::span<const double> target);
TrajectorySeries interpolate(const TrajectorySeries& series, std::span<const double> target);

/// Gaussian smoothing over sample indices, window |k| <= ceil(4 sigma),
/// weights renormalized where the window runs off either end.
std::vector<double> smooth(std::span<const double> values, double sigma = kDefaultSmoothSigma);
TrajectorySeries smooth(const TrajectorySeries& series, double sigma = kDefaultSmoothSigma);

double population_variance(std::span<const double> values) noexcept;
/// True when the series carries enough signal to keep.
bool passes_variance_filter(std::span<const double> values, double epsilon = kDefaultVarianceEpsilon) noexcept;

struct VarianceFilterResult {
  std::vector<TrajectorySeries> retained;
  std::vector<std::string> discarded;  // task ids
};
VarianceFilterResult variance_filter(std::vector<TrajectorySeries> series, double epsilon = kDefaultVarianceEpsilon);

}  // namespace curriculum
