#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/emergence.hpp"
#include "core/fvec.hpp"
#include "core/task_suite.hpp"
#include "core/trajectory.hpp"

namespace curriculum {

enum class SyntheticMode { consistent, inversion };

struct SyntheticParams {
  std::uint64_t seed = 0;
  std::size_t n_tasks = 40;
  std::size_t n_models = 2;
  double traj_noise = 0.0;  // half-width of the bounded uniform noise on accuracies
  double fv_noise = 0.0;    // norm scale of the Gaussian noise on FVs
  std::size_t n_checkpoints = 20;
  double t_min = 50.0;
  double t_max = 1000.0;
  std::size_t dim = 32;
  SyntheticMode mode = SyntheticMode::consistent;
  double inversion_shift = 100.0;
  double model_jitter = 0.0;  // per-model sd added to midpoints
  std::vector<std::string> definitions{"abs:0.5", "abs:0.8", "rel:0.5", "rel:0.8"};
};

struct SigmoidTask {
  std::string task_id;
  bool composite = false;
  std::vector<std::string> parents;
  double midpoint = 0.0;
  double slope = 1.0;
  double ceiling = 1.0;
};

struct SyntheticModel {
  std::string model_id;
  std::vector<SigmoidTask> tasks;  // per-model parameters
};

struct SyntheticWorld {
  SyntheticParams params;
  std::vector<double> grid;
  std::vector<SyntheticModel> models;
  std::vector<TrajectoryRecord> records;
  std::vector<FunctionVector> fvs;
  std::vector<Edge> edges;
  /// definition -> model -> task -> t* (nullopt: unemerged)
  std::map<std::string, std::map<std::string, std::map<std::string, std::optional<double>>>> ground_truth;

  double horizon() const { return grid.empty() ? 0.0 : grid.back(); }
};

double sigmoid_accuracy(const SigmoidTask& t, double tokens) noexcept;

/// Analytic first crossing of `threshold`; nullopt when the ceiling never
/// reaches it.
std::optional<double> sigmoid_crossing(const SigmoidTask& t, double threshold) noexcept;

/// Throws invalid_params.
SyntheticWorld generate_world(const SyntheticParams& params);

/// trajectories.csv, fvs/MODEL/TASK.fvec, manifest.json, ground_truth.json.
void write_world(const SyntheticWorld& world, const std::filesystem::path& dir);

std::string world_manifest_json(const SyntheticWorld& world);
std::string world_ground_truth_json(const SyntheticWorld& world);

}  // namespace curriculum
