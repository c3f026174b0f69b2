#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "core/emergence.hpp"
#include "core/synthetic.hpp"

// Command-level entry points shared by the C API and the CLI. Each writes
// its artifacts and returns a JSON summary.
namespace curriculum::commands {

using std::filesystem::path;

std::string correlate(std::span<const EmergenceResult> results, const std::optional<std::string>& definition,
                      const path& out);

std::string violations(std::span<const EmergenceResult> results, const path& manifest, const path& out);

std::string heatmap_data(std::span<const EmergenceResult> results, const std::optional<std::string>& definition,
                         const path& out);

struct CalibrateArgs {
  path fvs;
  path candidates;
  std::optional<path> manifest;
  path out;
  std::uint64_t seed = 0;
};
std::string calibrate(const CalibrateArgs& args);

struct PredictArgs {
  path store;
  path fvs;
  std::optional<path> config;  // single kernel config or a presets file
  std::vector<std::string> conditions{"all"};
  path out;
  std::optional<std::string> model;
  std::vector<std::string> targets;
  bool tune = false;
  double smooth_sigma = kDefaultSmoothSigma;
  double epsilon = kDefaultVarianceEpsilon;
};
std::string predict(const PredictArgs& args);

std::string simulate(const SyntheticParams& params, const path& out);

}  // namespace curriculum::commands
