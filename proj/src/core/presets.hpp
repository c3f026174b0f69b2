#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace curriculum {

struct KernelPreset {
  std::string model;
  std::string extraction;
  int layer = 0;
  std::optional<int> k_heads;
  double sigma_k = 1.0;
  double lambda = 1e-3;
};

/// Throws malformed_file, or invalid_argument for sigma_k/lambda <= 0.
std::vector<KernelPreset> parse_presets(std::string_view json_text);
std::vector<KernelPreset> load_presets(const std::filesystem::path& path);
std::filesystem::path default_presets_path();
const KernelPreset* find_preset(const std::vector<KernelPreset>& presets, std::string_view model);

}  // namespace curriculum
