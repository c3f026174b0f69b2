#include "core/presets.hpp"

#include <json.hpp>

#include "core/error.hpp"
#include "core/io.hpp"
#include "core/lexicon.hpp"

namespace curriculum {

std::vector<KernelPreset> parse_presets(std::string_view text) {
  std::vector<KernelPreset> out;
  try {
    const auto j = nlohmann::json::parse(text);
    for (const auto& p : j.at("presets")) {
      KernelPreset k;
      k.model = p.at("model").get<std::string>();
      k.extraction = p.at("extraction").get<std::string>();
      k.layer = p.at("layer").get<int>();
      if (p.contains("k_heads") && !p.at("k_heads").is_null()) k.k_heads = p.at("k_heads").get<int>();
      k.sigma_k = p.at("sigma_k").get<double>();
      k.lambda = p.at("lambda").get<double>();
      if (!(k.sigma_k > 0) || !(k.lambda > 0)) {
        throw Error(Errc::invalid_argument, "preset " + k.model + ": sigma_k and lambda must be > 0");
      }
      if (k.extraction == "cie_heads" && (!k.k_heads || *k.k_heads < 1)) {
        throw Error(Errc::invalid_argument, "preset " + k.model + ": cie_heads needs k_heads");
      }
      out.push_back(std::move(k));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::malformed_file, std::string("presets: ") + e.what());
  }
  return out;
}

std::vector<KernelPreset> load_presets(const std::filesystem::path& path) { return parse_presets(read_text_file(path)); }

std::filesystem::path default_presets_path() { return default_data_dir() / "presets" / "kernel_presets.json"; }

const KernelPreset* find_preset(const std::vector<KernelPreset>& presets, std::string_view model) {
  for (const auto& p : presets) {
    if (p.model == model) return &p;
  }
  return nullptr;
}

}  // namespace curriculum
