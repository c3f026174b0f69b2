#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace curriculum {

inline constexpr std::uint32_t kFvecVersion = 1;

struct FvMetadata {
  std::string model_id;
  std::string task_id;
  std::string extraction = "hidden_state";  // hidden_state | cie_heads
  int layer = 0;
  std::vector<std::pair<int, int>> heads;    // (block, head)
  std::size_t n_correct_prompts = 1;
  double checkpoint_tokens_b = 0.0;
  std::optional<std::size_t> prompt_index;   // set for per-prompt vectors
};

struct FunctionVector {
  FvMetadata meta;
  std::vector<float> values;

  std::vector<double> as_double() const { return {values.begin(), values.end()}; }
};

/// Throws invalid_argument when an invariant fails (non-finite values,
/// cie_heads without heads or spanning blocks, zero correct prompts).
void validate(const FunctionVector& fv);

/// Compact JSON form used as the FVEC trailer.
std::string metadata_to_json(const FvMetadata& meta);
FvMetadata metadata_from_json(std::string_view text);

std::string encode_fvec(const FunctionVector& fv);
/// Throws malformed_file.
FunctionVector decode_fvec(std::string_view bytes, std::string_view source);

void write_fvec(const FunctionVector& fv, const std::filesystem::path& path);
FunctionVector read_fvec(const std::filesystem::path& path);
/// A single file, or every *.fvec below a directory in sorted path order.
std::vector<FunctionVector> read_fvecs(const std::filesystem::path& path);

/// Relative output path: MODEL/TASK[.pN].fvec with ':' mapped to "__".
std::filesystem::path fvec_relative_path(const FvMetadata& meta);

}  // namespace curriculum
