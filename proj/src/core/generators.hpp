#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "core/rng.hpp"

namespace curriculum {

struct GeneratedItem {
  std::string input;
  std::vector<std::string> golds;
};

/// Exactly n items with distinct inputs. Throws unknown_operation for an
/// unknown generator and count_mismatch when n exceeds its item space.
std::vector<GeneratedItem> generate_items(std::string_view generator, std::size_t n, Rng& rng);

/// n distinct strings of `length` ASCII letters (mixed case).
std::vector<std::string> random_letter_strings(std::size_t n, std::size_t length, Rng& rng);

}  // namespace curriculum
