#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "core/task_suite.hpp"

namespace curriculum {

enum class Source {
  lexicon_keys,     // first n keys of `lexicon`, in file order
  sampled_keys,     // n distinct keys drawn from `lexicon`
  alphabet_lower,
  alphabet_upper,
  random_strings,
  procedural,       // generator named by `param`
  frct,             // externally supplied items
};

enum class InputPrep { none, upper, lower };

struct TaskRecipe {
  std::string task_id;
  Category category;
  std::size_t n;
  bool composite;
  std::vector<std::string> chain;  // ops applied to the prepared input
  Source source;
  std::string lexicon;
  InputPrep prep = InputPrep::none;
  // procedural: generator name; sampled_keys / random_strings: an input
  // that is always emitted first
  std::string param;
};

std::span<const TaskRecipe> task_catalog();

}  // namespace curriculum
