#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace curriculum {

// Numeric values are part of the C ABI (see curriculum.h); append only.
enum class Errc : int {
  ok = 0,
  invalid_argument = 1,
  parse_error = 2,
  io_error = 3,
  malformed_record = 4,
  malformed_file = 5,
  lexicon_missing = 6,
  checksum_mismatch = 7,
  count_mismatch = 8,
  unknown_operation = 9,
  input_outside_domain = 10,
  chain_domain_error = 11,
  not_enough_instances = 12,
  too_few_points = 13,
  empty_series = 14,
  too_few_shared_tasks = 15,
  zero_vector = 16,
  dimension_mismatch = 17,
  too_few_prompts = 18,
  solve_failure = 19,
  empty_basis = 20,
  missing_fv = 21,
  invalid_params = 22,
  internal = 23,
};

std::string_view errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  Error(Errc code, const std::string& message, std::size_t position)
      : std::runtime_error(message), code_(code), position_(position) {}

  Errc code() const noexcept { return code_; }
  /// Failing chain position for chain_domain_error, line number for
  /// malformed_record.
  std::optional<std::size_t> position() const noexcept { return position_; }

 private:
  Errc code_;
  std::optional<std::size_t> position_;
};

}  // namespace curriculum
