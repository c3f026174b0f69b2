#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/lexicon.hpp"

namespace curriculum {

/// Names of every elemental operation, in registry order.
std::span<const std::string_view> registered_operations() noexcept;
bool is_registered_operation(std::string_view op) noexcept;

/// Lexicon backing a lookup operation; nullopt for rule-based operations.
std::optional<std::string_view> operation_lexicon(std::string_view op);

/// Task id of the elemental task that exercises `op` on its own.
std::string operation_task_id(std::string_view op);

/// All acceptable outputs of `op` on `input`. Throws unknown_operation or
/// input_outside_domain.
std::vector<std::string> apply_elemental(std::string_view op, std::string_view input, const LexiconSet& lexicons);

/// Left-to-right composition. Multi-gold steps fan out; the result is the
/// union over branches in first-seen order. A domain failure at step i
/// throws chain_domain_error with position() == i.
std::vector<std::string> compose(std::span<const std::string> chain, std::string_view input,
                                 const LexiconSet& lexicons);

}  // namespace curriculum
