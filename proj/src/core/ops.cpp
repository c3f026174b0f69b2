#include "core/ops.hpp"

#include <algorithm>
#include <array>

#include "core/error.hpp"
#include "core/text.hpp"

namespace curriculum {
namespace {

struct OpInfo {
  std::string_view name;
  std::string_view lexicon;  // empty for rule-based ops
  std::string_view task_id;
};

constexpr std::array<OpInfo, 14> kOps{{
    {"copy", "", "copying"},
    {"uppercase", "", "simple_icl:uppercase"},
    {"lowercase", "", "simple_icl:lowercase"},
    {"first_letter", "", "simple_icl:first_letter"},
    {"last_letter", "", "simple_icl:last_letter"},
    {"reverse", "", "token_reversal"},
    {"present_to_gerund", "present_gerund", "simple_icl:present_to_gerund"},
    {"singular_to_plural", "singular_plural", "simple_icl:singular_to_plural"},
    {"translate_eng_fr", "eng_fr", "simple_icl:translate_eng_fr"},
    {"translate_fr_eng", "fr_eng", "simple_icl:translate_fr_eng"},
    {"translate_eng_sp", "eng_sp", "simple_icl:translate_eng_sp"},
    {"translate_sp_eng", "sp_eng", "simple_icl:translate_sp_eng"},
    {"country_to_capital", "country_capital", "simple_icl:country_to_capital"},
    {"country_to_currency", "country_currency", "simple_icl:country_to_currency"},
}};
constexpr std::size_t kOpCount = kOps.size();

constexpr auto kNames = [] {
  std::array<std::string_view, kOpCount> names{};
  for (std::size_t i = 0; i < kOpCount; ++i) names[i] = kOps[i].name;
  return names;
}();

const OpInfo* find_op(std::string_view name) {
  for (std::size_t i = 0; i < kOpCount; ++i) {
    if (kOps[i].name == name) return &kOps[i];
  }
  return nullptr;
}

const OpInfo& require_op(std::string_view name) {
  const OpInfo* info = find_op(name);
  if (info == nullptr) throw Error(Errc::unknown_operation, "unknown operation: " + std::string(name));
  return *info;
}

std::string require_nonempty(std::string result, std::string_view op, std::string_view input) {
  if (result.empty()) {
    throw Error(Errc::input_outside_domain, std::string(op) + ": empty input '" + std::string(input) + "'");
  }
  return result;
}

}  // namespace

std::span<const std::string_view> registered_operations() noexcept { return kNames; }

bool is_registered_operation(std::string_view op) noexcept { return find_op(op) != nullptr; }

std::optional<std::string_view> operation_lexicon(std::string_view op) {
  const OpInfo& info = require_op(op);
  if (info.lexicon.empty()) return std::nullopt;
  return info.lexicon;
}

std::string operation_task_id(std::string_view op) { return std::string(require_op(op).task_id); }

std::vector<std::string> apply_elemental(std::string_view op, std::string_view input, const LexiconSet& lexicons) {
  const OpInfo& info = require_op(op);
  if (!info.lexicon.empty()) {
    const auto* golds = lexicons.get(info.lexicon).lookup(input);
    if (golds == nullptr) {
      throw Error(Errc::input_outside_domain,
                  std::string(op) + ": '" + std::string(input) + "' not in lexicon " + std::string(info.lexicon));
    }
    return *golds;
  }
  if (!text::is_valid_utf8(input)) throw Error(Errc::input_outside_domain, std::string(op) + ": input is not UTF-8");
  if (op == "copy") return {require_nonempty(std::string(input), op, input)};
  if (op == "uppercase") return {require_nonempty(text::to_upper(input), op, input)};
  if (op == "lowercase") return {require_nonempty(text::to_lower(input), op, input)};
  if (op == "first_letter") return {require_nonempty(text::first_char(input), op, input)};
  if (op == "last_letter") return {require_nonempty(text::last_char(input), op, input)};
  return {require_nonempty(text::reverse(input), op, input)};
}

std::vector<std::string> compose(std::span<const std::string> chain, std::string_view input,
                                 const LexiconSet& lexicons) {
  for (const auto& op : chain) require_op(op);
  std::vector<std::string> frontier{std::string(input)};
  for (std::size_t step = 0; step < chain.size(); ++step) {
    std::vector<std::string> next;
    for (const auto& value : frontier) {
      std::vector<std::string> outs;
      try {
        outs = apply_elemental(chain[step], value, lexicons);
      } catch (const Error& e) {
        if (e.code() != Errc::input_outside_domain) throw;
        throw Error(Errc::chain_domain_error,
                    "chain step " + std::to_string(step) + " (" + chain[step] + "): " + e.what(), step);
      }
      for (auto& o : outs) {
        if (std::find(next.begin(), next.end(), o) == next.end()) next.push_back(std::move(o));
      }
    }
    frontier = std::move(next);
  }
  return frontier;
}

}  // namespace curriculum
