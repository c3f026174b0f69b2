#include "core/task_catalog.hpp"

namespace curriculum {
namespace {

using C = Category;
using S = Source;
using P = InputPrep;

TaskRecipe lex(std::string id, C cat, std::size_t n, std::string op, std::string lexicon) {
  return {id, cat, n, false, {op}, S::lexicon_keys, lexicon, P::none, ""};
}

TaskRecipe proc(std::string id, C cat, std::size_t n, std::string generator) {
  return {id, cat, n, false, {}, S::procedural, "", P::none, generator};
}

TaskRecipe frct(std::string id, std::size_t n) { return {id, C::frct_placeholder, n, false, {}, S::frct, "", P::none, ""}; }

TaskRecipe comp(std::string id, C cat, std::size_t n, std::string lexicon, P prep,
                std::vector<std::string> chain) {
  return {id, cat, n, true, std::move(chain), S::lexicon_keys, lexicon, prep, ""};
}

void translation_composites(std::vector<TaskRecipe>& out, const std::string& pair, std::size_t n,
                            bool with_upper_reverse) {
  const std::string op = "translate_" + pair;
  const std::string prefix = "compositional:translate_" + pair + "_";
  out.push_back(comp(prefix + "first", C::translation, n, pair, P::none, {op, "first_letter"}));
  out.push_back(comp(prefix + "last", C::translation, n, pair, P::none, {op, "last_letter"}));
  out.push_back(comp(prefix + "lower", C::translation, n, pair, P::upper, {"lowercase", op}));
  out.push_back(comp(prefix + "reverse", C::translation, n, pair, P::none, {op, "reverse"}));
  out.push_back(comp(prefix + "upper", C::translation, n, pair, P::none, {op, "uppercase"}));
  if (with_upper_reverse) {
    out.push_back(comp(prefix + "upper_reverse", C::translation, n, pair, P::none, {op, "uppercase", "reverse"}));
  }
}

std::vector<TaskRecipe> build_catalog() {
  std::vector<TaskRecipe> c;
  // string operations
  c.push_back({"copying", C::string_ops, 20, false, {"copy"}, S::random_strings, "", P::none, "gTpigTHK"});
  c.push_back({"token_reversal", C::string_ops, 20, false, {"reverse"}, S::sampled_keys, "singular_plural", P::none, "cat"});
  c.push_back(proc("string_analogy", C::string_ops, 10, "string_analogy"));
  c.push_back({"simple_icl:uppercase", C::string_ops, 26, false, {"uppercase"}, S::alphabet_lower, "", P::none, ""});
  c.push_back({"simple_icl:lowercase", C::string_ops, 26, false, {"lowercase"}, S::alphabet_upper, "", P::none, ""});
  c.push_back(lex("simple_icl:first_letter", C::string_ops, 190, "first_letter", "sentences"));
  c.push_back(lex("simple_icl:last_letter", C::string_ops, 190, "last_letter", "sentences"));
  // morphology
  c.push_back(lex("simple_icl:present_to_gerund", C::morphology, 179, "present_to_gerund", "present_gerund"));
  c.push_back(lex("simple_icl:singular_to_plural", C::morphology, 165, "singular_to_plural", "singular_plural"));
  // translation
  c.push_back(lex("simple_icl:translate_eng_fr", C::translation, 173, "translate_eng_fr", "eng_fr"));
  c.push_back(lex("simple_icl:translate_fr_eng", C::translation, 175, "translate_fr_eng", "fr_eng"));
  c.push_back(lex("simple_icl:translate_eng_sp", C::translation, 178, "translate_eng_sp", "eng_sp"));
  c.push_back(lex("simple_icl:translate_sp_eng", C::translation, 178, "translate_sp_eng", "sp_eng"));
  // world knowledge
  c.push_back(lex("simple_icl:country_to_capital", C::world_knowledge, 184, "country_to_capital", "country_capital"));
  c.push_back(
      lex("simple_icl:country_to_currency", C::world_knowledge, 198, "country_to_currency", "country_currency"));
  // arithmetic
  c.push_back(proc("basic_arithmetic", C::arithmetic, 10, "basic_arithmetic"));
  c.push_back(proc("math", C::arithmetic, 20, "math"));
  c.push_back(proc("multistep_arithmetic:two_step", C::arithmetic, 20, "two_step"));
  c.push_back(proc("multistep_arithmetic:three_step", C::arithmetic, 20, "three_step"));
  // logic
  c.push_back(proc("logical_ops:negation", C::logic, 12, "negation"));
  c.push_back(proc("logical_ops:conjunction", C::logic, 12, "conjunction"));
  c.push_back(proc("logical_ops:conditional", C::logic, 12, "conditional"));
  // reading comprehension
  c.push_back(proc("fact_extraction:extract_entity", C::reading_comprehension, 20, "extract_entity"));
  c.push_back(proc("fact_extraction:extract_number", C::reading_comprehension, 20, "extract_number"));
  c.push_back(proc("fact_extraction:extract_location", C::reading_comprehension, 20, "extract_location"));
  c.push_back(proc("coreference:pronoun_simple", C::reading_comprehension, 20, "pronoun_simple"));
  c.push_back(proc("coreference:pronoun_hard", C::reading_comprehension, 20, "pronoun_hard"));
  c.push_back(proc("ignoring_context", C::reading_comprehension, 5, "ignoring_context"));
  c.push_back(proc("ioi_task", C::reading_comprehension, 1000, "ioi"));
  c.push_back(proc("part_of_speech", C::reading_comprehension, 15, "part_of_speech"));
  // FRCT placeholders
  c.push_back(frct("textfrct:RG1", 30));
  c.push_back(frct("textfrct:RG2", 30));
  c.push_back(frct("textfrct:RG3", 30));
  c.push_back(frct("textfrct:RL1", 30));
  c.push_back(frct("textfrct:RL3", 20));
  c.push_back(frct("textfrct:RL4", 24));
  c.push_back(frct("textfrct:CV1", 50));
  c.push_back(frct("textfrct:CV2", 40));
  c.push_back(frct("textfrct:CV3", 36));
  c.push_back(frct("textfrct:I1", 30));
  c.push_back(frct("textfrct:I2", 28));
  c.push_back(frct("textfrct:MA2", 30));
  c.push_back(frct("textfrct:MA3", 30));
  c.push_back(frct("textfrct:V1", 36));
  c.push_back(frct("textfrct:V2", 36));
  c.push_back(frct("textfrct:V3", 48));
  c.push_back(frct("textfrct:V4", 36));
  c.push_back(frct("textfrct:V5", 36));

  // morphology composites
  c.push_back(comp("compositional:gerund_lower", C::morphology, 178, "present_gerund", P::upper,
                   {"lowercase", "present_to_gerund"}));
  c.push_back(comp("compositional:gerund_upper", C::morphology, 178, "present_gerund", P::none,
                   {"present_to_gerund", "uppercase"}));
  c.push_back(comp("compositional:gerund_reverse", C::morphology, 178, "present_gerund", P::none,
                   {"present_to_gerund", "reverse"}));
  c.push_back(comp("compositional:gerund_upper_reverse", C::morphology, 178, "present_gerund", P::none,
                   {"present_to_gerund", "uppercase", "reverse"}));
  c.push_back(comp("compositional:plural_lower", C::morphology, 165, "singular_plural", P::upper,
                   {"lowercase", "singular_to_plural"}));
  c.push_back(comp("compositional:plural_upper", C::morphology, 165, "singular_plural", P::none,
                   {"singular_to_plural", "uppercase"}));
  c.push_back(comp("compositional:plural_reverse", C::morphology, 165, "singular_plural", P::none,
                   {"singular_to_plural", "reverse"}));
  c.push_back(comp("compositional:plural_upper_reverse", C::morphology, 165, "singular_plural", P::none,
                   {"singular_to_plural", "uppercase", "reverse"}));
  // translation composites
  translation_composites(c, "eng_fr", 173, true);
  translation_composites(c, "eng_sp", 178, true);
  translation_composites(c, "fr_eng", 171, false);
  translation_composites(c, "sp_eng", 178, false);
  // case and reversal chains
  c.push_back(comp("compositional:lower_first", C::string_ops, 971, "words", P::upper, {"lowercase", "first_letter"}));
  c.push_back(comp("compositional:lower_last", C::string_ops, 971, "words", P::upper, {"lowercase", "last_letter"}));
  c.push_back(comp("compositional:lower_reverse", C::string_ops, 971, "words", P::upper, {"lowercase", "reverse"}));
  c.push_back(comp("compositional:upper_first", C::string_ops, 971, "words", P::lower, {"uppercase", "first_letter"}));
  c.push_back(comp("compositional:upper_last", C::string_ops, 971, "words", P::lower, {"uppercase", "last_letter"}));
  c.push_back(comp("compositional:upper_reverse", C::string_ops, 971, "words", P::lower, {"uppercase", "reverse"}));
  c.push_back(comp("compositional:reverse_first", C::string_ops, 971, "words", P::none, {"reverse", "first_letter"}));
  c.push_back(comp("compositional:reverse_last", C::string_ops, 971, "words", P::none, {"reverse", "last_letter"}));
  return c;
}

}  // namespace

std::span<const TaskRecipe> task_catalog() {
  static const std::vector<TaskRecipe> catalog = build_catalog();
  return catalog;
}

}  // namespace curriculum
