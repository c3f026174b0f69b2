#include "core/generators.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <set>

#include "core/error.hpp"

namespace curriculum {
namespace {

using Items = std::vector<GeneratedItem>;

template <typename T, std::size_t N>
const T& pick(const std::array<T, N>& a, Rng& rng) {
  return a[static_cast<std::size_t>(rng.below(N))];
}

int roll(Rng& rng, int lo, int hi) { return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1))); }

std::string s(int v) { return std::to_string(v); }
std::string s(std::string_view v) { return std::string(v); }

std::string capitalize(std::string v) {
  if (!v.empty() && v[0] >= 'a' && v[0] <= 'z') v[0] = static_cast<char>(v[0] - 'a' + 'A');
  return v;
}

std::string quoted(const std::string& v) { return "\"" + v + "\""; }

// Every generator emits its canonical example first, then draws until n
// distinct inputs exist. Gives up after many consecutive duplicates.
Items draw_distinct(std::string_view name, std::size_t n, GeneratedItem first,
                    const std::function<GeneratedItem()>& draw) {
  Items out;
  std::set<std::string> seen;
  if (n == 0) return out;
  seen.insert(first.input);
  out.push_back(std::move(first));
  std::size_t misses = 0;
  while (out.size() < n) {
    GeneratedItem item = draw();
    if (seen.insert(item.input).second) {
      out.push_back(std::move(item));
      misses = 0;
    } else if (++misses > 10000) {
      throw Error(Errc::count_mismatch, std::string(name) + ": cannot produce " + std::to_string(n) + " distinct items");
    }
  }
  return out;
}

// Fixed banks keep element 0 in place; the remainder is shuffled by the
// task seed and truncated.
Items from_bank(std::string_view name, Items bank, std::size_t n, Rng& rng) {
  if (bank.size() < n) {
    throw Error(Errc::count_mismatch, std::string(name) + ": item bank holds " + std::to_string(bank.size()) +
                                          ", need " + std::to_string(n));
  }
  if (bank.size() > 1) rng.shuffle(std::span<GeneratedItem>(bank).subspan(1));
  bank.resize(n);
  return bank;
}

constexpr std::array<std::string_view, 10> kFemale{"Alice", "Mary", "Sarah", "Emma", "Olivia",
                                                    "Sophia", "Grace", "Laura", "Hannah", "Julia"};
constexpr std::array<std::string_view, 10> kMale{"Bob", "John", "Henry", "Phil", "David",
                                                  "Michael", "Daniel", "Thomas", "Peter", "Paul"};
constexpr std::array<std::string_view, 10> kPlaces{"park", "harbor", "store", "school", "garden",
                                                   "station", "restaurant", "office", "library", "market"};
constexpr std::array<std::string_view, 10> kObjects{"basket", "book", "ring", "drink", "necklace",
                                                    "snack", "bone", "computer", "bottle", "kite"};
constexpr std::array<std::string_view, 6> kGoods{"apples", "pencils", "coins", "stamps", "cookies", "marbles"};
constexpr std::array<std::string_view, 10> kNumberWords{"one", "two", "three", "four", "five",
                                                        "six", "seven", "eight", "nine", "ten"};

std::string any_name(Rng& rng) { return s(rng.below(2) == 0 ? pick(kFemale, rng) : pick(kMale, rng)); }

std::pair<std::string, std::string> two_names(Rng& rng) {
  std::string a = any_name(rng);
  std::string b = any_name(rng);
  while (b == a) b = any_name(rng);
  return {a, b};
}

Items string_analogy(std::size_t n, Rng& rng) {
  auto triple = [](int a, int shift) {
    std::string t;
    t += static_cast<char>('a' + a);
    t += static_cast<char>('a' + a + 1);
    t += static_cast<char>('a' + a + 2 + shift);
    return t;
  };
  auto item = [&](int x, int y) {
    return GeneratedItem{triple(x, 0) + " → " + triple(x, 1) + ", " + triple(y, 0) + " → ?", {triple(y, 1)}};
  };
  return draw_distinct("string_analogy", n, item(0, 8), [&] {
    const int x = roll(rng, 0, 22);
    int y = roll(rng, 0, 22);
    while (y == x) y = roll(rng, 0, 22);
    return item(x, y);
  });
}

Items basic_arithmetic(std::size_t n, Rng& rng) {
  auto item = [](int a, int b) { return GeneratedItem{"What is " + s(a) + " + " + s(b) + "?", {s(a + b)}}; };
  return draw_distinct("basic_arithmetic", n, item(5, 3), [&] { return item(roll(rng, 1, 9), roll(rng, 1, 9)); });
}

Items math(std::size_t n, Rng& rng) {
  return draw_distinct("math", n, {"4 * 1", {"4"}}, [&] {
    int a = roll(rng, 0, 9);
    int b = roll(rng, 0, 9);
    switch (rng.below(3)) {
      case 0:
        return GeneratedItem{s(a) + " + " + s(b), {s(a + b)}};
      case 1:
        if (a < b) std::swap(a, b);
        return GeneratedItem{s(a) + " - " + s(b), {s(a - b)}};
      default:
        return GeneratedItem{s(a) + " * " + s(b), {s(a * b)}};
    }
  });
}

Items two_step(std::size_t n, Rng& rng) {
  return draw_distinct("multistep_arithmetic:two_step", n, {"3 + 4, then multiply by 2", {"14"}}, [&] {
    const int a = roll(rng, 1, 9);
    const int b = roll(rng, 1, 9);
    const int c = roll(rng, 2, 9);
    switch (rng.below(3)) {
      case 0:
        return GeneratedItem{s(a) + " + " + s(b) + ", then multiply by " + s(c), {s((a + b) * c)}};
      case 1:
        return GeneratedItem{s(a) + " * " + s(b) + ", then add " + s(c), {s(a * b + c)}};
      default:
        return GeneratedItem{s(a + b) + " - " + s(b) + ", then multiply by " + s(c), {s(a * c)}};
    }
  });
}

Items three_step(std::size_t n, Rng& rng) {
  return draw_distinct("multistep_arithmetic:three_step", n, {"Start with 10, subtract 3, then multiply by 4", {"28"}},
                       [&] {
                         const int a = roll(rng, 2, 12);
                         const int b = roll(rng, 1, 9);
                         const int c = roll(rng, 2, 5);
                         const std::string start = "Start with ";
                         switch (rng.below(4)) {
                           case 0:
                             return GeneratedItem{start + s(a) + ", add " + s(b) + ", then multiply by " + s(c),
                                                  {s((a + b) * c)}};
                           case 1:
                             return GeneratedItem{start + s(a + b) + ", subtract " + s(b) + ", then multiply by " + s(c),
                                                  {s(a * c)}};
                           case 2:
                             return GeneratedItem{start + s(a + b) + ", subtract " + s(b) + ", then add " + s(c),
                                                  {s(a + c)}};
                           default:
                             return GeneratedItem{start + s(a) + ", multiply by " + s(c) + ", then subtract " + s(b),
                                                  {s(a * c - b)}};
                         }
                       });
}

Items negation(std::size_t n, Rng& rng) {
  constexpr std::array<std::string_view, 6> subjects{"robots", "birds", "cats", "students", "cars", "trees"};
  constexpr std::array<std::string_view, 5> abilities{"move", "fly", "swim", "sing", "grow"};
  auto item = [](const std::string& statement, const std::string& candidate, bool correct) {
    return GeneratedItem{"Statement: " + statement + "\nCandidate: " + candidate + "\nIs this a correct logical negation?",
                         {correct ? "True" : "False"}};
  };
  return draw_distinct("logical_ops:negation", n, item("All robots can move.", "Some robots cannot move.", true), [&] {
    const std::string sub = s(pick(subjects, rng));
    const std::string ab = s(pick(abilities, rng));
    const bool universal = rng.below(2) == 0;
    const bool correct = rng.below(2) == 0;
    if (universal) {
      return item("All " + sub + " can " + ab + ".",
                  correct ? "Some " + sub + " cannot " + ab + "." : "No " + sub + " can " + ab + ".", correct);
    }
    return item("Some " + sub + " can " + ab + ".",
                correct ? "No " + sub + " can " + ab + "." : "Some " + sub + " cannot " + ab + ".", correct);
  });
}

Items conjunction(std::size_t n, Rng& rng) {
  constexpr std::array<std::pair<char, char>, 3> letters{{{'A', 'B'}, {'C', 'D'}, {'P', 'Q'}}};
  const auto tv = [](bool v) { return v ? std::string("True") : std::string("False"); };
  Items bank;
  for (const auto& [l, r] : letters) {
    for (int mask = 3; mask >= 0; --mask) {
      const bool a = (mask & 1) != 0;
      const bool b = (mask & 2) != 0;
      const std::string L(1, l);
      const std::string R(1, r);
      bank.push_back({"Fact " + L + " is " + tv(a) + ". Fact " + R + " is " + tv(b) + ".\nClaim: " + L + " AND " + R +
                          ". Is the claim true?",
                      {tv(a && b)}});
    }
  }
  return from_bank("logical_ops:conjunction", std::move(bank), n, rng);
}

Items conditional(std::size_t n, Rng& rng) {
  struct Rule {
    std::string_view p, q, not_p;
  };
  constexpr std::array<Rule, 6> rules{{
      {"it rains", "the ground gets wet", "it does not rain"},
      {"the alarm rings", "the students leave", "the alarm does not ring"},
      {"the light is red", "the cars stop", "the light is not red"},
      {"the water boils", "steam rises", "the water does not boil"},
      {"the store is open", "the lights are on", "the store is not open"},
      {"the baby cries", "the mother wakes up", "the baby does not cry"},
  }};
  Items bank;
  for (const auto& r : rules) {
    const std::string rule = "Rule: If " + s(r.p) + ", " + s(r.q) + ".\nFact: ";
    bank.push_back({rule + capitalize(s(r.p)) + ". Does the conclusion follow?", {"True"}});
    bank.push_back({rule + capitalize(s(r.not_p)) + ". Does the conclusion follow?", {"False"}});
  }
  return from_bank("logical_ops:conditional", std::move(bank), n, rng);
}

Items extract_entity(std::size_t n, Rng& rng) {
  auto item = [](const std::string& giver, const std::string& count, const std::string& goods,
                 const std::string& receiver, const std::string& place) {
    return GeneratedItem{"Passage: " + quoted(giver + " gave " + count + " " + goods + " to " + receiver + " at the " +
                                              place + ".") +
                             " Who received the " + goods + "?",
                         {receiver}};
  };
  return draw_distinct("fact_extraction:extract_entity", n, item("Alice", "five", "apples", "Bob", "park"), [&] {
    const auto [giver, receiver] = two_names(rng);
    return item(giver, s(pick(kNumberWords, rng)), s(pick(kGoods, rng)), receiver, s(pick(kPlaces, rng)));
  });
}

Items extract_number(std::size_t n, Rng& rng) {
  constexpr std::array<std::string_view, 5> days{"Monday", "Tuesday", "Wednesday", "Thursday", "Friday"};
  auto item = [](const std::string& giver, int count, const std::string& goods, const std::string& receiver,
                 const std::string& day) {
    return GeneratedItem{"Passage: " + quoted(giver + " gave " + s(count) + " " + goods + " to " + receiver + " on " +
                                              day + ".") +
                             " How many " + goods + " did " + giver + " give?",
                         {s(count)}};
  };
  return draw_distinct("fact_extraction:extract_number", n, item("John", 5, "apples", "Mary", "Tuesday"), [&] {
    const auto [giver, receiver] = two_names(rng);
    return item(giver, roll(rng, 2, 20), s(pick(kGoods, rng)), receiver, s(pick(days, rng)));
  });
}

Items extract_location(std::size_t n, Rng& rng) {
  constexpr std::array<std::string_view, 5> animals{"cat", "dog", "bird", "rabbit", "mouse"};
  constexpr std::array<std::string_view, 5> colors{"red", "blue", "green", "yellow", "brown"};
  constexpr std::array<std::string_view, 4> things{"mat", "rug", "chair", "box"};
  constexpr std::array<std::string_view, 6> rooms{"kitchen", "garage", "bedroom", "attic", "hallway", "office"};
  auto item = [](const std::string& animal, const std::string& color, const std::string& thing,
                 const std::string& room) {
    return GeneratedItem{"Passage: " + quoted("The " + animal + " sat on the " + color + " " + thing + " in the " +
                                              room + ".") +
                             " Where is the " + thing + "?",
                         {"the " + room}};
  };
  return draw_distinct("fact_extraction:extract_location", n, item("cat", "red", "mat", "kitchen"), [&] {
    return item(s(pick(animals, rng)), s(pick(colors, rng)), s(pick(things, rng)), s(pick(rooms, rng)));
  });
}

Items pronoun_simple(std::size_t n, Rng& rng) {
  constexpr std::array<std::string_view, 4> verbs{"told", "reminded", "warned", "promised"};
  auto item = [](const std::string& first, const std::string& verb, const std::string& second,
                 const std::string& pronoun, const std::string& gold) {
    return GeneratedItem{quoted(first + " " + verb + " " + second + " that " + pronoun + " would be late.") +
                             " Who does " + quoted(pronoun) + " refer to?",
                         {gold}};
  };
  return draw_distinct("coreference:pronoun_simple", n, item("Alice", "told", "Bob", "she", "Alice"), [&] {
    const std::string she = s(pick(kFemale, rng));
    const std::string he = s(pick(kMale, rng));
    const std::string verb = s(pick(verbs, rng));
    const bool female_first = rng.below(2) == 0;
    const bool ask_she = rng.below(2) == 0;
    return item(female_first ? she : he, verb, female_first ? he : she, ask_she ? "she" : "he", ask_she ? she : he);
  });
}

Items pronoun_hard(std::size_t n, Rng& rng) {
  constexpr std::array<std::pair<std::string_view, std::string_view>, 10> pairs{{
      {"trophy", "suitcase"}, {"ball", "box"},       {"book", "bag"}, {"laptop", "drawer"}, {"guitar", "case"},
      {"painting", "frame"},  {"cake", "tin"},       {"sofa", "van"}, {"shoe", "closet"},   {"bottle", "fridge"},
  }};
  Items bank;
  for (const auto& [object, container] : pairs) {
    const std::string head =
        "\"The " + s(object) + " didn't fit in the " + s(container) + " because it was too ";
    bank.push_back({head + "big.\" What was too big?", {"the " + s(object)}});
  }
  for (const auto& [object, container] : pairs) {
    const std::string head =
        "\"The " + s(object) + " didn't fit in the " + s(container) + " because it was too ";
    bank.push_back({head + "small.\" What was too small?", {"the " + s(container)}});
  }
  return from_bank("coreference:pronoun_hard", std::move(bank), n, rng);
}

Items ignoring_context(std::size_t n, Rng& rng) {
  constexpr std::array<std::string_view, 6> before{"The weather was pleasant all week.", "Many people read at night.",
                                                   "The museum opens at nine.", "Trains were delayed by the storm.",
                                                   "The garden needs more water.", "A new bakery opened downtown."};
  constexpr std::array<std::string_view, 6> after{"Nobody noticed the change.", "The meeting ended early.",
                                                  "Prices rose in the spring.", "The river was calm.",
                                                  "Lunch was served at noon.", "The road was closed."};
  constexpr std::array<char, 5> vars{'X', 'Y', 'Z', 'K', 'M'};
  auto item = [](const std::string& pre, char v, int value, const std::string& post) {
    const std::string name(1, v);
    return GeneratedItem{pre + " " + name + " = " + s(value) + ". " + post + "\nQuestion: What is " + name + "?",
                         {s(value)}};
  };
  return draw_distinct("ignoring_context", n, item("Some text here.", 'X', 5, "More text."), [&] {
    return item(s(pick(before, rng)), pick(vars, rng), roll(rng, 1, 99), s(pick(after, rng)));
  });
}

Items ioi(std::size_t n, Rng& rng) {
  auto item = [](const std::string& a, const std::string& b, const std::string& place, const std::string& giver,
                 const std::string& obj) {
    return GeneratedItem{"Then, " + a + " and " + b + " had a lot of fun at the " + place + ". " + giver + " gave a " +
                             obj + " to",
                         {giver == a ? b : a}};
  };
  return draw_distinct("ioi_task", n, item("Henry", "Phil", "harbor", "Henry", "basket"), [&] {
    const auto [a, b] = two_names(rng);
    const std::string giver = rng.below(2) == 0 ? a : b;
    return item(a, b, s(pick(kPlaces, rng)), giver, s(pick(kObjects, rng)));
  });
}

Items part_of_speech(std::size_t n, Rng& rng) {
  struct Row {
    std::string_view sentence, word, tag;
  };
  constexpr std::array<Row, 20> rows{{
      {"The cat is in the house.", "cat", "noun"},
      {"She runs every morning.", "runs", "verb"},
      {"The sky looks blue today.", "blue", "adjective"},
      {"He spoke quietly to the child.", "quietly", "adverb"},
      {"The book is under the table.", "under", "preposition"},
      {"They visited the museum.", "They", "pronoun"},
      {"A tall tree stood by the road.", "tall", "adjective"},
      {"The river flows to the sea.", "river", "noun"},
      {"We sang loudly at the party.", "sang", "verb"},
      {"The dog barked suddenly.", "suddenly", "adverb"},
      {"The keys are on the shelf.", "on", "preposition"},
      {"I found a coin.", "I", "pronoun"},
      {"The old bridge collapsed.", "old", "adjective"},
      {"Children play in the park.", "play", "verb"},
      {"The teacher smiled warmly.", "teacher", "noun"},
      {"He carefully opened the box.", "carefully", "adverb"},
      {"The lamp is near the window.", "near", "preposition"},
      {"She gave him a gift.", "him", "pronoun"},
      {"The bright stars shone.", "bright", "adjective"},
      {"Birds build nests in spring.", "build", "verb"},
  }};
  Items bank;
  for (const auto& r : rows) {
    bank.push_back({s(r.sentence) + " The part of speech for " + quoted(s(r.word)) + " is _", {s(r.tag)}});
  }
  return from_bank("part_of_speech", std::move(bank), n, rng);
}

}  // namespace

std::vector<std::string> random_letter_strings(std::size_t n, std::size_t length, Rng& rng) {
  constexpr std::string_view letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
  std::set<std::string> seen;
  std::vector<std::string> out;
  while (out.size() < n) {
    std::string v;
    for (std::size_t i = 0; i < length; ++i) v += letters[static_cast<std::size_t>(rng.below(letters.size()))];
    if (seen.insert(v).second) out.push_back(std::move(v));
  }
  return out;
}

std::vector<GeneratedItem> generate_items(std::string_view generator, std::size_t n, Rng& rng) {
  using Fn = Items (*)(std::size_t, Rng&);
  static const std::map<std::string_view, Fn> table{
      {"string_analogy", string_analogy},
      {"basic_arithmetic", basic_arithmetic},
      {"math", math},
      {"two_step", two_step},
      {"three_step", three_step},
      {"negation", negation},
      {"conjunction", conjunction},
      {"conditional", conditional},
      {"extract_entity", extract_entity},
      {"extract_number", extract_number},
      {"extract_location", extract_location},
      {"pronoun_simple", pronoun_simple},
      {"pronoun_hard", pronoun_hard},
      {"ignoring_context", ignoring_context},
      {"ioi", ioi},
      {"part_of_speech", part_of_speech},
  };
  const auto it = table.find(generator);
  if (it == table.end()) throw Error(Errc::unknown_operation, "unknown generator: " + std::string(generator));
  return it->second(n, rng);
}

}  // namespace curriculum
