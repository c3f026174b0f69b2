#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace curriculum {

struct LexiconEntry {
  std::string key;
  std::vector<std::string> values;
};

class Lexicon {
 public:
  Lexicon() = default;
  Lexicon(std::string name, std::vector<LexiconEntry> entries);

  const std::string& name() const noexcept { return name_; }
  const std::vector<LexiconEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

  /// nullptr when the key is outside the lexicon's domain.
  const std::vector<std::string>* lookup(std::string_view key) const;

 private:
  std::string name_;
  std::vector<LexiconEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Parses the shipped TSV format: `key` or `key<TAB>v1|v2|...` per line.
Lexicon parse_lexicon(std::string name, std::string_view tsv);

class LexiconSet {
 public:
  void add(Lexicon lexicon, std::string sha256_hex);

  /// Throws Errc::lexicon_missing.
  const Lexicon& get(std::string_view name) const;
  bool contains(std::string_view name) const;

  const std::map<std::string, std::string, std::less<>>& checksums() const noexcept { return checksums_; }
  const std::string& version() const noexcept { return version_; }
  void set_version(std::string v) { version_ = std::move(v); }

 private:
  std::map<std::string, Lexicon, std::less<>> lexicons_;
  std::map<std::string, std::string, std::less<>> checksums_;
  std::string version_;
};

std::string sha256_hex(std::string_view bytes);

/// dir/lexicons/index.json lists every lexicon with its declared entry
/// count and SHA-256. Throws lexicon_missing, checksum_mismatch or
/// count_mismatch.
LexiconSet load_lexicons(const std::filesystem::path& data_dir);

/// CURRICULUM_DATA if set, else the compiled-in data directory.
std::filesystem::path default_data_dir();

}  // namespace curriculum
