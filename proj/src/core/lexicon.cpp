#include "core/lexicon.hpp"

#include <openssl/evp.h>

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "core/error.hpp"
#include "core/text.hpp"

namespace curriculum {

Lexicon::Lexicon(std::string name, std::vector<LexiconEntry> entries)
    : name_(std::move(name)), entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (e.key.empty() || e.values.empty()) {
      throw Error(Errc::malformed_file, "lexicon " + name_ + ": empty key or value list", i + 1);
    }
    if (!index_.emplace(e.key, i).second) {
      throw Error(Errc::malformed_file, "lexicon " + name_ + ": duplicate key '" + e.key + "'", i + 1);
    }
  }
}

const std::vector<std::string>* Lexicon::lookup(std::string_view key) const {
  auto it = index_.find(std::string(key));
  return it == index_.end() ? nullptr : &entries_[it->second].values;
}

Lexicon parse_lexicon(std::string name, std::string_view tsv) {
  std::vector<LexiconEntry> entries;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < tsv.size()) {
    auto end = tsv.find('\n', pos);
    if (end == std::string_view::npos) end = tsv.size();
    std::string_view line = tsv.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!text::is_valid_utf8(line)) {
      throw Error(Errc::malformed_file, "lexicon " + name + ": invalid UTF-8", line_no);
    }
    LexiconEntry entry;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      entry.key = std::string(line);
      entry.values.push_back(entry.key);
    } else {
      entry.key = std::string(line.substr(0, tab));
      std::string_view rest = line.substr(tab + 1);
      std::size_t p = 0;
      while (true) {
        const auto bar = rest.find('|', p);
        std::string_view v = rest.substr(p, bar == std::string_view::npos ? std::string_view::npos : bar - p);
        if (v.empty()) throw Error(Errc::malformed_file, "lexicon " + name + ": empty value", line_no);
        entry.values.emplace_back(v);
        if (bar == std::string_view::npos) break;
        p = bar + 1;
      }
    }
    entries.push_back(std::move(entry));
  }
  return Lexicon(std::move(name), std::move(entries));
}

void LexiconSet::add(Lexicon lexicon, std::string sha256) {
  auto name = lexicon.name();
  checksums_[name] = std::move(sha256);
  lexicons_[name] = std::move(lexicon);
}

const Lexicon& LexiconSet::get(std::string_view name) const {
  auto it = lexicons_.find(name);
  if (it == lexicons_.end()) throw Error(Errc::lexicon_missing, "lexicon not loaded: " + std::string(name));
  return it->second;
}

bool LexiconSet::contains(std::string_view name) const { return lexicons_.find(name) != lexicons_.end(); }

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
    throw Error(Errc::internal, "SHA-256 computation failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

namespace {

std::string slurp(const std::filesystem::path& p, Errc missing_code) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(missing_code, "cannot open " + p.string());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

LexiconSet load_lexicons(const std::filesystem::path& data_dir) {
  const auto dir = data_dir / "lexicons";
  const std::string index_text = slurp(dir / "index.json", Errc::lexicon_missing);
  nlohmann::json index;
  try {
    index = nlohmann::json::parse(index_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::malformed_file, "lexicon index: " + std::string(e.what()));
  }
  LexiconSet set;
  set.set_version(index.value("lexicon_version", std::string{}));
  for (const auto& item : index.at("lexicons")) {
    const auto name = item.at("name").get<std::string>();
    const auto declared = item.at("entries").get<std::size_t>();
    const auto expected = item.at("sha256").get<std::string>();
    const std::string bytes = slurp(dir / item.at("file").get<std::string>(), Errc::lexicon_missing);
    const std::string actual = sha256_hex(bytes);
    if (actual != expected) {
      throw Error(Errc::checksum_mismatch, "lexicon " + name + ": sha256 " + actual + " != declared " + expected);
    }
    Lexicon lex = parse_lexicon(name, bytes);
    if (lex.size() != declared) {
      throw Error(Errc::count_mismatch, "lexicon " + name + ": " + std::to_string(lex.size()) +
                                            " entries, declared " + std::to_string(declared));
    }
    set.add(std::move(lex), actual);
  }
  return set;
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("CURRICULUM_DATA"); env != nullptr && *env != '\0') return env;
  return CURRICULUM_DATA_DIR;
}

}  // namespace curriculum
