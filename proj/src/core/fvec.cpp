#include "core/fvec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include <json.hpp>

#include "core/error.hpp"
#include "core/io.hpp"

namespace curriculum {

static_assert(sizeof(float) == 4 && std::numeric_limits<float>::is_iec559, "FVEC needs IEEE-754 binary32");

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

std::uint32_t get_u32(std::string_view b, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + i])) << (8 * i);
  return v;
}

std::string sanitize(std::string_view id) {
  std::string out;
  for (std::size_t i = 0; i < id.size(); ++i) {
    const char c = id[i];
    if (c == ':') {
      out += "__";
    } else if (c == '/' || c == '\\') {
      out += '_';
    } else {
      out += c;
    }
  }
  return out;
}

}  // namespace

void validate(const FunctionVector& fv) {
  const auto& m = fv.meta;
  auto fail = [&](const std::string& why) {
    throw Error(Errc::invalid_argument, "function vector (" + m.model_id + ", " + m.task_id + "): " + why);
  };
  if (m.model_id.empty() || m.task_id.empty()) fail("model_id and task_id are required");
  if (fv.values.empty()) fail("empty vector");
  for (float x : fv.values) {
    if (!std::isfinite(x)) fail("non-finite component");
  }
  if (m.extraction == "cie_heads") {
    if (m.heads.empty()) fail("cie_heads extraction without heads");
    for (const auto& h : m.heads) {
      if (h.first != m.heads.front().first) fail("heads span more than one block");
    }
  } else if (m.extraction != "hidden_state") {
    fail("unknown extraction '" + m.extraction + "'");
  }
  if (m.n_correct_prompts < 1) fail("n_correct_prompts must be >= 1");
  if (m.layer < 0) fail("negative layer");
  if (!std::isfinite(m.checkpoint_tokens_b) || m.checkpoint_tokens_b < 0) fail("bad checkpoint_tokens_b");
}

std::string metadata_to_json(const FvMetadata& m) {
  nlohmann::ordered_json j;
  j["model_id"] = m.model_id;
  j["task_id"] = m.task_id;
  j["extraction"] = m.extraction;
  j["layer"] = m.layer;
  j["heads"] = nlohmann::ordered_json::array();
  for (const auto& [block, head] : m.heads) j["heads"].push_back({block, head});
  j["n_correct_prompts"] = m.n_correct_prompts;
  j["checkpoint_tokens_b"] = m.checkpoint_tokens_b;
  if (m.prompt_index) j["prompt_index"] = *m.prompt_index;
  return j.dump();
}

FvMetadata metadata_from_json(std::string_view text) {
  FvMetadata m;
  try {
    const auto j = nlohmann::json::parse(text);
    m.model_id = j.at("model_id").get<std::string>();
    m.task_id = j.at("task_id").get<std::string>();
    m.extraction = j.at("extraction").get<std::string>();
    m.layer = j.at("layer").get<int>();
    for (const auto& h : j.at("heads")) m.heads.emplace_back(h.at(0).get<int>(), h.at(1).get<int>());
    m.n_correct_prompts = j.at("n_correct_prompts").get<std::size_t>();
    m.checkpoint_tokens_b = j.at("checkpoint_tokens_b").get<double>();
    if (j.contains("prompt_index") && !j.at("prompt_index").is_null()) {
      m.prompt_index = j.at("prompt_index").get<std::size_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::malformed_file, e.what());
  }
  return m;
}

std::string encode_fvec(const FunctionVector& fv) {
  validate(fv);
  std::string out = "FVEC";
  put_u32(out, kFvecVersion);
  put_u32(out, static_cast<std::uint32_t>(fv.values.size()));
  for (float x : fv.values) put_u32(out, std::bit_cast<std::uint32_t>(x));
  const std::string trailer = metadata_to_json(fv.meta);
  out += trailer;
  put_u32(out, static_cast<std::uint32_t>(trailer.size()));
  return out;
}

FunctionVector decode_fvec(std::string_view b, std::string_view source) {
  auto bad = [&](const std::string& why) {
    return Error(Errc::malformed_file, std::string(source) + ": " + why);
  };
  if (b.size() < 16 || b.substr(0, 4) != "FVEC") throw bad("missing FVEC magic");
  const std::uint32_t version = get_u32(b, 4);
  if (version != kFvecVersion) throw bad("unsupported version " + std::to_string(version));
  const std::uint64_t dim = get_u32(b, 8);
  const std::uint64_t trailer_len = get_u32(b, b.size() - 4);
  if (12 + 4 * dim + trailer_len + 4 != b.size()) throw bad("length fields do not match file size");
  FunctionVector fv;
  fv.values.resize(dim);
  for (std::uint64_t i = 0; i < dim; ++i) fv.values[i] = std::bit_cast<float>(get_u32(b, 12 + 4 * i));
  try {
    fv.meta = metadata_from_json(b.substr(12 + 4 * dim, trailer_len));
  } catch (const Error& e) {
    throw bad(std::string("bad metadata trailer: ") + e.what());
  }
  try {
    validate(fv);
  } catch (const Error& e) {
    throw bad(e.what());
  }
  return fv;
}

void write_fvec(const FunctionVector& fv, const std::filesystem::path& path) { write_text_file(path, encode_fvec(fv)); }

FunctionVector read_fvec(const std::filesystem::path& path) { return decode_fvec(read_text_file(path), path.string()); }

std::vector<FunctionVector> read_fvecs(const std::filesystem::path& path) {
  std::vector<FunctionVector> out;
  if (std::filesystem::is_regular_file(path)) {
    out.push_back(read_fvec(path));
    return out;
  }
  if (!std::filesystem::is_directory(path)) throw Error(Errc::io_error, "no such FV file or directory: " + path.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(path)) {
    if (e.is_regular_file() && e.path().extension() == ".fvec") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) out.push_back(read_fvec(f));
  return out;
}

std::filesystem::path fvec_relative_path(const FvMetadata& m) {
  std::string name = sanitize(m.task_id);
  if (m.prompt_index) name += ".p" + std::to_string(*m.prompt_index);
  return std::filesystem::path(sanitize(m.model_id)) / (name + ".fvec");
}

}  // namespace curriculum
