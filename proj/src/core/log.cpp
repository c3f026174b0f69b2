#include "core/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string_view>

#include "core/error.hpp"

namespace curriculum {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::ok: return "ok";
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::parse_error: return "ParseError";
    case Errc::io_error: return "IoError";
    case Errc::malformed_record: return "MalformedRecord";
    case Errc::malformed_file: return "MalformedFile";
    case Errc::lexicon_missing: return "LexiconMissing";
    case Errc::checksum_mismatch: return "ChecksumMismatch";
    case Errc::count_mismatch: return "CountMismatch";
    case Errc::unknown_operation: return "UnknownOperation";
    case Errc::input_outside_domain: return "InputOutsideDomain";
    case Errc::chain_domain_error: return "ChainDomainError";
    case Errc::not_enough_instances: return "NotEnoughInstances";
    case Errc::too_few_points: return "TooFewPoints";
    case Errc::empty_series: return "EmptySeries";
    case Errc::too_few_shared_tasks: return "TooFewSharedTasks";
    case Errc::zero_vector: return "ZeroVector";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::too_few_prompts: return "TooFewPrompts";
    case Errc::solve_failure: return "SolveFailure";
    case Errc::empty_basis: return "EmptyBasis";
    case Errc::missing_fv: return "MissingFV";
    case Errc::invalid_params: return "InvalidParams";
    case Errc::internal: return "Internal";
  }
  return "Unknown";
}

namespace log {
namespace {

Level parse_env() {
  const char* raw = std::getenv("CURRICULUM_LOG");
  if (raw == nullptr) return Level::warn;
  std::string_view v(raw);
  if (v == "debug") return Level::debug;
  if (v == "info") return Level::info;
  if (v == "warn" || v == "warning") return Level::warn;
  if (v == "error") return Level::error;
  if (v == "off" || v == "none") return Level::off;
  return Level::warn;
}

std::atomic<int>& level_slot() {
  static std::atomic<int> slot{static_cast<int>(parse_env())};
  return slot;
}

const char* tag(Level level) {
  switch (level) {
    case Level::debug: return "debug";
    case Level::info: return "info";
    case Level::warn: return "warn";
    case Level::error: return "error";
    case Level::off: break;
  }
  return "";
}

}  // namespace

Level threshold() { return static_cast<Level>(level_slot().load()); }

void set_threshold(Level level) { level_slot().store(static_cast<int>(level)); }

void write(Level level, const std::string& message) {
  static std::mutex mu;
  std::lock_guard lock(mu);
  std::cerr << "[curriculum " << tag(level) << "] " << message << '\n';
}

}  // namespace log
}  // namespace curriculum
