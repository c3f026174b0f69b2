#pragma once

#include <sstream>
#include <string>

namespace curriculum::log {

enum class Level { debug = 0, info = 1, warn = 2, error = 3, off = 4 };

// Read once from CURRICULUM_LOG (debug|info|warn|error|off); default warn.
Level threshold();
void set_threshold(Level level);
void write(Level level, const std::string& message);

template <typename... Args>
void emit(Level level, const Args&... args) {
  if (level < threshold()) return;
  std::ostringstream os;
  (os << ... << args);
  write(level, os.str());
}

template <typename... Args> void debug(const Args&... a) { emit(Level::debug, a...); }
template <typename... Args> void info(const Args&... a) { emit(Level::info, a...); }
template <typename... Args> void warn(const Args&... a) { emit(Level::warn, a...); }

}  // namespace curriculum::log
