#ifndef MOBISWARM_LOG_HPP
#define MOBISWARM_LOG_HPP

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>

namespace mobiswarm {

enum class LogLevel { Off, Info, Debug };

// MOBISWARM_LOG={off,info,debug}; unset or unrecognized means off. Diagnostics
// go to stderr so stdout stays parseable.
inline LogLevel log_level_from_env() {
  const char* v = std::getenv("MOBISWARM_LOG");
  if (v == nullptr) return LogLevel::Off;
  if (std::strcmp(v, "info") == 0) return LogLevel::Info;
  if (std::strcmp(v, "debug") == 0) return LogLevel::Debug;
  return LogLevel::Off;
}

inline void log_line(LogLevel have, LogLevel need, const std::string& msg) {
  if (static_cast<int>(have) >= static_cast<int>(need))
    std::fprintf(stderr, "%s\n", msg.c_str());
}

}  // namespace mobiswarm

#endif  // MOBISWARM_LOG_HPP
