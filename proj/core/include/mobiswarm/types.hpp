#ifndef MOBISWARM_TYPES_HPP
#define MOBISWARM_TYPES_HPP

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mobiswarm {

using PeerId = std::uint32_t;

// Simulation time in fixed-point milliseconds. All protocol timing is integer
// so that runs replay bit-identically; floating point is confined to metrics.
using SimTime = std::int64_t;

// Bandwidth and allocation rates in bytes per second.
using Rate = std::int64_t;

constexpr SimTime kMillisPerSecond = 1000;

inline constexpr SimTime seconds_to_ms(double s) {
  return static_cast<SimTime>(s * kMillisPerSecond);
}

enum class PeerClass : std::uint8_t { Mobile, Static };

inline const char* to_string(PeerClass c) {
  return c == PeerClass::Mobile ? "mobile" : "static";
}

enum class Mode : std::uint8_t { Baseline, Hybrid };

inline const char* to_string(Mode m) {
  return m == Mode::Baseline ? "baseline" : "hybrid";
}

struct Bandwidth {
  Rate up = 0;    // upload capacity, bytes/s
  Rate down = 0;  // download capacity, bytes/s

  bool valid() const { return up > 0 && down > 0; }
};

struct BlockId {
  std::uint32_t piece = 0;
  std::uint32_t block = 0;

  auto operator<=>(const BlockId&) const = default;
};

// Configuration problems are collected and reported all at once.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> violations)
      : std::runtime_error(join(violations)), violations_(std::move(violations)) {}
  explicit ConfigError(const std::string& one)
      : ConfigError(std::vector<std::string>{one}) {}

  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) {
      if (!out.empty()) out += "; ";
      out += s;
    }
    return out;
  }
  std::vector<std::string> violations_;
};

// Protocol-level rejection by the tracker (state is left unchanged).
class TrackerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Internal simulation invariant violation; aborts the run.
class SimError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline std::int64_t ceil_div(std::int64_t num, std::int64_t den) {
  return (num + den - 1) / den;
}

}  // namespace mobiswarm

#endif  // MOBISWARM_TYPES_HPP
