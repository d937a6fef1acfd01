#ifndef MOBISWARM_CONFIG_HPP
#define MOBISWARM_CONFIG_HPP

#include <cstdint>
#include <string>

#include "mobiswarm/types.hpp"

namespace mobiswarm {

// How a leecher ranks its choke candidates: bytes it received from them over
// the rate window (classic reciprocation) or bytes it sent to them.
enum class RankKey { Reciprocal, ObservedUpload };

std::string to_string(RankKey k);

// Everything a scenario needs besides mode and seed, which come from the
// command line. All sizes are bytes, rates bytes/second, latencies
// milliseconds, intervals seconds.
struct ScenarioConfig {
  // Content
  std::int64_t file_size = 4 * 1024 * 1024;
  std::int64_t piece_size = 256 * 1024;
  std::int64_t block_size = 16 * 1024;

  // Population. mobile_fraction applies to leechers; seeders are static.
  std::int64_t num_leechers = 100;
  std::int64_t num_seeders = 10;
  double mobile_fraction = 0.5;

  // Link profiles per class, plus the downlink threshold that separates them.
  Rate mobile_down = 40960;
  Rate mobile_up = 10240;
  Rate static_down = 512000;
  Rate static_up = 102400;
  Rate seeder_up = 102400;
  Rate mobile_down_threshold = 65536;

  // One-way base latency added to every block, by the slower endpoint.
  std::int64_t latency_mobile_ms = 150;
  std::int64_t latency_static_ms = 20;

  // Cadences
  std::int64_t choke_interval_s = 10;
  std::int64_t optimistic_interval_s = 30;
  std::int64_t rate_window_s = 20;
  std::int64_t announce_interval_s = 30;
  std::int64_t sample_interval_s = 1;
  std::int64_t duration_s = 3600;

  // Upload slots and tracker limits
  std::int64_t regular_slots = 4;
  std::int64_t u_default = 5;
  std::int64_t pipeline_depth = 5;
  std::int64_t budget_cap = 32;
  std::int64_t neighbor_sample = 50;

  // New neighbors earn full rate gradually over the trial period.
  std::int64_t trial_len_s = 120;
  std::int64_t warmup_min_permille = 300;

  // Hybrid-mode policy knobs
  Rate r_min_mobile = 10240;
  Rate min_seed_rate = 51200;
  double latency_threshold_s = 2.0;
  std::int64_t congestion_threshold_permille = 950;

  // Physics floor: a transfer never runs slower than this, however crowded
  // the receiver's downlink is.
  Rate min_transfer_rate = 2048;

  // Mobile peers may cycle offline and back. Off by default.
  bool churn_enabled = false;
  std::int64_t mean_online_s = 600;
  std::int64_t mean_offline_s = 60;

  RankKey rank_key = RankKey::Reciprocal;
  bool rotate_extra = false;  // rotate which mobiles get the extra seeder slots

  // Hybrid role split: every second initial seeder dedicates itself to static
  // peers, so the remaining seeders can widen toward mobiles without starving
  // the static side. Off by default; the surplus recycling in the upload
  // planner already protects the static side.
  bool split_seeder_roles = false;

  // Throws ConfigError listing every violated constraint, not just the first.
  void validate() const;

  // `key = value` lines, `#` or `;` comments, optional [section] headers
  // (ignored). Unknown keys and malformed values are collected into one
  // ConfigError. Parsed values are validated before returning.
  static ScenarioConfig from_ini_string(const std::string& text);
  static ScenarioConfig from_ini_file(const std::string& path);

  std::string to_ini_string() const;
};

}  // namespace mobiswarm

#endif  // MOBISWARM_CONFIG_HPP
