#ifndef MOBISWARM_ENGINE_HPP
#define MOBISWARM_ENGINE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mobiswarm/config.hpp"
#include "mobiswarm/metrics.hpp"
#include "mobiswarm/policy.hpp"
#include "mobiswarm/types.hpp"

namespace mobiswarm {

struct RunOptions {
  // Record one text line per simulation event. The log is deterministic and
  // mode-free, so two runs that made the same decisions produce identical
  // bytes.
  bool capture_event_log = false;
};

// Snapshot of one upload plan as it was applied, kept for post-run audits.
struct PlanRecord {
  SimTime t = 0;
  PeerId uploader = 0;
  bool is_seeder = false;
  bool eligible = false;
  Rate up_rate = 0;
  std::vector<PlanAllocation> allocations;
  // tracker budget in force for each mobile destination at plan time
  std::vector<std::pair<PeerId, std::int64_t>> mobile_budgets;
};

struct DropRecord {
  SimTime t = 0;
  PeerId dest = 0;
  PeerId src = 0;
  double mean_latency_s = 0.0;
};

// How many mobiles were being fed by a seeder, against how many
// r_min_mobile-sized slots the eligible seeders could fund at that moment.
struct ServedPoint {
  SimTime t = 0;
  std::int64_t served = 0;
  std::int64_t bound_slots = 0;
  std::int64_t num_mobile = 0;
};

struct RunResult {
  RunSummary summary;
  std::vector<TimePoint> timeseries;
  std::vector<BlockTransferRecord> transfers;
  std::vector<PlanRecord> plans;
  std::vector<DropRecord> drops;
  std::vector<ServedPoint> served;
  std::string event_log;

  std::int64_t requested_blocks = 0;
  std::int64_t delivered_blocks = 0;
  std::int64_t cancelled_blocks = 0;
  std::int64_t congestion_flags = 0;

  // Ceiling on the mobile share that eligible seeders could sustain, from the
  // initial population.
  double max_mobile_fraction_pct = 100.0;
};

// Wire time for one block: propagation plus serialized transmission at the
// locked effective rate. Exact integer arithmetic, rounded up to the next
// millisecond.
SimTime transfer_time_ms(std::int64_t bytes, Rate effective_rate,
                         std::int64_t base_latency_ms);

RunResult run_scenario(const ScenarioConfig& cfg, Mode mode, std::uint64_t seed,
                       const RunOptions& options = {});

}  // namespace mobiswarm

#endif  // MOBISWARM_ENGINE_HPP
