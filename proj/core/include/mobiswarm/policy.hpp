#ifndef MOBISWARM_POLICY_HPP
#define MOBISWARM_POLICY_HPP

#include <cstdint>
#include <vector>

#include "mobiswarm/types.hpp"

namespace mobiswarm {

// One candidate destination for an uploader's next planning round. Candidates
// arrive in priority order: the choke winners first, then any extra mobile
// destinations ranked by the caller.
struct PlanDest {
  PeerId id = 0;
  PeerClass cls = PeerClass::Static;
  Rate down_rate = 0;       // destination's nominal downlink
  Rate remaining_down = 0;  // downlink minus inbound already planned by others
  std::int64_t budget = 1;  // tracker budget: max parallel connections
  bool extra = false;       // beyond the regular choke set (hybrid, mobile only)
};

struct PlanAllocation {
  PeerId id = 0;
  std::uint32_t connections = 0;
  Rate rate = 0;  // total planned send rate to this destination
};

struct UploadPlan {
  std::vector<PlanAllocation> allocations;
  Rate total_rate = 0;
};

struct PlanParams {
  std::uint32_t u_default = 5;
  std::uint32_t pipeline_depth = 5;
  Rate r_min_mobile = 10240;  // slowest per-connection rate worth opening
};

// Splits `up_rate` across the candidate destinations.
//
// Baseline mode ignores receiver state entirely: every destination gets one
// connection and an equal floor(up/n) share, extras are dropped.
//
// Hybrid mode starts from the same equal split for the regular set, but caps
// each share at what the receiver can still absorb (static: its downlink,
// mobile: the downlink minus inbound already planned by others). The reclaimed
// surplus then funds widening toward mobiles: extra destinations and extra
// parallel connections per mobile, bounded by the tracker budget, the
// pipeline depth, and floor(up/r_min_mobile) mobile-facing connections
// overall. Surplus still left over raises the regular set evenly. Widening is
// therefore paid for entirely by capacity that saturated links could not use;
// the regular set never earns less than its baseline share (up to its own
// cap). With no mobile destinations the result is identical to baseline.
//
// Guarantees, any mode: total_rate <= up_rate; every non-extra destination
// keeps at least one connection; mobile connections per destination never
// exceed max(budget, 1) or the pipeline depth.
UploadPlan plan_uploads(Mode mode, Rate up_rate,
                        const std::vector<PlanDest>& dests,
                        const PlanParams& params);

// A seeder may serve mobile destinations in hybrid mode only when its uplink
// can sustain a useful rate.
bool eligible_for_mobile_seeding(Rate up_rate, Rate min_seed_rate);

// Share of the mobile population that eligible seeders can serve at
// r_min_mobile each, as a percentage clamped to 100. No mobiles means no
// constraint, reported as 100.
double max_mobile_fraction(const std::vector<Rate>& eligible_seeder_up_rates,
                           Rate r_min_mobile, std::size_t num_mobile);

struct SlowCandidate {
  PeerId peer = 0;
  double mean_latency_s = 0.0;
  bool only_source = false;  // sole provider of some piece we still need
};

// Connections whose mean block latency exceeds the threshold get dropped,
// except a neighbor that is the only remaining source for something we need.
std::vector<PeerId> drop_slow_connections(
    const std::vector<SlowCandidate>& candidates, double latency_threshold_s);

}  // namespace mobiswarm

#endif  // MOBISWARM_POLICY_HPP
