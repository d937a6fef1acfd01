#ifndef MOBISWARM_AUDIT_HPP
#define MOBISWARM_AUDIT_HPP

#include <string>
#include <vector>

#include "mobiswarm/config.hpp"
#include "mobiswarm/engine.hpp"

namespace mobiswarm {

struct AuditReport {
  std::vector<std::string> violations;
  std::int64_t checked_plans = 0;
  std::int64_t checked_transfers = 0;
  std::int64_t checked_points = 0;

  bool ok() const { return violations.empty(); }
};

// Re-derives the run's invariants from its recorded artifacts:
//  - no plan exceeds the uploader's capacity
//  - baseline plans stay within u_default single connections
//  - hybrid plans respect tracker budgets, the pipeline depth, the widened
//    connection ceiling, and the mobile-seeding eligibility gate
//  - mobiles served by seeders never exceed what eligible seeders can fund
//    (hybrid)
//  - every delivered block took exactly base latency plus serialized
//    transmission at its locked rate
//  - counters and time series are consistent and monotone
// At most 25 violations are reported; the rest are summarized.
AuditReport audit_run(const RunResult& r, const ScenarioConfig& cfg, Mode mode);

}  // namespace mobiswarm

#endif  // MOBISWARM_AUDIT_HPP
