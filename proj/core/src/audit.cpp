#include "mobiswarm/audit.hpp"

#include <algorithm>

namespace mobiswarm {

namespace {

constexpr std::size_t kMaxReported = 25;

struct Collector {
  std::vector<std::string>& out;
  std::int64_t suppressed = 0;

  void fail(const std::string& msg) {
    if (out.size() < kMaxReported)
      out.push_back(msg);
    else
      ++suppressed;
  }
};

std::string at(SimTime t) { return " at t=" + std::to_string(t) + "ms"; }

}  // namespace

AuditReport audit_run(const RunResult& r, const ScenarioConfig& cfg,
                      Mode mode) {
  AuditReport rep;
  Collector c{rep.violations};

  for (const PlanRecord& p : r.plans) {
    ++rep.checked_plans;
    Rate total = 0;
    std::int64_t total_conns = 0;
    std::int64_t mobile_conns = 0;
    for (const PlanAllocation& a : p.allocations) {
      total += a.rate;
      total_conns += a.connections;
      if (a.connections < 1)
        c.fail("plan with zero-connection allocation" + at(p.t));
      if (a.rate < 0) c.fail("negative allocation rate" + at(p.t));
    }
    if (total > p.up_rate)
      c.fail("plan rate " + std::to_string(total) + " exceeds uplink " +
             std::to_string(p.up_rate) + " for peer " +
             std::to_string(p.uploader) + at(p.t));

    const auto budget_of = [&](PeerId id) -> std::int64_t {
      for (const auto& [d, b] : p.mobile_budgets)
        if (d == id) return b;
      return -1;
    };

    if (mode == Mode::Baseline) {
      if (static_cast<std::int64_t>(p.allocations.size()) > cfg.u_default)
        c.fail("baseline plan with " + std::to_string(p.allocations.size()) +
               " destinations for peer " + std::to_string(p.uploader) + at(p.t));
      for (const PlanAllocation& a : p.allocations)
        if (a.connections != 1)
          c.fail("baseline plan widened a connection" + at(p.t));
    } else {
      const std::int64_t widen_cap =
          std::max<std::int64_t>(cfg.u_default, p.up_rate / cfg.r_min_mobile);
      if (total_conns > widen_cap)
        c.fail("hybrid plan opened " + std::to_string(total_conns) +
               " connections, cap " + std::to_string(widen_cap) + " for peer " +
               std::to_string(p.uploader) + at(p.t));
      for (const PlanAllocation& a : p.allocations) {
        const std::int64_t budget = budget_of(a.id);
        if (budget < 0) {
          // static destination: never widened
          if (a.connections != 1)
            c.fail("hybrid plan widened a static destination" + at(p.t));
          continue;
        }
        mobile_conns += a.connections;
        if (a.connections > std::max<std::int64_t>(budget, 1))
          c.fail("allocation of " + std::to_string(a.connections) +
                 " connections exceeds budget " + std::to_string(budget) +
                 " toward peer " + std::to_string(a.id) + at(p.t));
        if (a.connections > cfg.pipeline_depth)
          c.fail("allocation deeper than the pipeline" + at(p.t));
      }
      if (p.is_seeder && !p.eligible && mobile_conns > 0)
        c.fail("ineligible seeder " + std::to_string(p.uploader) +
               " planned mobile service" + at(p.t));
    }
  }

  if (mode == Mode::Hybrid) {
    for (const ServedPoint& sp : r.served) {
      ++rep.checked_points;
      if (sp.served > sp.bound_slots)
        c.fail("served " + std::to_string(sp.served) +
               " mobiles with only " + std::to_string(sp.bound_slots) +
               " eligible seeder slots" + at(sp.t));
    }
  }

  for (const BlockTransferRecord& t : r.transfers) {
    ++rep.checked_transfers;
    if (t.effective_rate < 1) c.fail("transfer with rate < 1" + at(t.requested_at));
    if (t.bytes < 1) c.fail("empty transfer" + at(t.requested_at));
    if (t.outcome == TransferOutcome::Delivered) {
      const SimTime expect =
          transfer_time_ms(t.bytes, t.effective_rate, t.base_latency_ms);
      if (t.finished_at - t.requested_at != expect)
        c.fail("delivery took " + std::to_string(t.finished_at - t.requested_at) +
               "ms, link model says " + std::to_string(expect) + "ms" +
               at(t.requested_at));
    } else if (t.finished_at < t.requested_at) {
      c.fail("cancellation precedes request" + at(t.requested_at));
    }
  }

  for (const DropRecord& d : r.drops)
    if (d.mean_latency_s <= cfg.latency_threshold_s)
      c.fail("drop below the latency threshold" + at(d.t));

  if (r.delivered_blocks + r.cancelled_blocks > r.requested_blocks)
    c.fail("more outcomes than requests");
  std::int64_t delivered_in_records = 0;
  for (const BlockTransferRecord& t : r.transfers)
    if (t.outcome == TransferOutcome::Delivered) ++delivered_in_records;
  if (delivered_in_records != r.delivered_blocks)
    c.fail("delivered counter disagrees with transfer records");

  double prev_t = -1.0;
  std::int64_t prev_cum = -1;
  for (const TimePoint& tp : r.timeseries) {
    if (tp.t_s < prev_t) c.fail("time series goes backwards");
    if (tp.cumulative_blocks < prev_cum)
      c.fail("cumulative block count decreased");
    if (tp.sdr < 0.0 || tp.sdr > 1.0) c.fail("sdr out of [0, 1]");
    if (tp.mobile_served_fraction < 0.0 || tp.mobile_served_fraction > 1.0)
      c.fail("mobile served fraction out of [0, 1]");
    prev_t = tp.t_s;
    prev_cum = tp.cumulative_blocks;
  }

  if (c.suppressed > 0)
    rep.violations.push_back("... and " + std::to_string(c.suppressed) +
                             " more violations");
  return rep;
}

}  // namespace mobiswarm
