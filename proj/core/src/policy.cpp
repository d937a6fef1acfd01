#include "mobiswarm/policy.hpp"

#include <algorithm>

namespace mobiswarm {

namespace {

// Largest integer per-connection water level the budget can fund, with each
// destination held at its own cap; rates are min(level * conns, cap). Budget
// the level cannot absorb in whole steps is left unspent for the caller.
void water_fill(Rate budget, const std::vector<Rate>& caps,
                const std::vector<std::uint32_t>& conns,
                std::vector<Rate>& rates) {
  const std::size_t n = caps.size();
  rates.assign(n, 0);

  const auto used = [&](Rate level) {
    Rate total = 0;
    for (std::size_t i = 0; i < n; ++i)
      total += std::min(level * static_cast<Rate>(conns[i]), caps[i]);
    return total;
  };

  Rate lo = 0, hi = budget + 1;
  while (lo < hi) {
    const Rate mid = lo + (hi - lo + 1) / 2;
    if (used(mid) <= budget)
      lo = mid;
    else
      hi = mid - 1;
  }
  for (std::size_t i = 0; i < n; ++i)
    rates[i] = std::min(lo * static_cast<Rate>(conns[i]), caps[i]);
}

}  // namespace

UploadPlan plan_uploads(Mode mode, Rate up_rate,
                        const std::vector<PlanDest>& dests,
                        const PlanParams& params) {
  if (up_rate < 0) throw SimError("plan_uploads: negative uplink");
  UploadPlan plan;
  if (dests.empty() || up_rate == 0) return plan;

  if (mode == Mode::Baseline) {
    std::vector<const PlanDest*> kept;
    for (const PlanDest& d : dests)
      if (!d.extra) kept.push_back(&d);
    if (kept.empty()) return plan;
    const Rate share = up_rate / static_cast<Rate>(kept.size());
    for (const PlanDest* d : kept) {
      plan.allocations.push_back({d->id, 1, share});
      plan.total_rate += share;
    }
    return plan;
  }

  // Hybrid.
  const std::int64_t mobile_cap =
      params.r_min_mobile > 0 ? up_rate / params.r_min_mobile : 0;
  const std::int64_t total_cap =
      std::max<std::int64_t>(params.u_default, mobile_cap);

  struct Entry {
    const PlanDest* d;
    bool base;           // member of the regular choke set
    std::uint32_t want;  // max connections for this destination
    Rate cap;            // receiver-side ceiling for additional traffic
    Rate rate = 0;
    std::uint32_t granted = 0;  // surplus-funded connections
  };
  std::vector<Entry> entries;
  for (const PlanDest& d : dests) {
    const bool mobile = d.cls == PeerClass::Mobile;
    const Rate cap = mobile ? std::max<Rate>(d.remaining_down, 0) : d.down_rate;
    if (d.extra) {
      if (!mobile) throw SimError("plan_uploads: extra destination not mobile");
      if (cap == 0) continue;  // receiver already saturated
    }
    std::uint32_t want = 1;
    if (mobile) {
      const std::int64_t b = std::max<std::int64_t>(d.budget, 1);
      want = static_cast<std::uint32_t>(
          std::min<std::int64_t>(b, params.pipeline_depth));
    }
    entries.push_back({&d, !d.extra, want, cap});
  }
  if (entries.empty()) return plan;

  // Regular set: equal split as in baseline, capped by the receiver. What the
  // caps cut off becomes the surplus that funds widening.
  std::int64_t n_base = 0;
  for (const Entry& e : entries) n_base += e.base ? 1 : 0;
  const Rate level0 = n_base > 0 ? up_rate / n_base : 0;
  Rate surplus = up_rate;
  std::int64_t total_conns = 0;
  std::int64_t mobile_conns = 0;
  for (Entry& e : entries) {
    if (!e.base) continue;
    e.rate = std::min(level0, e.cap);
    surplus -= e.rate;
    total_conns += 1;
    if (e.d->cls == PeerClass::Mobile) mobile_conns += 1;
  }

  // Hand out surplus-funded connections round-robin: unserved extras first,
  // then widening of regular mobiles, within the connection ceilings.
  for (bool grew = true; grew;) {
    grew = false;
    for (int pass = 0; pass < 2; ++pass) {
      for (Entry& e : entries) {
        if (e.d->cls != PeerClass::Mobile) continue;
        if (e.base == (pass == 0)) continue;
        const std::uint32_t have = (e.base ? 1u : 0u) + e.granted;
        if (have >= e.want) continue;
        if (total_conns >= total_cap || mobile_conns >= mobile_cap) continue;
        e.granted += 1;
        total_conns += 1;
        mobile_conns += 1;
        grew = true;
      }
    }
  }

  // Fill the granted connections from the surplus, capped by what each
  // receiver can still take on top of its regular share.
  std::vector<std::size_t> part;
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (entries[i].granted > 0) part.push_back(i);
  if (surplus > 0 && !part.empty()) {
    std::vector<Rate> caps;
    std::vector<std::uint32_t> conns;
    for (std::size_t i : part) {
      caps.push_back(entries[i].cap - entries[i].rate);
      conns.push_back(entries[i].granted);
    }
    std::vector<Rate> extra_rates;
    water_fill(surplus, caps, conns, extra_rates);
    for (std::size_t k = 0; k < part.size(); ++k) {
      entries[part[k]].rate += extra_rates[k];
      surplus -= extra_rates[k];
    }
  }

  // Trim grants the funded rate cannot sustain at the minimum mobile service
  // rate; a slower lane would stall its block past what the receiver
  // tolerates. Rates freed by dropped extras rejoin the surplus.
  if (params.r_min_mobile > 0) {
    for (Entry& e : entries) {
      if (e.granted == 0) continue;
      const std::int64_t sustain = e.rate / params.r_min_mobile;
      const std::int64_t grantable =
          std::max<std::int64_t>(sustain - (e.base ? 1 : 0), 0);
      if (e.granted > grantable)
        e.granted = static_cast<std::uint32_t>(grantable);
      if (!e.base && e.granted == 0) {
        surplus += e.rate;
        e.rate = 0;
      }
    }
  }

  // Whatever widening could not use goes back to the regular set evenly.
  // Whole shares only, so with no mobiles the result stays byte-identical to
  // the baseline split.
  if (n_base > 0 && surplus > 0) {
    const Rate bonus = surplus / n_base;
    for (Entry& e : entries) {
      if (!e.base) continue;
      const Rate add = std::min(bonus, e.cap - e.rate);
      e.rate += add;
    }
  }

  for (const Entry& e : entries) {
    const std::uint32_t conns = (e.base ? 1u : 0u) + e.granted;
    if (!e.base && (conns == 0 || e.rate == 0)) continue;
    plan.allocations.push_back({e.d->id, conns, e.rate});
    plan.total_rate += e.rate;
  }
  if (plan.total_rate > up_rate) throw SimError("plan_uploads: overcommitted");
  return plan;
}

bool eligible_for_mobile_seeding(Rate up_rate, Rate min_seed_rate) {
  return up_rate >= min_seed_rate;
}

double max_mobile_fraction(const std::vector<Rate>& eligible_seeder_up_rates,
                           Rate r_min_mobile, std::size_t num_mobile) {
  if (num_mobile == 0) return 100.0;
  if (r_min_mobile <= 0) throw SimError("max_mobile_fraction: bad r_min");
  std::int64_t slots = 0;
  for (Rate up : eligible_seeder_up_rates) slots += up / r_min_mobile;
  const double frac =
      std::min(1.0, static_cast<double>(slots) / static_cast<double>(num_mobile));
  return 100.0 * frac;
}

std::vector<PeerId> drop_slow_connections(
    const std::vector<SlowCandidate>& candidates, double latency_threshold_s) {
  std::vector<PeerId> dropped;
  for (const SlowCandidate& c : candidates) {
    if (c.only_source) continue;
    if (c.mean_latency_s > latency_threshold_s) dropped.push_back(c.peer);
  }
  return dropped;
}

}  // namespace mobiswarm
