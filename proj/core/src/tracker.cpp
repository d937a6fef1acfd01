#include "mobiswarm/tracker.hpp"

#include <algorithm>

namespace mobiswarm {

ConnectionBudget connection_budget(const PeerRecord& seeder,
                                   const PeerRecord& dest,
                                   std::uint32_t u_default,
                                   std::uint32_t budget_cap) {
  if (!seeder.bw.valid() || !dest.bw.valid())
    throw SimError("connection_budget: bandwidths must be positive");

  if (dest.cls == PeerClass::Static) return {u_default};

  std::uint32_t n = static_cast<std::uint32_t>(
      std::clamp<std::int64_t>(seeder.bw.up / dest.bw.down, 1, budget_cap));
  if (dest.congested) n = std::max<std::uint32_t>(1, n / 2);
  return {n};
}

AnnounceResponse Tracker::handle_announce(const AnnounceRequest& req,
                                          SimTime now, Rng& rng) {
  if (!req.bw.valid())
    throw TrackerError("announce: bandwidth must be positive");

  if (index_of_.size() <= req.peer)
    index_of_.resize(req.peer + 1, -1);

  if (index_of_[req.peer] >= 0) {
    PeerRecord& rec = records_[static_cast<std::size_t>(index_of_[req.peer])];
    if (rec.cls != req.cls)
      throw TrackerError("announce: peer class may not change");
    rec.last_announce = std::max(rec.last_announce, now);
    rec.congested = req.congested;
    rec.is_seeder = rec.is_seeder || req.is_seeder;
    rec.online = true;
  } else {
    PeerRecord rec;
    rec.peer = req.peer;
    rec.cls = req.cls;
    rec.bw = req.bw;
    rec.index = static_cast<std::uint32_t>(records_.size());
    rec.last_announce = now;
    rec.congested = req.congested;
    rec.is_seeder = req.is_seeder;
    rec.online = true;
    index_of_[req.peer] = static_cast<std::int32_t>(rec.index);
    records_.push_back(rec);
  }

  // uniform sample (without replacement) of the other online peers
  std::vector<std::uint32_t> candidates;
  candidates.reserve(records_.size());
  for (const PeerRecord& r : records_)
    if (r.peer != req.peer && r.online) candidates.push_back(r.index);

  const std::size_t want =
      std::min<std::size_t>(cfg_.neighbor_sample, candidates.size());
  for (std::size_t i = 0; i < want; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(rng.uniform(candidates.size() - i));
    std::swap(candidates[i], candidates[j]);
  }
  candidates.resize(want);

  const PeerRecord& me = records_[static_cast<std::size_t>(index_of_[req.peer])];
  AnnounceResponse resp;
  resp.neighbors.reserve(want);
  for (std::uint32_t idx : candidates) {
    const PeerRecord& r = records_[idx];
    resp.neighbors.emplace_back(r.peer, r.cls);
    if (r.is_seeder)
      resp.budgets.emplace_back(
          r.peer, connection_budget(r, me, cfg_.u_default, cfg_.budget_cap));
  }
  return resp;
}

void Tracker::signal_congestion(PeerId peer, bool congested) {
  require(peer, "signal_congestion").congested = congested;
}

void Tracker::set_online(PeerId peer, bool online) {
  require(peer, "set_online").online = online;
}

ConnectionBudget Tracker::budget_for(PeerId seeder, PeerId dest) const {
  const PeerRecord* s = find(seeder);
  const PeerRecord* d = find(dest);
  if (!s || !d) throw TrackerError("budget_for: unknown peer");
  return connection_budget(*s, *d, cfg_.u_default, cfg_.budget_cap);
}

const PeerRecord* Tracker::find(PeerId peer) const {
  if (peer >= index_of_.size() || index_of_[peer] < 0) return nullptr;
  return &records_[static_cast<std::size_t>(index_of_[peer])];
}

PeerRecord& Tracker::require(PeerId peer, const char* op) {
  if (peer < index_of_.size() && index_of_[peer] >= 0)
    return records_[static_cast<std::size_t>(index_of_[peer])];
  throw TrackerError(std::string(op) + ": unknown peer");
}

}  // namespace mobiswarm
