#ifndef MOBISWARM_TRACKER_HPP
#define MOBISWARM_TRACKER_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "mobiswarm/rng.hpp"
#include "mobiswarm/types.hpp"

namespace mobiswarm {

// Tracker-visible state of one peer. `index` is the table position and forms
// a bijection onto 0..n-1.
struct PeerRecord {
  PeerId peer = 0;
  PeerClass cls = PeerClass::Static;
  Bandwidth bw;
  std::uint32_t index = 0;
  SimTime last_announce = 0;
  bool congested = false;
  bool is_seeder = false;
  bool online = true;
};

struct AnnounceRequest {
  PeerId peer = 0;
  PeerClass cls = PeerClass::Static;
  Bandwidth bw;
  bool congested = false;
  std::uint32_t have_pieces = 0;
  bool is_seeder = false;
};

// Cap on simultaneous upload connections a seeder may open toward one
// destination.
struct ConnectionBudget {
  std::uint32_t max_connections = 1;
};

struct AnnounceResponse {
  std::vector<std::pair<PeerId, PeerClass>> neighbors;
  // budget toward the announcing peer, for each seeder in `neighbors`
  std::vector<std::pair<PeerId, ConnectionBudget>> budgets;
};

struct TrackerConfig {
  std::uint32_t u_default = 5;
  std::uint32_t budget_cap = 32;
  std::uint32_t neighbor_sample = 50;
};

// Static destinations always get the default budget. Mobile destinations get
// floor(seeder_up / dest_down) clamped to [1, budget_cap], halved (floor,
// min 1) while the destination reports congestion.
ConnectionBudget connection_budget(const PeerRecord& seeder,
                                   const PeerRecord& dest,
                                   std::uint32_t u_default,
                                   std::uint32_t budget_cap);

class Tracker {
 public:
  explicit Tracker(TrackerConfig cfg = {}) : cfg_(cfg) {}

  // Upserts the announcing peer and returns a seeded uniform sample of other
  // online peers plus budgets for the seeders among them. Throws TrackerError
  // if the peer re-announces with a different class.
  AnnounceResponse handle_announce(const AnnounceRequest& req, SimTime now,
                                   Rng& rng);

  // Marks a peer's downlink as congested; later budgets toward it are halved.
  // Throws TrackerError for unknown peers.
  void signal_congestion(PeerId peer, bool congested);

  // Liveness hint from the churn model; offline peers are not handed out in
  // announce responses.
  void set_online(PeerId peer, bool online);

  ConnectionBudget budget_for(PeerId seeder, PeerId dest) const;

  const PeerRecord* find(PeerId peer) const;
  std::size_t size() const { return records_.size(); }
  const std::vector<PeerRecord>& records() const { return records_; }
  const TrackerConfig& config() const { return cfg_; }

 private:
  PeerRecord& require(PeerId peer, const char* op);

  TrackerConfig cfg_;
  std::vector<PeerRecord> records_;      // position == PeerRecord::index
  std::vector<std::int32_t> index_of_;   // peer id -> table index, -1 if absent
};

}  // namespace mobiswarm

#endif  // MOBISWARM_TRACKER_HPP
