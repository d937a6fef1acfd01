#ifndef MOBISWARM_PEER_HPP
#define MOBISWARM_PEER_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "mobiswarm/rng.hpp"
#include "mobiswarm/swarm.hpp"
#include "mobiswarm/types.hpp"

namespace mobiswarm {

// A neighbor eligible for (un)choking, with its rate over the sliding window:
// bytes received from it for leechers, bytes sent to it for seeders.
struct ChokeCandidate {
  PeerId id = 0;
  PeerClass cls = PeerClass::Static;
  bool is_seeder = false;
  std::int64_t window_bytes = 0;
};

struct ChokeDecision {
  std::vector<PeerId> unchoked;        // at most regular_slots entries
  std::optional<PeerId> optimistic;    // never a member of `unchoked`
};

// Top `regular_slots` candidates by window rate; ties broken by a seeded
// shuffle so equally-rated peers rotate.
ChokeDecision recompute_chokes(std::vector<ChokeCandidate> interested,
                               std::uint32_t regular_slots, Rng& rng);

// Seeded uniform choice among the currently-choked interested candidates.
// In hybrid mode static seeders are excluded from the pool: their rates are
// already known through the tracker, so no discovery slot is spent on them.
std::optional<PeerId> optimistic_unchoke(
    std::span<const ChokeCandidate> choked_interested, bool hybrid_mode,
    Rng& rng);

// Ramp applied to the rate granted to a recently-joined neighbor, in
// thousandths: warmup_min at join, linear to 1000 over trial_len.
std::int64_t warmup_permille(SimTime neighbor_joined_at, SimTime now,
                             SimTime trial_len_ms,
                             std::int64_t warmup_min_permille);

// Same ramp as a real-valued fraction in (0, 1].
double warmup_factor(SimTime neighbor_joined_at, SimTime now,
                     SimTime trial_len_ms, double warmup_min);

// Requested-or-held view used by block selection. `requested` covers blocks
// pending from any neighbor.
class RequestTracker {
 public:
  RequestTracker() = default;
  explicit RequestTracker(const FileMap& map);

  bool is_marked(BlockId id) const;
  void mark(BlockId id);
  void unmark(BlockId id);  // a cancelled request becomes selectable again

  // true when the piece still has a selectable block
  bool piece_has_free_block(const FileMap& map, std::uint32_t p) const;
  std::optional<std::uint32_t> first_free_block(const FileMap& map,
                                                std::uint32_t p) const;

 private:
  std::vector<std::uint64_t> bits_;  // held-or-pending, per block
  std::uint32_t words_per_piece_ = 0;
};

// Next block to request from an unchoking neighbor: random-first while the
// own bitfield is empty, rarest-first afterwards, lowest free block within
// the chosen piece. Returns nothing when the neighbor has no useful piece.
std::optional<BlockId> select_next_block(
    const Bitfield& own, const RequestTracker& requested,
    const Bitfield& neighbor_holds,
    std::span<const Bitfield* const> all_neighbor_bitfields, Rng& rng);

}  // namespace mobiswarm

#endif  // MOBISWARM_PEER_HPP
