#include "mobiswarm/peer.hpp"

#include <algorithm>

namespace mobiswarm {

ChokeDecision recompute_chokes(std::vector<ChokeCandidate> interested,
                               std::uint32_t regular_slots, Rng& rng) {
  ChokeDecision d;
  if (interested.empty() || regular_slots == 0) return d;

  rng.shuffle(interested);
  std::stable_sort(interested.begin(), interested.end(),
                   [](const ChokeCandidate& a, const ChokeCandidate& b) {
                     return a.window_bytes > b.window_bytes;
                   });

  const std::size_t n = std::min<std::size_t>(regular_slots, interested.size());
  d.unchoked.reserve(n);
  for (std::size_t i = 0; i < n; ++i) d.unchoked.push_back(interested[i].id);
  return d;
}

std::optional<PeerId> optimistic_unchoke(
    std::span<const ChokeCandidate> choked_interested, bool hybrid_mode,
    Rng& rng) {
  std::vector<PeerId> pool;
  pool.reserve(choked_interested.size());
  for (const ChokeCandidate& c : choked_interested) {
    if (hybrid_mode && c.is_seeder && c.cls == PeerClass::Static) continue;
    pool.push_back(c.id);
  }
  if (pool.empty()) return std::nullopt;
  return pool[static_cast<std::size_t>(rng.uniform(pool.size()))];
}

std::int64_t warmup_permille(SimTime neighbor_joined_at, SimTime now,
                             SimTime trial_len_ms,
                             std::int64_t warmup_min_permille) {
  if (trial_len_ms < 0) throw SimError("warmup: trial length must be >= 0");
  if (trial_len_ms == 0) return 1000;
  const SimTime age = std::clamp<SimTime>(now - neighbor_joined_at, 0, trial_len_ms);
  return warmup_min_permille +
         ((1000 - warmup_min_permille) * age) / trial_len_ms;
}

double warmup_factor(SimTime neighbor_joined_at, SimTime now,
                     SimTime trial_len_ms, double warmup_min) {
  const std::int64_t milli = warmup_permille(
      neighbor_joined_at, now, trial_len_ms,
      static_cast<std::int64_t>(warmup_min * 1000.0 + 0.5));
  return static_cast<double>(milli) / 1000.0;
}

RequestTracker::RequestTracker(const FileMap& map) {
  words_per_piece_ = (map.blocks_per_full_piece() + 63) / 64;
  if (words_per_piece_ == 0) words_per_piece_ = 1;
  bits_.assign(static_cast<std::size_t>(map.num_pieces()) * words_per_piece_, 0);
}

bool RequestTracker::is_marked(BlockId id) const {
  const std::size_t w =
      static_cast<std::size_t>(id.piece) * words_per_piece_ + id.block / 64;
  return (bits_[w] >> (id.block % 64)) & 1u;
}

void RequestTracker::mark(BlockId id) {
  const std::size_t w =
      static_cast<std::size_t>(id.piece) * words_per_piece_ + id.block / 64;
  bits_[w] |= (std::uint64_t{1} << (id.block % 64));
}

void RequestTracker::unmark(BlockId id) {
  const std::size_t w =
      static_cast<std::size_t>(id.piece) * words_per_piece_ + id.block / 64;
  bits_[w] &= ~(std::uint64_t{1} << (id.block % 64));
}

bool RequestTracker::piece_has_free_block(const FileMap& map,
                                          std::uint32_t p) const {
  return first_free_block(map, p).has_value();
}

std::optional<std::uint32_t> RequestTracker::first_free_block(
    const FileMap& map, std::uint32_t p) const {
  const std::uint32_t n = map.blocks_in_piece(p);
  for (std::uint32_t b = 0; b < n; ++b)
    if (!is_marked({p, b})) return b;
  return std::nullopt;
}

std::optional<BlockId> select_next_block(
    const Bitfield& own, const RequestTracker& requested,
    const Bitfield& neighbor_holds,
    std::span<const Bitfield* const> all_neighbor_bitfields, Rng& rng) {
  const FileMap& map = own.map();

  if (own.empty()) {
    // random piece first: pick uniformly among the neighbor's pieces that
    // still have a selectable block
    std::vector<std::uint32_t> pool;
    for (std::uint32_t p = 0; p < map.num_pieces(); ++p)
      if (neighbor_holds.has_piece(p) && !own.has_piece(p) &&
          requested.piece_has_free_block(map, p))
        pool.push_back(p);
    if (pool.empty()) return std::nullopt;
    const std::uint32_t p =
        pool[static_cast<std::size_t>(rng.uniform(pool.size()))];
    return BlockId{p, *requested.first_free_block(map, p)};
  }

  for (std::uint32_t p : rarest_order(all_neighbor_bitfields, own, rng)) {
    if (!neighbor_holds.has_piece(p)) continue;
    if (auto b = requested.first_free_block(map, p)) return BlockId{p, *b};
  }
  return std::nullopt;
}

}  // namespace mobiswarm
