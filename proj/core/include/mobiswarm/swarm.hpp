#ifndef MOBISWARM_SWARM_HPP
#define MOBISWARM_SWARM_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "mobiswarm/rng.hpp"
#include "mobiswarm/types.hpp"

namespace mobiswarm {

// Partitioning of the shared file into pieces and blocks. All pieces except
// possibly the last have piece_size bytes; all blocks except possibly the last
// block of the last piece have block_size bytes.
class FileMap {
 public:
  FileMap() = default;

  // Throws ConfigError on non-positive sizes or when piece_size is not a
  // multiple of block_size.
  static FileMap partition(std::int64_t file_size, std::int64_t piece_size,
                           std::int64_t block_size);

  std::int64_t file_size() const { return file_size_; }
  std::int64_t piece_size() const { return piece_size_; }
  std::int64_t block_size() const { return block_size_; }
  std::uint32_t num_pieces() const { return num_pieces_; }

  std::int64_t piece_len(std::uint32_t p) const;
  std::uint32_t blocks_in_piece(std::uint32_t p) const;
  std::int64_t block_len(std::uint32_t p, std::uint32_t b) const;
  std::int64_t block_len(BlockId id) const { return block_len(id.piece, id.block); }

  // Blocks in a full-sized piece.
  std::uint32_t blocks_per_full_piece() const {
    return static_cast<std::uint32_t>(piece_size_ / block_size_);
  }

  std::int64_t total_blocks() const { return total_blocks_; }

 private:
  std::int64_t file_size_ = 0;
  std::int64_t piece_size_ = 0;
  std::int64_t block_size_ = 0;
  std::uint32_t num_pieces_ = 0;
  std::int64_t total_blocks_ = 0;
};

// Per-peer possession state: one completion bit per piece plus in-progress
// block bits. Bits are monotone for the lifetime of a session.
class Bitfield {
 public:
  Bitfield() = default;
  explicit Bitfield(const FileMap& map);

  static Bitfield full(const FileMap& map);

  bool has_piece(std::uint32_t p) const;
  bool has_block(std::uint32_t p, std::uint32_t b) const;
  bool has_block(BlockId id) const { return has_block(id.piece, id.block); }

  struct SetResult {
    bool piece_completed = false;
    bool file_completed = false;
  };

  // Marks a block as held. The block must not already be set.
  SetResult set_block(std::uint32_t p, std::uint32_t b);
  SetResult set_block(BlockId id) { return set_block(id.piece, id.block); }

  std::int64_t held_blocks() const { return held_blocks_; }
  std::uint32_t held_pieces() const { return held_pieces_; }
  bool complete() const { return held_blocks_ == map_.total_blocks(); }
  bool empty() const { return held_blocks_ == 0; }

  const FileMap& map() const { return map_; }

 private:
  FileMap map_;
  std::vector<std::uint64_t> piece_bits_;
  std::vector<std::uint64_t> block_bits_;  // per-piece groups, fixed stride
  std::uint32_t words_per_piece_ = 0;
  std::int64_t held_blocks_ = 0;
  std::uint32_t held_pieces_ = 0;
};

// Mobile iff the downlink is at or below the threshold; uplink does not factor
// into classification.
PeerClass classify_peer(const Bandwidth& bw, Rate mobile_down_threshold);

// Pieces missing from `own`, ordered by ascending replica count among the
// neighbor bitfields; ties are broken by a seeded uniform shuffle.
std::vector<std::uint32_t> rarest_order(
    std::span<const Bitfield* const> neighbor_bitfields, const Bitfield& own,
    Rng& rng);

}  // namespace mobiswarm

#endif  // MOBISWARM_SWARM_HPP
