#include "mobiswarm/swarm.hpp"

#include <algorithm>

namespace mobiswarm {

FileMap FileMap::partition(std::int64_t file_size, std::int64_t piece_size,
                           std::int64_t block_size) {
  std::vector<std::string> bad;
  if (file_size <= 0) bad.push_back("file_size must be > 0");
  if (piece_size <= 0) bad.push_back("piece_size must be > 0");
  if (block_size <= 0) bad.push_back("block_size must be > 0");
  if (piece_size > 0 && block_size > 0 && piece_size % block_size != 0)
    bad.push_back("piece_size must be a multiple of block_size");
  if (!bad.empty()) throw ConfigError(std::move(bad));

  FileMap m;
  m.file_size_ = file_size;
  m.piece_size_ = piece_size;  // a file smaller than one piece yields one short piece
  m.block_size_ = block_size;
  m.num_pieces_ = static_cast<std::uint32_t>(ceil_div(file_size, m.piece_size_));
  m.total_blocks_ = 0;
  for (std::uint32_t p = 0; p < m.num_pieces_; ++p)
    m.total_blocks_ += m.blocks_in_piece(p);
  return m;
}

std::int64_t FileMap::piece_len(std::uint32_t p) const {
  const std::int64_t start = static_cast<std::int64_t>(p) * piece_size_;
  return std::min(piece_size_, file_size_ - start);
}

std::uint32_t FileMap::blocks_in_piece(std::uint32_t p) const {
  return static_cast<std::uint32_t>(ceil_div(piece_len(p), block_size_));
}

std::int64_t FileMap::block_len(std::uint32_t p, std::uint32_t b) const {
  const std::int64_t start = static_cast<std::int64_t>(b) * block_size_;
  return std::min(block_size_, piece_len(p) - start);
}

Bitfield::Bitfield(const FileMap& map) : map_(map) {
  const std::uint32_t np = map.num_pieces();
  piece_bits_.assign((np + 63) / 64, 0);
  words_per_piece_ = (map.blocks_per_full_piece() + 63) / 64;
  if (words_per_piece_ == 0) words_per_piece_ = 1;
  block_bits_.assign(static_cast<std::size_t>(np) * words_per_piece_, 0);
}

Bitfield Bitfield::full(const FileMap& map) {
  Bitfield bf(map);
  for (std::uint32_t p = 0; p < map.num_pieces(); ++p)
    for (std::uint32_t b = 0; b < map.blocks_in_piece(p); ++b) bf.set_block(p, b);
  return bf;
}

bool Bitfield::has_piece(std::uint32_t p) const {
  return (piece_bits_[p / 64] >> (p % 64)) & 1u;
}

bool Bitfield::has_block(std::uint32_t p, std::uint32_t b) const {
  const std::size_t w = static_cast<std::size_t>(p) * words_per_piece_ + b / 64;
  return (block_bits_[w] >> (b % 64)) & 1u;
}

Bitfield::SetResult Bitfield::set_block(std::uint32_t p, std::uint32_t b) {
  if (p >= map_.num_pieces() || b >= map_.blocks_in_piece(p))
    throw SimError("set_block: block index out of range");
  if (has_block(p, b)) throw SimError("set_block: bit already set");

  const std::size_t w = static_cast<std::size_t>(p) * words_per_piece_ + b / 64;
  block_bits_[w] |= (std::uint64_t{1} << (b % 64));
  ++held_blocks_;

  SetResult res;
  const std::uint32_t n = map_.blocks_in_piece(p);
  bool all = true;
  for (std::uint32_t i = 0; i < n && all; ++i) all = has_block(p, i);
  if (all) {
    piece_bits_[p / 64] |= (std::uint64_t{1} << (p % 64));
    ++held_pieces_;
    res.piece_completed = true;
  }
  res.file_completed = complete();
  return res;
}

PeerClass classify_peer(const Bandwidth& bw, Rate mobile_down_threshold) {
  if (mobile_down_threshold <= 0)
    throw ConfigError("mobile_down_threshold must be > 0");
  return bw.down <= mobile_down_threshold ? PeerClass::Mobile : PeerClass::Static;
}

std::vector<std::uint32_t> rarest_order(
    std::span<const Bitfield* const> neighbor_bitfields, const Bitfield& own,
    Rng& rng) {
  std::vector<std::uint32_t> missing;
  const std::uint32_t np = own.map().num_pieces();
  missing.reserve(np);
  for (std::uint32_t p = 0; p < np; ++p)
    if (!own.has_piece(p)) missing.push_back(p);

  std::vector<std::uint32_t> counts(np, 0);
  for (const Bitfield* nb : neighbor_bitfields)
    for (std::uint32_t p : missing)
      if (nb->has_piece(p)) ++counts[p];

  // shuffle first so that stable_sort leaves ties in seeded-uniform order
  rng.shuffle(missing);
  std::stable_sort(missing.begin(), missing.end(),
                   [&](std::uint32_t a, std::uint32_t b) {
                     return counts[a] < counts[b];
                   });
  return missing;
}

}  // namespace mobiswarm
