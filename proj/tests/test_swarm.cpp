#include <doctest.h>

#include <algorithm>
#include <map>
#include <vector>

#include "mobiswarm/rng.hpp"
#include "mobiswarm/swarm.hpp"
#include "mobiswarm/types.hpp"

using namespace mobiswarm;

TEST_CASE("file partition accounts for every byte") {
  Rng rng(17);
  for (int rep = 0; rep < 1000; ++rep) {
    const std::int64_t block = 1 + static_cast<std::int64_t>(rng.uniform(4096));
    const std::int64_t piece = block * (1 + static_cast<std::int64_t>(rng.uniform(32)));
    const std::int64_t file = 1 + static_cast<std::int64_t>(rng.uniform(1u << 22));
    const FileMap m = FileMap::partition(file, piece, block);

    std::int64_t piece_bytes = 0;
    std::int64_t block_bytes = 0;
    std::int64_t blocks = 0;
    for (std::uint32_t p = 0; p < m.num_pieces(); ++p) {
      piece_bytes += m.piece_len(p);
      for (std::uint32_t b = 0; b < m.blocks_in_piece(p); ++b) {
        const std::int64_t len = m.block_len(p, b);
        CHECK(len > 0);
        CHECK(len <= block);
        block_bytes += len;
        ++blocks;
      }
    }
    CHECK(piece_bytes == file);
    CHECK(block_bytes == file);
    CHECK(blocks == m.total_blocks());
    // every piece but the last is full sized
    for (std::uint32_t p = 0; p + 1 < m.num_pieces(); ++p)
      CHECK(m.piece_len(p) == piece);
  }
}

TEST_CASE("file partition rejects bad sizes, all at once") {
  CHECK_THROWS_AS(FileMap::partition(0, 16, 4), ConfigError);
  CHECK_THROWS_AS(FileMap::partition(100, 0, 4), ConfigError);
  CHECK_THROWS_AS(FileMap::partition(100, 16, 0), ConfigError);
  CHECK_THROWS_AS(FileMap::partition(100, 18, 4), ConfigError);
  try {
    FileMap::partition(-1, -1, -1);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.violations().size() == 3);
  }
}

TEST_CASE("a file smaller than one piece still partitions") {
  const FileMap m = FileMap::partition(10, 64, 4);
  CHECK(m.num_pieces() == 1);
  CHECK(m.piece_len(0) == 10);
  CHECK(m.blocks_in_piece(0) == 3);
  CHECK(m.block_len(0, 2) == 2);
}

TEST_CASE("bitfield reports piece and file completion transitions exactly once") {
  const FileMap m = FileMap::partition(96, 32, 8);  // 3 pieces x 4 blocks
  Bitfield bf(m);
  CHECK(bf.empty());

  int piece_events = 0, file_events = 0;
  for (std::uint32_t p = 0; p < m.num_pieces(); ++p)
    for (std::uint32_t b = 0; b < m.blocks_in_piece(p); ++b) {
      const auto res = bf.set_block(p, b);
      if (res.piece_completed) {
        ++piece_events;
        CHECK(b == m.blocks_in_piece(p) - 1);
        CHECK(bf.has_piece(p));
      }
      if (res.file_completed) ++file_events;
    }
  CHECK(piece_events == 3);
  CHECK(file_events == 1);
  CHECK(bf.complete());
  CHECK(bf.held_blocks() == m.total_blocks());
  CHECK(bf.held_pieces() == 3);
}

TEST_CASE("bitfield rejects double sets and out-of-range blocks") {
  const FileMap m = FileMap::partition(64, 32, 8);
  Bitfield bf(m);
  bf.set_block(0, 0);
  CHECK_THROWS_AS(bf.set_block(0, 0), SimError);
  CHECK_THROWS_AS(bf.set_block(9, 0), SimError);
  CHECK_THROWS_AS(bf.set_block(0, 4), SimError);
}

TEST_CASE("a full bitfield holds everything") {
  const FileMap m = FileMap::partition(1000, 96, 12);
  const Bitfield bf = Bitfield::full(m);
  CHECK(bf.complete());
  for (std::uint32_t p = 0; p < m.num_pieces(); ++p) CHECK(bf.has_piece(p));
}

TEST_CASE("classification keys on the downlink only") {
  CHECK(classify_peer({999999, 65536}, 65536) == PeerClass::Mobile);
  CHECK(classify_peer({1, 65537}, 65536) == PeerClass::Static);
  CHECK(classify_peer({1, 40960}, 65536) == PeerClass::Mobile);
  CHECK_THROWS_AS(classify_peer({1, 1}, 0), ConfigError);
}

TEST_CASE("rarest ordering sorts missing pieces by replica count") {
  Rng gen(404);
  for (int rep = 0; rep < 1000; ++rep) {
    const std::uint32_t pieces = 2 + static_cast<std::uint32_t>(gen.uniform(14));
    const FileMap m =
        FileMap::partition(static_cast<std::int64_t>(pieces) * 16, 16, 4);

    Bitfield own(m);
    for (std::uint32_t p = 0; p < pieces; ++p)
      if (gen.uniform(4) == 0)
        for (std::uint32_t b = 0; b < m.blocks_in_piece(p); ++b) own.set_block(p, b);

    std::vector<Bitfield> neighbors;
    const std::size_t nn = 1 + gen.uniform(6);
    for (std::size_t i = 0; i < nn; ++i) {
      Bitfield nb(m);
      for (std::uint32_t p = 0; p < pieces; ++p)
        if (gen.uniform(2) == 0)
          for (std::uint32_t b = 0; b < m.blocks_in_piece(p); ++b) nb.set_block(p, b);
      neighbors.push_back(std::move(nb));
    }
    std::vector<const Bitfield*> ptrs;
    for (const auto& nb : neighbors) ptrs.push_back(&nb);

    // independent replica count
    std::map<std::uint32_t, int> count;
    for (std::uint32_t p = 0; p < pieces; ++p) {
      if (own.has_piece(p)) continue;
      count[p] = 0;
      for (const Bitfield* nb : ptrs)
        if (nb->has_piece(p)) ++count[p];
    }

    Rng rng(rep);
    const auto order = rarest_order(
        std::span<const Bitfield* const>(ptrs.data(), ptrs.size()), own, rng);

    CHECK(order.size() == count.size());
    for (std::uint32_t p : order) CHECK(count.count(p) == 1);
    for (std::size_t i = 0; i + 1 < order.size(); ++i)
      CHECK(count[order[i]] <= count[order[i + 1]]);
  }
}

TEST_CASE("rarest ordering rotates ties by seed") {
  const FileMap m = FileMap::partition(64, 16, 4);  // 4 pieces, all tied at 0
  const Bitfield own(m);
  std::vector<const Bitfield*> none;
  Rng a(1), b(2);
  const auto o1 = rarest_order({none.data(), none.size()}, own, a);
  const auto o2 = rarest_order({none.data(), none.size()}, own, b);
  CHECK(o1.size() == 4);
  CHECK(o2.size() == 4);
  // different seeds give a different tie order at least sometimes
  Rng c(3), d(4), e(5);
  const auto o3 = rarest_order({none.data(), none.size()}, own, c);
  const auto o4 = rarest_order({none.data(), none.size()}, own, d);
  const auto o5 = rarest_order({none.data(), none.size()}, own, e);
  CHECK((o1 != o2 || o1 != o3 || o1 != o4 || o1 != o5));
}
