#include <doctest.h>

#include <algorithm>
#include <set>

#include "mobiswarm/rng.hpp"
#include "mobiswarm/tracker.hpp"
#include "mobiswarm/types.hpp"

using namespace mobiswarm;

namespace {

PeerRecord rec(PeerId id, PeerClass cls, Rate up, Rate down,
               bool congested = false) {
  PeerRecord r;
  r.peer = id;
  r.cls = cls;
  r.bw = {up, down};
  r.congested = congested;
  return r;
}

AnnounceRequest req(PeerId id, PeerClass cls, Rate up, Rate down,
                    bool seeder = false) {
  AnnounceRequest q;
  q.peer = id;
  q.cls = cls;
  q.bw = {up, down};
  q.is_seeder = seeder;
  return q;
}

}  // namespace

TEST_CASE("static destinations always get the default budget") {
  const auto b = connection_budget(rec(0, PeerClass::Static, 102400, 512000),
                                   rec(1, PeerClass::Static, 102400, 512000),
                                   5, 32);
  CHECK(b.max_connections == 5);
}

TEST_CASE("mobile budgets scale with the uploader's headroom") {
  // floor(102400 / 40960) = 2
  auto b = connection_budget(rec(0, PeerClass::Static, 102400, 512000),
                             rec(1, PeerClass::Mobile, 10240, 40960), 5, 32);
  CHECK(b.max_connections == 2);

  // halved (floor, min 1) while the destination reports congestion
  b = connection_budget(rec(0, PeerClass::Static, 102400, 512000),
                        rec(1, PeerClass::Mobile, 10240, 40960, true), 5, 32);
  CHECK(b.max_connections == 1);

  // never below one even for a weak uploader
  b = connection_budget(rec(0, PeerClass::Static, 1000, 512000),
                        rec(1, PeerClass::Mobile, 10240, 40960), 5, 32);
  CHECK(b.max_connections == 1);

  // clamped at the cap for a huge uploader
  b = connection_budget(rec(0, PeerClass::Static, 40960 * 100, 512000),
                        rec(1, PeerClass::Mobile, 10240, 40960), 5, 32);
  CHECK(b.max_connections == 32);
}

TEST_CASE("mobile budget matches the closed form on random inputs") {
  Rng rng(1001);
  for (int i = 0; i < 2000; ++i) {
    const Rate up = 1 + static_cast<Rate>(rng.uniform(1 << 20));
    const Rate down = 1 + static_cast<Rate>(rng.uniform(1 << 18));
    const bool congested = rng.uniform(2) == 1;
    const std::uint32_t cap = 1 + static_cast<std::uint32_t>(rng.uniform(64));
    const auto b = connection_budget(rec(0, PeerClass::Static, up, 512000),
                                     rec(1, PeerClass::Mobile, 1, down, congested),
                                     5, cap);
    std::int64_t expect = std::clamp<std::int64_t>(up / down, 1, cap);
    if (congested) expect = std::max<std::int64_t>(1, expect / 2);
    CHECK(b.max_connections == static_cast<std::uint32_t>(expect));
  }
}

TEST_CASE("budget computation rejects invalid bandwidth") {
  CHECK_THROWS_AS(connection_budget(rec(0, PeerClass::Static, 0, 1),
                                    rec(1, PeerClass::Mobile, 1, 1), 5, 32),
                  SimError);
}

TEST_CASE("announce registers peers and samples only other online peers") {
  Tracker t({5, 32, 50});
  Rng rng(3);
  for (PeerId p = 0; p < 20; ++p)
    t.handle_announce(req(p, PeerClass::Static, 102400, 512000, p < 2), 0, rng);
  CHECK(t.size() == 20);

  const auto resp = t.handle_announce(req(5, PeerClass::Static, 102400, 512000), 10, rng);
  CHECK(resp.neighbors.size() == 19);  // everyone else, under the sample cap
  std::set<PeerId> seen;
  for (const auto& [id, cls] : resp.neighbors) {
    CHECK(id != 5);
    CHECK(seen.insert(id).second);  // no duplicates
  }
  // budgets are provided exactly for the seeders in the sample
  std::set<PeerId> budget_ids;
  for (const auto& [id, b] : resp.budgets) budget_ids.insert(id);
  CHECK(budget_ids == std::set<PeerId>{0, 1});
}

TEST_CASE("announce caps the neighbor sample") {
  Tracker t({5, 32, 10});
  Rng rng(4);
  for (PeerId p = 0; p < 40; ++p)
    t.handle_announce(req(p, PeerClass::Static, 102400, 512000), 0, rng);
  const auto resp = t.handle_announce(req(0, PeerClass::Static, 102400, 512000), 1, rng);
  CHECK(resp.neighbors.size() == 10);
}

TEST_CASE("offline peers are not handed out and return after set_online") {
  Tracker t({5, 32, 50});
  Rng rng(5);
  for (PeerId p = 0; p < 5; ++p)
    t.handle_announce(req(p, PeerClass::Static, 102400, 512000), 0, rng);
  t.set_online(3, false);
  auto resp = t.handle_announce(req(0, PeerClass::Static, 102400, 512000), 1, rng);
  for (const auto& [id, cls] : resp.neighbors) CHECK(id != 3);
  CHECK(resp.neighbors.size() == 3);

  t.set_online(3, true);
  resp = t.handle_announce(req(0, PeerClass::Static, 102400, 512000), 2, rng);
  CHECK(resp.neighbors.size() == 4);
}

TEST_CASE("a peer may not change class between announces") {
  Tracker t;
  Rng rng(6);
  t.handle_announce(req(1, PeerClass::Mobile, 10240, 40960), 0, rng);
  CHECK_THROWS_AS(
      t.handle_announce(req(1, PeerClass::Static, 10240, 40960), 1, rng),
      TrackerError);
}

TEST_CASE("announce rejects invalid bandwidth without registering") {
  Tracker t;
  Rng rng(7);
  CHECK_THROWS_AS(t.handle_announce(req(1, PeerClass::Static, 0, 100), 0, rng),
                  TrackerError);
  CHECK(t.size() == 0);
}

TEST_CASE("congestion signal halves later budgets toward the peer") {
  Tracker t({5, 32, 50});
  Rng rng(8);
  t.handle_announce(req(0, PeerClass::Static, 102400, 512000, true), 0, rng);
  t.handle_announce(req(1, PeerClass::Mobile, 10240, 40960), 0, rng);
  CHECK(t.budget_for(0, 1).max_connections == 2);
  t.signal_congestion(1, true);
  CHECK(t.budget_for(0, 1).max_connections == 1);
  t.signal_congestion(1, false);
  CHECK(t.budget_for(0, 1).max_connections == 2);
  CHECK_THROWS_AS(t.signal_congestion(99, true), TrackerError);
  CHECK_THROWS_AS(t.budget_for(0, 99), TrackerError);
}

TEST_CASE("announce sampling is deterministic under the same stream") {
  Tracker t1({5, 32, 5}), t2({5, 32, 5});
  Rng r1(55), r2(55);
  for (PeerId p = 0; p < 30; ++p) {
    t1.handle_announce(req(p, PeerClass::Static, 102400, 512000), 0, r1);
    t2.handle_announce(req(p, PeerClass::Static, 102400, 512000), 0, r2);
  }
  const auto a = t1.handle_announce(req(2, PeerClass::Static, 102400, 512000), 1, r1);
  const auto b = t2.handle_announce(req(2, PeerClass::Static, 102400, 512000), 1, r2);
  CHECK(a.neighbors == b.neighbors);
}
