#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "mobiswarm/config.hpp"
#include "mobiswarm/engine.hpp"
#include "mobiswarm/peer.hpp"
#include "mobiswarm/policy.hpp"
#include "mobiswarm/rng.hpp"
#include "mobiswarm/swarm.hpp"

using namespace mobiswarm;

namespace {

std::vector<PlanDest> bench_dests(std::size_t n_static, std::size_t n_mobile,
                                  std::size_t n_extra) {
  Rng gen(1);
  std::vector<PlanDest> dests;
  PeerId id = 1;
  for (std::size_t i = 0; i < n_static + n_mobile + n_extra; ++i) {
    PlanDest d;
    d.id = id++;
    d.extra = i >= n_static + n_mobile;
    d.cls = i < n_static ? PeerClass::Static : PeerClass::Mobile;
    d.down_rate = d.cls == PeerClass::Static ? 512000 : 40960;
    d.remaining_down = d.down_rate - static_cast<Rate>(gen.uniform(20480));
    d.budget = 1 + static_cast<std::int64_t>(gen.uniform(6));
    dests.push_back(d);
  }
  return dests;
}

void BM_PlanUploadsHybrid(benchmark::State& state) {
  const auto dests = bench_dests(2, 3, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    UploadPlan p = plan_uploads(Mode::Hybrid, 102400, dests, {});
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_PlanUploadsHybrid)->Arg(0)->Arg(4)->Arg(16);

void BM_RarestOrder(benchmark::State& state) {
  const std::int64_t pieces = state.range(0);
  const FileMap map = FileMap::partition(pieces * 16384, 16384, 1024);
  Rng gen(2);
  std::vector<Bitfield> fields;
  for (int i = 0; i < 60; ++i) {
    Bitfield f(map);
    for (std::uint32_t p = 0; p < map.num_pieces(); ++p)
      if (gen.uniform(3) == 0)
        for (std::uint32_t b = 0; b < map.blocks_in_piece(p); ++b)
          f.set_block(p, b);
    fields.push_back(std::move(f));
  }
  std::vector<const Bitfield*> views;
  for (const Bitfield& f : fields) views.push_back(&f);
  const Bitfield own(map);
  for (auto _ : state) {
    Rng local(3);
    auto order = rarest_order(views, own, local);
    benchmark::DoNotOptimize(order);
  }
}
BENCHMARK(BM_RarestOrder)->Arg(16)->Arg(64)->Arg(256);

void BM_RecomputeChokes(benchmark::State& state) {
  Rng gen(4);
  std::vector<ChokeCandidate> cands;
  for (int i = 0; i < static_cast<int>(state.range(0)); ++i)
    cands.push_back({static_cast<PeerId>(i),
                     i % 2 == 0 ? PeerClass::Mobile : PeerClass::Static, false,
                     static_cast<std::int64_t>(gen.uniform(1 << 20))});
  for (auto _ : state) {
    Rng local(5);
    auto d = recompute_chokes(cands, 4, local);
    benchmark::DoNotOptimize(d);
  }
}
BENCHMARK(BM_RecomputeChokes)->Arg(10)->Arg(50)->Arg(200);

void BM_RunScenarioSmall(benchmark::State& state) {
  ScenarioConfig cfg;
  cfg.num_leechers = 24;
  cfg.num_seeders = 3;
  cfg.file_size = 1024 * 1024;
  cfg.duration_s = 1200;
  const Mode mode = state.range(0) == 0 ? Mode::Baseline : Mode::Hybrid;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    RunResult r = run_scenario(cfg, mode, seed++);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_RunScenarioSmall)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_RunScenarioDefault(benchmark::State& state) {
  const ScenarioConfig cfg;
  const Mode mode = state.range(0) == 0 ? Mode::Baseline : Mode::Hybrid;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    RunResult r = run_scenario(cfg, mode, seed++);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_RunScenarioDefault)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
