#include <doctest.h>

#include <charconv>
#include <string>
#include <vector>

#include "mobiswarm/metrics.hpp"
#include "mobiswarm/rng.hpp"
#include "mobiswarm/types.hpp"

using namespace mobiswarm;

namespace {

BlockTransferRecord rec(SimTime req, SimTime fin, TransferOutcome o,
                        PeerClass dest) {
  BlockTransferRecord r;
  r.requested_at = req;
  r.finished_at = fin;
  r.outcome = o;
  r.dest_class = dest;
  return r;
}

}  // namespace

TEST_CASE("block latency is the request-to-finish span in seconds") {
  CHECK(block_latency_s(rec(1000, 1160, TransferOutcome::Delivered,
                            PeerClass::Static)) == doctest::Approx(0.16));
  CHECK(block_latency_s(rec(0, 2500, TransferOutcome::Delivered,
                            PeerClass::Mobile)) == doctest::Approx(2.5));
}

TEST_CASE("mean latency averages delivered blocks, optionally by destination class") {
  const std::vector<BlockTransferRecord> rs{
      rec(0, 1000, TransferOutcome::Delivered, PeerClass::Mobile),
      rec(0, 3000, TransferOutcome::Delivered, PeerClass::Mobile),
      rec(0, 500, TransferOutcome::Delivered, PeerClass::Static),
      rec(0, 9000, TransferOutcome::Cancelled, PeerClass::Mobile),  // ignored
  };
  CHECK(mean_block_latency_s(rs, std::nullopt) == doctest::Approx(1.5));
  CHECK(mean_block_latency_s(rs, PeerClass::Mobile) == doctest::Approx(2.0));
  CHECK(mean_block_latency_s(rs, PeerClass::Static) == doctest::Approx(0.5));
  CHECK(mean_block_latency_s({}, std::nullopt) == 0.0);
  CHECK(mean_block_latency_s({rec(0, 1, TransferOutcome::Cancelled,
                                  PeerClass::Static)},
                             std::nullopt) == 0.0);
}

TEST_CASE("capacity average divides blocks by the observation window") {
  CHECK(capacity_avg(256, 128.0) == doctest::Approx(2.0));
  CHECK(capacity_avg(0, 10.0) == 0.0);
  CHECK(capacity_avg(100, 0.0) == 0.0);
  CHECK(capacity_avg(100, -1.0) == 0.0);
}

TEST_CASE("delivery ratio is 1 with nothing requested, else delivered over requested") {
  CHECK(successful_delivery_ratio(0, 0) == 1.0);
  CHECK(successful_delivery_ratio(5, 0) == 1.0);
  CHECK(successful_delivery_ratio(99, 100) == doctest::Approx(0.99));
  CHECK(successful_delivery_ratio(0, 7) == 0.0);
  CHECK(successful_delivery_ratio(7, 7) == 1.0);
}

TEST_CASE("format_double round-trips through from_chars exactly") {
  Rng gen(901);
  for (int rep = 0; rep < 2000; ++rep) {
    double x;
    switch (rep % 4) {
      case 0: x = static_cast<double>(gen.uniform(1u << 30)); break;
      case 1: x = gen.uniform01() * 1e6; break;
      case 2: x = -gen.uniform01(); break;
      default: x = static_cast<double>(gen.uniform(3600)) + 0.001 * gen.uniform(1000);
    }
    const std::string s = format_double(x);
    double back = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), back);
    REQUIRE(ec == std::errc{});
    REQUIRE(p == s.data() + s.size());
    CHECK(back == x);
  }
  CHECK(format_double(-1.0) == "-1");
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(1.5) == "1.5");
}

TEST_CASE("summary csv row matches the header shape") {
  RunSummary s;
  s.mode = Mode::Hybrid;
  s.seed = 7;
  s.completion_time_s = 284.006;
  s.mean_latency_s = 0.5;
  s.mean_latency_mobile_s = 0.75;
  s.mean_latency_static_s = 0.25;
  s.c_avg = 3.5;
  s.sdr = 1.0;
  s.peak_mobile_served = 12;

  const std::string header = summary_csv_header();
  const std::string row = summary_csv_row(s);
  CHECK(std::count(header.begin(), header.end(), ',') ==
        std::count(row.begin(), row.end(), ','));
  CHECK(header.back() == '\n');
  CHECK(row.back() == '\n');
  CHECK(row == "hybrid,7,284.006,0.5,0.75,0.25,3.5,1,12\n");

  s.mode = Mode::Baseline;
  s.completion_time_s = -1.0;  // never finished
  CHECK(summary_csv_row(s).rfind("baseline,7,-1,", 0) == 0);
}

TEST_CASE("timeseries csv lists one line per sample under a fixed header") {
  std::vector<TimePoint> pts(2);
  pts[0].t_s = 1.0;
  pts[0].cumulative_blocks = 10;
  pts[0].throughput_blocks_per_s = 10.0;
  pts[0].sdr = 1.0;
  pts[0].mobile_served_fraction = 0.5;
  pts[0].allocated_up_kBps = 100.0;
  pts[1].t_s = 2.0;
  pts[1].cumulative_blocks = 30;
  pts[1].throughput_blocks_per_s = 20.0;
  pts[1].sdr = 0.99;
  pts[1].mobile_served_fraction = 0.25;
  pts[1].allocated_up_kBps = 150.5;

  const std::string csv = timeseries_csv(pts);
  CHECK(csv ==
        "t_s,cumulative_blocks,throughput_blocks_per_s,sdr,"
        "mobile_served_fraction,allocated_up_kBps\n"
        "1,10,10,1,0.5,100\n"
        "2,30,20,0.99,0.25,150.5\n");
  CHECK(timeseries_csv({}) ==
        "t_s,cumulative_blocks,throughput_blocks_per_s,sdr,"
        "mobile_served_fraction,allocated_up_kBps\n");
}
