#ifndef MOBISWARM_METRICS_HPP
#define MOBISWARM_METRICS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mobiswarm/types.hpp"

namespace mobiswarm {

enum class TransferOutcome { Delivered, Cancelled };

// One block transfer, recorded when it leaves flight (delivered or torn down
// by churn / connection loss).
struct BlockTransferRecord {
  SimTime requested_at = 0;
  SimTime finished_at = 0;
  TransferOutcome outcome = TransferOutcome::Delivered;
  PeerId src = 0;
  PeerId dest = 0;
  PeerClass dest_class = PeerClass::Static;
  std::int64_t bytes = 0;
  Rate effective_rate = 0;
  std::int64_t base_latency_ms = 0;
};

// Block latency is the full request-to-delivery span in seconds.
double block_latency_s(const BlockTransferRecord& r);

// Mean delivered-block latency, optionally restricted to one receiver class.
// Zero when nothing matches.
double mean_block_latency_s(const std::vector<BlockTransferRecord>& records,
                            std::optional<PeerClass> dest_class);

// Average delivery capacity: delivered blocks per second of elapsed window.
double capacity_avg(std::int64_t delivered_blocks, double window_s);

// Successful delivery ratio. A run that never requested anything delivered
// everything it was asked for.
double successful_delivery_ratio(std::int64_t delivered, std::int64_t requested);

// One row of the per-run time series.
struct TimePoint {
  double t_s = 0.0;
  std::int64_t cumulative_blocks = 0;
  double throughput_blocks_per_s = 0.0;  // over the last sample interval
  double sdr = 0.0;
  double mobile_served_fraction = 0.0;  // mobiles currently fed by a seeder
  double allocated_up_kBps = 0.0;       // planned upload across all peers
};

struct RunSummary {
  Mode mode = Mode::Baseline;
  std::uint64_t seed = 0;
  double completion_time_s = -1.0;  // -1 while any leecher is incomplete
  double mean_latency_s = 0.0;
  double mean_latency_mobile_s = 0.0;
  double mean_latency_static_s = 0.0;
  double c_avg = 0.0;
  double sdr = 0.0;
  std::int64_t peak_mobile_served = 0;
};

// CSV emission. Locale-independent: numbers go through std::to_chars.
std::string summary_csv_header();
std::string summary_csv_row(const RunSummary& s);
std::string timeseries_csv(const std::vector<TimePoint>& points);

std::string format_double(double x);

}  // namespace mobiswarm

#endif  // MOBISWARM_METRICS_HPP
