#include "mobiswarm/metrics.hpp"

#include <charconv>
#include <sstream>

namespace mobiswarm {

double block_latency_s(const BlockTransferRecord& r) {
  return static_cast<double>(r.finished_at - r.requested_at) /
         static_cast<double>(kMillisPerSecond);
}

double mean_block_latency_s(const std::vector<BlockTransferRecord>& records,
                            std::optional<PeerClass> dest_class) {
  double sum = 0.0;
  std::int64_t n = 0;
  for (const BlockTransferRecord& r : records) {
    if (r.outcome != TransferOutcome::Delivered) continue;
    if (dest_class && r.dest_class != *dest_class) continue;
    sum += block_latency_s(r);
    n += 1;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

double capacity_avg(std::int64_t delivered_blocks, double window_s) {
  if (window_s <= 0.0) return 0.0;
  return static_cast<double>(delivered_blocks) / window_s;
}

double successful_delivery_ratio(std::int64_t delivered,
                                 std::int64_t requested) {
  if (requested <= 0) return 1.0;
  return static_cast<double>(delivered) / static_cast<double>(requested);
}

std::string format_double(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

std::string summary_csv_header() {
  return "mode,seed,completion_time_s,mean_latency_s,mean_latency_mobile_s,"
         "mean_latency_static_s,c_avg_blocks_per_s,sdr,peak_mobile_served\n";
}

std::string summary_csv_row(const RunSummary& s) {
  std::ostringstream out;
  out << to_string(s.mode) << ',' << s.seed << ','
      << format_double(s.completion_time_s) << ','
      << format_double(s.mean_latency_s) << ','
      << format_double(s.mean_latency_mobile_s) << ','
      << format_double(s.mean_latency_static_s) << ','
      << format_double(s.c_avg) << ',' << format_double(s.sdr) << ','
      << s.peak_mobile_served << '\n';
  return out.str();
}

std::string timeseries_csv(const std::vector<TimePoint>& points) {
  std::ostringstream out;
  out << "t_s,cumulative_blocks,throughput_blocks_per_s,sdr,"
         "mobile_served_fraction,allocated_up_kBps\n";
  for (const TimePoint& p : points) {
    out << format_double(p.t_s) << ',' << p.cumulative_blocks << ','
        << format_double(p.throughput_blocks_per_s) << ','
        << format_double(p.sdr) << ','
        << format_double(p.mobile_served_fraction) << ','
        << format_double(p.allocated_up_kBps) << '\n';
  }
  return out.str();
}

}  // namespace mobiswarm
