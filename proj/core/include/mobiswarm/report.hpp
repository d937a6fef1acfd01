#ifndef MOBISWARM_REPORT_HPP
#define MOBISWARM_REPORT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mobiswarm/metrics.hpp"

namespace mobiswarm {

// What a comparison needs from one finished run.
struct RunArtifacts {
  RunSummary summary;
  std::vector<TimePoint> timeseries;
};

struct SeedComparison {
  std::uint64_t seed = 0;
  double baseline_completion_s = 0.0;
  double hybrid_completion_s = 0.0;
  std::int64_t baseline_checkpoint_blocks = 0;
  std::int64_t hybrid_checkpoint_blocks = 0;
  double blocks_gain_pct = 0.0;
  double baseline_latency_mobile_s = 0.0;
  double hybrid_latency_mobile_s = 0.0;
  double baseline_c_avg = 0.0;
  double hybrid_c_avg = 0.0;
};

struct CompareReport {
  double checkpoint_t_s = 0.0;  // checkpoint_frac of the median baseline finish
  std::vector<SeedComparison> seeds;
  int wins_checkpoint_blocks = 0;  // seeds where hybrid delivered more by then
  int wins_latency_mobile = 0;     // seeds where hybrid mobile latency is lower
  int wins_capacity = 0;           // seeds where hybrid c_avg is higher
  double median_blocks_gain_pct = 0.0;
  double median_baseline_completion_s = 0.0;
  double median_hybrid_completion_s = 0.0;
};

double median(std::vector<double> xs);  // empty input is an error

// Delivered blocks at time t: the last sample at or before t, the final
// count when the series ended earlier.
std::int64_t cumulative_at(const std::vector<TimePoint>& ts, double t_s);

// Pairs runs of the two modes by seed and sizes up the hybrid gains at
// checkpoint_frac of the median baseline completion time. Both lists must
// cover the same seeds.
CompareReport compare_runs(const std::vector<RunArtifacts>& baseline,
                           const std::vector<RunArtifacts>& hybrid,
                           double checkpoint_frac);

std::string compare_csv(const CompareReport& r);
std::string compare_text(const CompareReport& r);

// Inverse of the CSV writers, for comparing previously written runs.
std::vector<RunSummary> parse_summary_csv(const std::string& text);
std::vector<TimePoint> parse_timeseries_csv(const std::string& text);

}  // namespace mobiswarm

#endif  // MOBISWARM_REPORT_HPP
