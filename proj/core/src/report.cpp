#include "mobiswarm/report.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

#include "mobiswarm/types.hpp"

namespace mobiswarm {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

double to_double(const std::string& s) {
  double x = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw ConfigError("bad number in CSV: '" + s + "'");
  return x;
}

std::int64_t to_int(const std::string& s) {
  std::int64_t x = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw ConfigError("bad integer in CSV: '" + s + "'");
  return x;
}

}  // namespace

double median(std::vector<double> xs) {
  if (xs.empty()) throw SimError("median of empty sample");
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
}

std::int64_t cumulative_at(const std::vector<TimePoint>& ts, double t_s) {
  std::int64_t cum = 0;
  for (const TimePoint& p : ts) {
    if (p.t_s > t_s) break;
    cum = p.cumulative_blocks;
  }
  if (!ts.empty() && ts.back().t_s <= t_s) cum = ts.back().cumulative_blocks;
  return cum;
}

CompareReport compare_runs(const std::vector<RunArtifacts>& baseline,
                           const std::vector<RunArtifacts>& hybrid,
                           double checkpoint_frac) {
  if (baseline.empty() || baseline.size() != hybrid.size())
    throw ConfigError("compare needs the same non-empty seed set in both modes");

  std::map<std::uint64_t, const RunArtifacts*> by_seed;
  for (const RunArtifacts& h : hybrid) by_seed[h.summary.seed] = &h;

  std::vector<double> base_completions;
  for (const RunArtifacts& b : baseline) {
    if (!by_seed.count(b.summary.seed))
      throw ConfigError("hybrid run missing for seed " +
                        std::to_string(b.summary.seed));
    base_completions.push_back(b.summary.completion_time_s);
  }

  CompareReport rep;
  rep.median_baseline_completion_s = median(base_completions);
  rep.checkpoint_t_s = checkpoint_frac * rep.median_baseline_completion_s;

  std::vector<double> gains;
  std::vector<double> hybrid_completions;
  for (const RunArtifacts& b : baseline) {
    const RunArtifacts& h = *by_seed.at(b.summary.seed);
    SeedComparison sc;
    sc.seed = b.summary.seed;
    sc.baseline_completion_s = b.summary.completion_time_s;
    sc.hybrid_completion_s = h.summary.completion_time_s;
    sc.baseline_checkpoint_blocks =
        cumulative_at(b.timeseries, rep.checkpoint_t_s);
    sc.hybrid_checkpoint_blocks =
        cumulative_at(h.timeseries, rep.checkpoint_t_s);
    sc.blocks_gain_pct =
        sc.baseline_checkpoint_blocks > 0
            ? 100.0 *
                  (static_cast<double>(sc.hybrid_checkpoint_blocks) -
                   static_cast<double>(sc.baseline_checkpoint_blocks)) /
                  static_cast<double>(sc.baseline_checkpoint_blocks)
            : 0.0;
    sc.baseline_latency_mobile_s = b.summary.mean_latency_mobile_s;
    sc.hybrid_latency_mobile_s = h.summary.mean_latency_mobile_s;
    sc.baseline_c_avg = b.summary.c_avg;
    sc.hybrid_c_avg = h.summary.c_avg;

    if (sc.hybrid_checkpoint_blocks > sc.baseline_checkpoint_blocks)
      ++rep.wins_checkpoint_blocks;
    if (sc.hybrid_latency_mobile_s < sc.baseline_latency_mobile_s)
      ++rep.wins_latency_mobile;
    if (sc.hybrid_c_avg > sc.baseline_c_avg) ++rep.wins_capacity;

    gains.push_back(sc.blocks_gain_pct);
    hybrid_completions.push_back(sc.hybrid_completion_s);
    rep.seeds.push_back(sc);
  }
  rep.median_blocks_gain_pct = median(gains);
  rep.median_hybrid_completion_s = median(hybrid_completions);
  return rep;
}

std::string compare_csv(const CompareReport& r) {
  std::ostringstream out;
  out << "seed,baseline_completion_s,hybrid_completion_s,"
         "baseline_checkpoint_blocks,hybrid_checkpoint_blocks,blocks_gain_pct,"
         "baseline_latency_mobile_s,hybrid_latency_mobile_s,"
         "baseline_c_avg,hybrid_c_avg\n";
  for (const SeedComparison& s : r.seeds) {
    out << s.seed << ',' << format_double(s.baseline_completion_s) << ','
        << format_double(s.hybrid_completion_s) << ','
        << s.baseline_checkpoint_blocks << ',' << s.hybrid_checkpoint_blocks
        << ',' << format_double(s.blocks_gain_pct) << ','
        << format_double(s.baseline_latency_mobile_s) << ','
        << format_double(s.hybrid_latency_mobile_s) << ','
        << format_double(s.baseline_c_avg) << ','
        << format_double(s.hybrid_c_avg) << '\n';
  }
  return out.str();
}

std::string compare_text(const CompareReport& r) {
  std::ostringstream out;
  const int n = static_cast<int>(r.seeds.size());
  out << "checkpoint at " << format_double(r.checkpoint_t_s) << "s ("
      << "median baseline completion "
      << format_double(r.median_baseline_completion_s) << "s)\n";
  out << "hybrid ahead on checkpoint blocks in " << r.wins_checkpoint_blocks
      << "/" << n << " seeds, median gain "
      << format_double(r.median_blocks_gain_pct) << "%\n";
  out << "hybrid lower mobile latency in " << r.wins_latency_mobile << "/" << n
      << " seeds\n";
  out << "hybrid higher delivery capacity in " << r.wins_capacity << "/" << n
      << " seeds\n";
  out << "median completion: baseline "
      << format_double(r.median_baseline_completion_s) << "s, hybrid "
      << format_double(r.median_hybrid_completion_s) << "s\n";
  return out.str();
}

std::vector<RunSummary> parse_summary_csv(const std::string& text) {
  std::vector<RunSummary> out;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      first = false;  // header
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 9) throw ConfigError("summary row with wrong field count");
    RunSummary s;
    if (f[0] == "baseline")
      s.mode = Mode::Baseline;
    else if (f[0] == "hybrid")
      s.mode = Mode::Hybrid;
    else
      throw ConfigError("unknown mode '" + f[0] + "' in summary");
    s.seed = static_cast<std::uint64_t>(to_int(f[1]));
    s.completion_time_s = to_double(f[2]);
    s.mean_latency_s = to_double(f[3]);
    s.mean_latency_mobile_s = to_double(f[4]);
    s.mean_latency_static_s = to_double(f[5]);
    s.c_avg = to_double(f[6]);
    s.sdr = to_double(f[7]);
    s.peak_mobile_served = to_int(f[8]);
    out.push_back(s);
  }
  return out;
}

std::vector<TimePoint> parse_timeseries_csv(const std::string& text) {
  std::vector<TimePoint> out;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      first = false;
      continue;
    }
    const auto f = split(line, ',');
    if (f.size() != 6) throw ConfigError("timeseries row with wrong field count");
    TimePoint p;
    p.t_s = to_double(f[0]);
    p.cumulative_blocks = to_int(f[1]);
    p.throughput_blocks_per_s = to_double(f[2]);
    p.sdr = to_double(f[3]);
    p.mobile_served_fraction = to_double(f[4]);
    p.allocated_up_kBps = to_double(f[5]);
    out.push_back(p);
  }
  return out;
}

}  // namespace mobiswarm
