// Command-line front end: runs swarm scenarios, compares the two scheduler
// modes over seed sets, and sweeps the mobile fraction.

#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "mobiswarm/audit.hpp"
#include "mobiswarm/config.hpp"
#include "mobiswarm/engine.hpp"
#include "mobiswarm/log.hpp"
#include "mobiswarm/report.hpp"

namespace fs = std::filesystem;
using namespace mobiswarm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInternal = 2;

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  std::vector<std::uint64_t> seeds;
  const auto parse_one = [](const std::string& tok) {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(tok, &pos);
    if (pos != tok.size()) throw ConfigError("bad seed '" + tok + "'");
    return static_cast<std::uint64_t>(v);
  };

  const std::size_t dash = spec.find('-');
  if (dash != std::string::npos && spec.find(',') == std::string::npos) {
    const std::uint64_t lo = parse_one(spec.substr(0, dash));
    const std::uint64_t hi = parse_one(spec.substr(dash + 1));
    if (hi < lo) throw ConfigError("seed range is reversed: " + spec);
    if (hi - lo > 10000) throw ConfigError("seed range too large: " + spec);
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
    return seeds;
  }

  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t comma = spec.find(',', start);
    const std::string tok =
        spec.substr(start, comma == std::string::npos ? std::string::npos
                                                      : comma - start);
    if (tok.empty()) throw ConfigError("empty seed in list: " + spec);
    seeds.push_back(parse_one(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (seeds.empty()) throw ConfigError("no seeds given");
  return seeds;
}

std::vector<double> parse_fractions(const std::string& spec) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t comma = spec.find(',', start);
    const std::string tok =
        spec.substr(start, comma == std::string::npos ? std::string::npos
                                                      : comma - start);
    std::size_t pos = 0;
    const double f = std::stod(tok, &pos);
    if (pos != tok.size() || f < 0.0 || f > 1.0)
      throw ConfigError("bad mobile fraction '" + tok + "'");
    out.push_back(f);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw ConfigError("no fractions given");
  return out;
}

std::vector<Mode> parse_modes(const std::string& mode) {
  if (mode == "baseline") return {Mode::Baseline};
  if (mode == "hybrid") return {Mode::Hybrid};
  if (mode == "both") return {Mode::Baseline, Mode::Hybrid};
  throw ConfigError("mode must be baseline, hybrid, or both");
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw SimError("cannot write " + p.string());
  out << content;
}

struct Job {
  Mode mode = Mode::Baseline;
  std::uint64_t seed = 0;
  fs::path dir;
};

// Runs every job on `jobs` worker threads and writes per-run files as each
// finishes. Result slots are preassigned, so output order never depends on
// scheduling.
std::vector<RunArtifacts> run_all(const ScenarioConfig& cfg,
                                  const std::vector<Job>& todo, int jobs,
                                  LogLevel level) {
  RunOptions opts;
  opts.capture_event_log = level == LogLevel::Debug;

  std::vector<RunArtifacts> results(todo.size());
  std::vector<std::exception_ptr> errors(todo.size());
  std::atomic<std::size_t> next{0};

  const auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= todo.size()) return;
      try {
        const Job& job = todo[i];
        RunResult r = run_scenario(cfg, job.mode, job.seed, opts);
        write_file(job.dir / "summary.csv",
                   summary_csv_header() + summary_csv_row(r.summary));
        write_file(job.dir / "timeseries.csv", timeseries_csv(r.timeseries));
        if (opts.capture_event_log)
          write_file(job.dir / "event.log", r.event_log);
        log_line(level, LogLevel::Info,
                 std::string("done ") + to_string(job.mode) + " seed " +
                     std::to_string(job.seed) + " completion " +
                     format_double(r.summary.completion_time_s) + "s");
        results[i] = RunArtifacts{r.summary, std::move(r.timeseries)};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(todo.size())));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();

  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

struct CommonArgs {
  std::string config_path;
  std::string mode = "both";
  std::string seeds = "1-10";
  std::string out = "out";
  int jobs = 1;
  double checkpoint_frac = 0.5;
};

ScenarioConfig load_config(const CommonArgs& args) {
  ScenarioConfig cfg = args.config_path.empty()
                           ? ScenarioConfig{}
                           : ScenarioConfig::from_ini_file(args.config_path);
  cfg.validate();
  // fault hook so operators can verify the failure path end to end
  if (const char* f = std::getenv("MOBISWARM_TEST_FAULT");
      f != nullptr && std::string(f) == "1")
    throw SimError("injected fault");
  return cfg;
}

std::vector<Job> make_jobs(const fs::path& root,
                           const std::vector<Mode>& modes,
                           const std::vector<std::uint64_t>& seeds) {
  std::vector<Job> todo;
  for (Mode m : modes)
    for (std::uint64_t s : seeds) {
      Job j;
      j.mode = m;
      j.seed = s;
      j.dir = root / to_string(m) / ("seed-" + std::to_string(s));
      fs::create_directories(j.dir);
      todo.push_back(j);
    }
  return todo;
}

std::string combined_summary(const std::vector<RunArtifacts>& runs) {
  std::string out = summary_csv_header();
  for (const RunArtifacts& r : runs) out += summary_csv_row(r.summary);
  return out;
}

int cmd_run(const CommonArgs& args, LogLevel level) {
  const ScenarioConfig cfg = load_config(args);
  const auto modes = parse_modes(args.mode);
  const auto seeds = parse_seeds(args.seeds);
  const fs::path root(args.out);
  const auto todo = make_jobs(root, modes, seeds);
  const auto runs = run_all(cfg, todo, args.jobs, level);
  write_file(root / "summary.csv", combined_summary(runs));
  std::cout << combined_summary(runs);
  return kExitOk;
}

int cmd_compare(const CommonArgs& args, LogLevel level) {
  const ScenarioConfig cfg = load_config(args);
  const auto seeds = parse_seeds(args.seeds);
  const fs::path root(args.out);
  const auto todo =
      make_jobs(root, {Mode::Baseline, Mode::Hybrid}, seeds);
  const auto runs = run_all(cfg, todo, args.jobs, level);

  std::vector<RunArtifacts> base(runs.begin(),
                                 runs.begin() + static_cast<std::ptrdiff_t>(seeds.size()));
  std::vector<RunArtifacts> hyb(runs.begin() + static_cast<std::ptrdiff_t>(seeds.size()),
                                runs.end());
  const CompareReport rep = compare_runs(base, hyb, args.checkpoint_frac);

  write_file(root / "summary.csv", combined_summary(runs));
  write_file(root / "compare.csv", compare_csv(rep));
  std::cout << compare_text(rep);
  return kExitOk;
}

int cmd_sweep(const CommonArgs& args, const std::string& fractions_spec,
              LogLevel level) {
  ScenarioConfig cfg = load_config(args);
  const auto seeds = parse_seeds(args.seeds);
  const auto fractions = parse_fractions(fractions_spec);
  const fs::path root(args.out);

  std::string sweep_csv =
      "mobile_fraction,median_baseline_completion_s,median_hybrid_completion_s,"
      "median_blocks_gain_pct,wins_checkpoint_blocks,seeds,"
      "median_baseline_latency_mobile_s,median_hybrid_latency_mobile_s,"
      "max_mobile_fraction_pct\n";

  for (double f : fractions) {
    cfg.mobile_fraction = f;
    cfg.validate();
    const fs::path frac_root = root / ("mf-" + format_double(f));
    const auto todo =
        make_jobs(frac_root, {Mode::Baseline, Mode::Hybrid}, seeds);
    const auto runs = run_all(cfg, todo, args.jobs, level);

    std::vector<RunArtifacts> base(runs.begin(),
                                   runs.begin() + static_cast<std::ptrdiff_t>(seeds.size()));
    std::vector<RunArtifacts> hyb(runs.begin() + static_cast<std::ptrdiff_t>(seeds.size()),
                                  runs.end());
    const CompareReport rep = compare_runs(base, hyb, args.checkpoint_frac);
    write_file(frac_root / "summary.csv", combined_summary(runs));
    write_file(frac_root / "compare.csv", compare_csv(rep));

    std::vector<double> bl, hl;
    for (const RunArtifacts& r : base) bl.push_back(r.summary.mean_latency_mobile_s);
    for (const RunArtifacts& r : hyb) hl.push_back(r.summary.mean_latency_mobile_s);

    const std::int64_t num_mobile = static_cast<std::int64_t>(
        std::llround(f * static_cast<double>(cfg.num_leechers)));
    std::vector<Rate> ups;
    for (std::int64_t i = 0; i < cfg.num_seeders; ++i)
      if (eligible_for_mobile_seeding(cfg.seeder_up, cfg.min_seed_rate))
        ups.push_back(cfg.seeder_up);
    const double cap_pct = max_mobile_fraction(
        ups, cfg.r_min_mobile, static_cast<std::size_t>(num_mobile));

    sweep_csv += format_double(f) + ',' +
                 format_double(rep.median_baseline_completion_s) + ',' +
                 format_double(rep.median_hybrid_completion_s) + ',' +
                 format_double(rep.median_blocks_gain_pct) + ',' +
                 std::to_string(rep.wins_checkpoint_blocks) + ',' +
                 std::to_string(seeds.size()) + ',' + format_double(median(bl)) +
                 ',' + format_double(median(hl)) + ',' +
                 format_double(cap_pct) + '\n';
    log_line(level, LogLevel::Info,
             "fraction " + format_double(f) + " done, median gain " +
                 format_double(rep.median_blocks_gain_pct) + "%");
  }

  write_file(root / "sweep.csv", sweep_csv);
  std::cout << sweep_csv;
  return kExitOk;
}

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config_path,
                  "scenario config file (INI); defaults are built in");
  sub->add_option("--seeds", args.seeds, "seed list '1,5,9' or range '1-10'")
      ->capture_default_str();
  sub->add_option("--out", args.out, "output directory")->capture_default_str();
  sub->add_option("--jobs", args.jobs, "worker threads")
      ->check(CLI::Range(1, 256))
      ->capture_default_str();
  sub->add_option("--checkpoint-frac", args.checkpoint_frac,
                  "checkpoint as a fraction of median baseline completion")
      ->check(CLI::Range(0.01, 1.0))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  const LogLevel level = log_level_from_env();

  CLI::App app{"deterministic swarm transfer simulator"};
  app.require_subcommand(1);

  CommonArgs run_args;
  CLI::App* run = app.add_subcommand("run", "simulate and write per-run CSVs");
  add_common(run, run_args);
  run->add_option("--mode", run_args.mode, "baseline, hybrid, or both")
      ->capture_default_str();

  CommonArgs cmp_args;
  CLI::App* cmp = app.add_subcommand(
      "compare", "run both modes over a seed set and tabulate the deltas");
  add_common(cmp, cmp_args);

  CommonArgs sweep_args;
  std::string fractions = "0,0.25,0.5,0.75,1";
  CLI::App* sweep = app.add_subcommand(
      "sweep", "compare modes across mobile population fractions");
  add_common(sweep, sweep_args);
  sweep->add_option("--fractions", fractions, "comma-separated fractions")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(run_args, level);
    if (cmp->parsed()) return cmd_compare(cmp_args, level);
    return cmd_sweep(sweep_args, fractions, level);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
