#include "mobiswarm/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include "mobiswarm/swarm.hpp"

namespace mobiswarm {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

bool parse_int(std::string_view v, std::int64_t& out) {
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  return ec == std::errc{} && p == v.data() + v.size();
}

bool parse_double(std::string_view v, double& out) {
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  return ec == std::errc{} && p == v.data() + v.size();
}

bool parse_bool(std::string_view v, bool& out) {
  if (v == "true" || v == "1") return out = true, true;
  if (v == "false" || v == "0") return out = false, true;
  return false;
}

using Setter = std::function<bool(ScenarioConfig&, std::string_view)>;

Setter int_field(std::int64_t ScenarioConfig::* f) {
  return [f](ScenarioConfig& c, std::string_view v) { return parse_int(v, c.*f); };
}

Setter double_field(double ScenarioConfig::* f) {
  return [f](ScenarioConfig& c, std::string_view v) { return parse_double(v, c.*f); };
}

Setter bool_field(bool ScenarioConfig::* f) {
  return [f](ScenarioConfig& c, std::string_view v) { return parse_bool(v, c.*f); };
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"file_size", int_field(&ScenarioConfig::file_size)},
      {"piece_size", int_field(&ScenarioConfig::piece_size)},
      {"block_size", int_field(&ScenarioConfig::block_size)},
      {"num_leechers", int_field(&ScenarioConfig::num_leechers)},
      {"num_seeders", int_field(&ScenarioConfig::num_seeders)},
      {"mobile_fraction", double_field(&ScenarioConfig::mobile_fraction)},
      {"mobile_down", int_field(&ScenarioConfig::mobile_down)},
      {"mobile_up", int_field(&ScenarioConfig::mobile_up)},
      {"static_down", int_field(&ScenarioConfig::static_down)},
      {"static_up", int_field(&ScenarioConfig::static_up)},
      {"seeder_up", int_field(&ScenarioConfig::seeder_up)},
      {"mobile_down_threshold", int_field(&ScenarioConfig::mobile_down_threshold)},
      {"latency_mobile_ms", int_field(&ScenarioConfig::latency_mobile_ms)},
      {"latency_static_ms", int_field(&ScenarioConfig::latency_static_ms)},
      {"choke_interval_s", int_field(&ScenarioConfig::choke_interval_s)},
      {"optimistic_interval_s", int_field(&ScenarioConfig::optimistic_interval_s)},
      {"rate_window_s", int_field(&ScenarioConfig::rate_window_s)},
      {"announce_interval_s", int_field(&ScenarioConfig::announce_interval_s)},
      {"sample_interval_s", int_field(&ScenarioConfig::sample_interval_s)},
      {"duration_s", int_field(&ScenarioConfig::duration_s)},
      {"regular_slots", int_field(&ScenarioConfig::regular_slots)},
      {"u_default", int_field(&ScenarioConfig::u_default)},
      {"pipeline_depth", int_field(&ScenarioConfig::pipeline_depth)},
      {"budget_cap", int_field(&ScenarioConfig::budget_cap)},
      {"neighbor_sample", int_field(&ScenarioConfig::neighbor_sample)},
      {"trial_len_s", int_field(&ScenarioConfig::trial_len_s)},
      {"warmup_min_permille", int_field(&ScenarioConfig::warmup_min_permille)},
      {"r_min_mobile", int_field(&ScenarioConfig::r_min_mobile)},
      {"min_seed_rate", int_field(&ScenarioConfig::min_seed_rate)},
      {"latency_threshold_s", double_field(&ScenarioConfig::latency_threshold_s)},
      {"congestion_threshold_permille",
       int_field(&ScenarioConfig::congestion_threshold_permille)},
      {"min_transfer_rate", int_field(&ScenarioConfig::min_transfer_rate)},
      {"churn_enabled", bool_field(&ScenarioConfig::churn_enabled)},
      {"mean_online_s", int_field(&ScenarioConfig::mean_online_s)},
      {"mean_offline_s", int_field(&ScenarioConfig::mean_offline_s)},
      {"rank_key",
       [](ScenarioConfig& c, std::string_view v) {
         if (v == "reciprocal") return c.rank_key = RankKey::Reciprocal, true;
         if (v == "observed_upload")
           return c.rank_key = RankKey::ObservedUpload, true;
         return false;
       }},
      {"rotate_extra", bool_field(&ScenarioConfig::rotate_extra)},
      {"split_seeder_roles", bool_field(&ScenarioConfig::split_seeder_roles)},
  };
  return table;
}

void check(std::vector<std::string>& out, bool ok, const char* msg) {
  if (!ok) out.emplace_back(msg);
}

}  // namespace

std::string to_string(RankKey k) {
  return k == RankKey::Reciprocal ? "reciprocal" : "observed_upload";
}

void ScenarioConfig::validate() const {
  std::vector<std::string> v;

  try {
    (void)FileMap::partition(file_size, piece_size, block_size);
  } catch (const ConfigError& e) {
    v.insert(v.end(), e.violations().begin(), e.violations().end());
  }

  check(v, num_leechers >= 0, "num_leechers must be >= 0");
  check(v, num_seeders >= 1, "num_seeders must be >= 1");
  check(v, mobile_fraction >= 0.0 && mobile_fraction <= 1.0,
        "mobile_fraction must be in [0, 1]");

  check(v, mobile_down >= 1, "mobile_down must be >= 1");
  check(v, mobile_up >= 1, "mobile_up must be >= 1");
  check(v, static_down >= 1, "static_down must be >= 1");
  check(v, static_up >= 1, "static_up must be >= 1");
  check(v, seeder_up >= 1, "seeder_up must be >= 1");
  check(v, mobile_down_threshold >= 1, "mobile_down_threshold must be >= 1");
  check(v, mobile_down <= mobile_down_threshold,
        "mobile_down must be <= mobile_down_threshold, or mobile peers would "
        "classify as static");
  check(v, static_down > mobile_down_threshold,
        "static_down must be > mobile_down_threshold, or static peers would "
        "classify as mobile");

  check(v, latency_mobile_ms >= 0, "latency_mobile_ms must be >= 0");
  check(v, latency_static_ms >= 0, "latency_static_ms must be >= 0");

  check(v, choke_interval_s >= 1, "choke_interval_s must be >= 1");
  check(v, optimistic_interval_s >= 1, "optimistic_interval_s must be >= 1");
  check(v, optimistic_interval_s % choke_interval_s == 0,
        "optimistic_interval_s must be a multiple of choke_interval_s");
  check(v, rate_window_s >= 1, "rate_window_s must be >= 1");
  check(v,
        rate_window_s % choke_interval_s == 0 &&
            rate_window_s / choke_interval_s >= 1 &&
            rate_window_s / choke_interval_s <= 4,
        "rate_window_s must be 1x to 4x choke_interval_s, in whole multiples");
  check(v, announce_interval_s >= 1, "announce_interval_s must be >= 1");
  check(v, sample_interval_s >= 1, "sample_interval_s must be >= 1");
  check(v, duration_s >= 1, "duration_s must be >= 1");

  check(v, regular_slots >= 1, "regular_slots must be >= 1");
  check(v, u_default >= regular_slots + 1,
        "u_default must leave room for the optimistic slot "
        "(>= regular_slots + 1)");
  check(v, pipeline_depth >= 1, "pipeline_depth must be >= 1");
  check(v, budget_cap >= 1, "budget_cap must be >= 1");
  check(v, neighbor_sample >= 1, "neighbor_sample must be >= 1");

  check(v, trial_len_s >= 0, "trial_len_s must be >= 0");
  check(v, warmup_min_permille >= 0 && warmup_min_permille <= 1000,
        "warmup_min_permille must be in [0, 1000]");

  check(v, r_min_mobile >= 1, "r_min_mobile must be >= 1");
  check(v, min_seed_rate >= 0, "min_seed_rate must be >= 0");
  check(v, latency_threshold_s > 0.0, "latency_threshold_s must be > 0");
  check(v,
        congestion_threshold_permille >= 1 &&
            congestion_threshold_permille <= 1000,
        "congestion_threshold_permille must be in [1, 1000]");
  check(v, min_transfer_rate >= 1, "min_transfer_rate must be >= 1");

  if (churn_enabled) {
    check(v, mean_online_s >= 1, "mean_online_s must be >= 1 when churn is on");
    check(v, mean_offline_s >= 1, "mean_offline_s must be >= 1 when churn is on");
  }

  if (!v.empty()) throw ConfigError(std::move(v));
}

ScenarioConfig ScenarioConfig::from_ini_string(const std::string& text) {
  ScenarioConfig cfg;
  std::vector<std::string> errors;

  std::istringstream in(text);
  std::string raw;
  for (int lineno = 1; std::getline(in, raw); ++lineno) {
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    if (line.front() == '[' && line.back() == ']') continue;  // cosmetic

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      errors.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));

    const auto it = setters().find(key);
    if (it == setters().end()) {
      errors.push_back("line " + std::to_string(lineno) + ": unknown key '" +
                       std::string(key) + "'");
      continue;
    }
    if (!it->second(cfg, value)) {
      errors.push_back("line " + std::to_string(lineno) + ": bad value '" +
                       std::string(value) + "' for '" + std::string(key) + "'");
    }
  }

  if (!errors.empty()) throw ConfigError(std::move(errors));
  cfg.validate();
  return cfg;
}

ScenarioConfig ScenarioConfig::from_ini_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({"cannot open config file: " + path});
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_ini_string(buf.str());
}

std::string ScenarioConfig::to_ini_string() const {
  std::ostringstream out;
  const auto put_int = [&](const char* k, std::int64_t x) {
    out << k << " = " << x << "\n";
  };
  const auto put_double = [&](const char* k, double x) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    out << k << " = " << std::string_view(buf, p) << "\n";
  };
  const auto put_bool = [&](const char* k, bool x) {
    out << k << " = " << (x ? "true" : "false") << "\n";
  };

  put_int("file_size", file_size);
  put_int("piece_size", piece_size);
  put_int("block_size", block_size);
  put_int("num_leechers", num_leechers);
  put_int("num_seeders", num_seeders);
  put_double("mobile_fraction", mobile_fraction);
  put_int("mobile_down", mobile_down);
  put_int("mobile_up", mobile_up);
  put_int("static_down", static_down);
  put_int("static_up", static_up);
  put_int("seeder_up", seeder_up);
  put_int("mobile_down_threshold", mobile_down_threshold);
  put_int("latency_mobile_ms", latency_mobile_ms);
  put_int("latency_static_ms", latency_static_ms);
  put_int("choke_interval_s", choke_interval_s);
  put_int("optimistic_interval_s", optimistic_interval_s);
  put_int("rate_window_s", rate_window_s);
  put_int("announce_interval_s", announce_interval_s);
  put_int("sample_interval_s", sample_interval_s);
  put_int("duration_s", duration_s);
  put_int("regular_slots", regular_slots);
  put_int("u_default", u_default);
  put_int("pipeline_depth", pipeline_depth);
  put_int("budget_cap", budget_cap);
  put_int("neighbor_sample", neighbor_sample);
  put_int("trial_len_s", trial_len_s);
  put_int("warmup_min_permille", warmup_min_permille);
  put_int("r_min_mobile", r_min_mobile);
  put_int("min_seed_rate", min_seed_rate);
  put_double("latency_threshold_s", latency_threshold_s);
  put_int("congestion_threshold_permille", congestion_threshold_permille);
  put_int("min_transfer_rate", min_transfer_rate);
  put_bool("churn_enabled", churn_enabled);
  put_int("mean_online_s", mean_online_s);
  put_int("mean_offline_s", mean_offline_s);
  out << "rank_key = " << to_string(rank_key) << "\n";
  put_bool("rotate_extra", rotate_extra);
  put_bool("split_seeder_roles", split_seeder_roles);
  return out.str();
}

}  // namespace mobiswarm
