#include "mobiswarm/engine.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <queue>
#include <sstream>
#include <utility>

#include "mobiswarm/peer.hpp"
#include "mobiswarm/rng.hpp"
#include "mobiswarm/swarm.hpp"
#include "mobiswarm/tracker.hpp"

namespace mobiswarm {

SimTime transfer_time_ms(std::int64_t bytes, Rate effective_rate,
                         std::int64_t base_latency_ms) {
  if (bytes <= 0 || effective_rate <= 0 || base_latency_ms < 0)
    throw SimError("transfer_time_ms: bad arguments");
  return base_latency_ms + ceil_div(bytes * kMillisPerSecond, effective_rate);
}

namespace {

constexpr int kMaxWindowBuckets = 4;

// Rolling per-neighbor statistics, bucketed by choke interval. The window sum
// spans all buckets; the current bucket is reset on rotation.
struct PairState {
  SimTime met_at = -1;
  std::array<std::int64_t, kMaxWindowBuckets> recv{};
  std::array<std::int64_t, kMaxWindowBuckets> sent{};
  std::array<std::int64_t, kMaxWindowBuckets> lat_sum_ms{};
  std::array<std::int64_t, kMaxWindowBuckets> lat_cnt{};
  SimTime refuse_until = -1;  // we decline service from this neighbor until then
};

struct LiveAlloc {
  PeerId dest = 0;
  std::uint32_t conns = 0;
  Rate rate = 0;
};

struct Node {
  PeerId id = 0;
  PeerClass cls = PeerClass::Static;
  Bandwidth bw;
  bool initial_seeder = false;
  bool serve_static_only = false;
  bool online = true;
  Bitfield have;
  RequestTracker requested;
  SimTime completed_at = -1;
  std::vector<PeerId> met;  // discovery order
  std::vector<PairState> pairs;
  std::vector<LiveAlloc> alloc;
  std::optional<PeerId> optimistic;
  Rate inflight_in = 0;  // locked rates of blocks currently inbound
  Rate planned_in = 0;   // other peers' allocation rates aimed at us
  std::uint64_t announce_gen = 0;

  bool seeder() const { return have.complete(); }
};

struct Flight {
  std::uint64_t id = 0;
  PeerId src = 0;
  PeerId dest = 0;
  BlockId block;
  std::int64_t bytes = 0;
  SimTime requested_at = 0;
  SimTime deliver_at = 0;
  Rate r_eff = 0;
  std::int64_t base_ms = 0;
};

enum class Ev : std::uint8_t { Announce, Choke, Sample, Deliver, Leave, Return };

struct Event {
  SimTime t = 0;
  std::uint64_t seq = 0;
  Ev kind = Ev::Sample;
  PeerId peer = 0;
  std::uint64_t payload = 0;  // flight id or announce generation
};

struct EventAfter {
  bool operator()(const Event& a, const Event& b) const {
    if (a.t != b.t) return a.t > b.t;
    return a.seq > b.seq;
  }
};

class World {
 public:
  World(const ScenarioConfig& cfg, Mode mode, std::uint64_t seed,
        const RunOptions& opts)
      : cfg_(cfg),
        mode_(mode),
        seed_(seed),
        opts_(opts),
        rng_build_(Rng::for_run(seed, 0)),
        rng_(Rng::for_run(seed, 1)),
        rng_churn_(Rng::for_run(seed, 2)),
        tracker_(TrackerConfig{static_cast<std::uint32_t>(cfg.u_default),
                               static_cast<std::uint32_t>(cfg.budget_cap),
                               static_cast<std::uint32_t>(cfg.neighbor_sample)}) {}

  RunResult run() {
    build();
    if (incomplete_ > 0) {
      while (!queue_.empty()) {
        const Event ev = queue_.top();
        queue_.pop();
        if (ev.t > duration_ms_) break;
        now_ = ev.t;
        dispatch(ev);
        if (stop_) break;
      }
    }
    return finish();
  }

 private:
  // --- setup -------------------------------------------------------------

  void build() {
    map_ = FileMap::partition(cfg_.file_size, cfg_.piece_size, cfg_.block_size);
    duration_ms_ = cfg_.duration_s * kMillisPerSecond;
    choke_ms_ = cfg_.choke_interval_s * kMillisPerSecond;
    optimistic_ms_ = cfg_.optimistic_interval_s * kMillisPerSecond;
    announce_ms_ = cfg_.announce_interval_s * kMillisPerSecond;
    sample_ms_ = cfg_.sample_interval_s * kMillisPerSecond;
    trial_ms_ = cfg_.trial_len_s * kMillisPerSecond;
    window_buckets_ = static_cast<int>(
        std::clamp<std::int64_t>(cfg_.rate_window_s / cfg_.choke_interval_s, 1,
                                 kMaxWindowBuckets));

    const std::size_t num_seeders = static_cast<std::size_t>(cfg_.num_seeders);
    const std::size_t num_leechers = static_cast<std::size_t>(cfg_.num_leechers);
    const std::size_t n = num_seeders + num_leechers;

    num_mobile_ = static_cast<std::int64_t>(
        std::llround(cfg_.mobile_fraction * static_cast<double>(num_leechers)));
    std::vector<PeerClass> labels(num_leechers, PeerClass::Static);
    for (std::int64_t i = 0; i < num_mobile_; ++i) labels[static_cast<std::size_t>(i)] = PeerClass::Mobile;
    rng_build_.shuffle(labels);

    nodes_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      Node& p = nodes_[i];
      p.id = static_cast<PeerId>(i);
      p.pairs.assign(n, PairState{});
      p.requested = RequestTracker(map_);
      if (i < num_seeders) {
        p.cls = PeerClass::Static;
        p.bw = {cfg_.seeder_up, cfg_.static_down};
        p.initial_seeder = true;
        p.have = Bitfield::full(map_);
        p.serve_static_only = mode_ == Mode::Hybrid && cfg_.split_seeder_roles &&
                              num_seeders >= 2 && (i % 2 == 1);
      } else {
        p.cls = labels[i - num_seeders];
        p.bw = p.cls == PeerClass::Mobile
                   ? Bandwidth{cfg_.mobile_up, cfg_.mobile_down}
                   : Bandwidth{cfg_.static_up, cfg_.static_down};
        p.have = Bitfield(map_);
      }
      if (classify_peer(p.bw, cfg_.mobile_down_threshold) != p.cls)
        throw SimError("scenario: bandwidth profile contradicts peer class");
    }
    incomplete_ = static_cast<std::int64_t>(num_leechers);

    std::vector<Rate> eligible_ups;
    for (std::size_t i = 0; i < num_seeders; ++i)
      if (eligible_for_mobile_seeding(nodes_[i].bw.up, cfg_.min_seed_rate))
        eligible_ups.push_back(nodes_[i].bw.up);
    max_mobile_pct_ = max_mobile_fraction(eligible_ups, cfg_.r_min_mobile,
                                          static_cast<std::size_t>(num_mobile_));

    if (opts_.capture_event_log) {
      put("run seed=" + std::to_string(seed_) + " peers=" + std::to_string(n) +
          " blocks=" + std::to_string(map_.total_blocks()));
      for (const Node& nd : nodes_)
        put("nd p=" + std::to_string(nd.id) +
            " c=" + std::to_string(nd.cls == PeerClass::Mobile ? 1 : 0) +
            " u=" + std::to_string(nd.bw.up) +
            " d=" + std::to_string(nd.bw.down) +
            " s=" + std::to_string(nd.initial_seeder ? 1 : 0));
    }

    for (std::size_t i = 0; i < n; ++i) {
      nodes_[i].announce_gen = 1;
      push_event(0, Ev::Announce, static_cast<PeerId>(i), 1);
    }
    push_event(0, Ev::Choke, 0, 0);
    push_event(0, Ev::Sample, 0, 0);

    if (cfg_.churn_enabled) {
      for (std::size_t i = num_seeders; i < n; ++i) {
        if (nodes_[i].cls != PeerClass::Mobile) continue;
        const SimTime t =
            rng_churn_.exponential_ms(cfg_.mean_online_s * kMillisPerSecond);
        if (t <= duration_ms_) push_event(t, Ev::Leave, static_cast<PeerId>(i), 0);
      }
    }
  }

  // --- event plumbing ----------------------------------------------------

  void push_event(SimTime t, Ev kind, PeerId peer, std::uint64_t payload) {
    queue_.push(Event{t, seq_++, kind, peer, payload});
  }

  void dispatch(const Event& ev) {
    switch (ev.kind) {
      case Ev::Announce: on_announce(ev.peer, ev.payload); break;
      case Ev::Choke: on_choke_tick(); break;
      case Ev::Sample: on_sample(); break;
      case Ev::Deliver: on_deliver(ev.payload); break;
      case Ev::Leave: on_leave(ev.peer); break;
      case Ev::Return: on_return(ev.peer); break;
    }
  }

  void put(const std::string& line) {
    log_ += line;
    log_ += '\n';
  }

  // --- announces ----------------------------------------------------------

  void on_announce(PeerId pid, std::uint64_t gen) {
    Node& p = nodes_[pid];
    if (!p.online || gen != p.announce_gen) return;  // superseded chain
    do_announce(p);
    schedule_announce(p, now_ + announce_ms_);
  }

  void schedule_announce(Node& p, SimTime t) {
    if (t <= duration_ms_) push_event(t, Ev::Announce, p.id, p.announce_gen);
  }

  void do_announce(Node& p) {
    const bool congested =
        p.cls == PeerClass::Mobile &&
        p.planned_in * 1000 > cfg_.congestion_threshold_permille * p.bw.down;
    if (congested) ++congestion_flags_;

    AnnounceRequest req;
    req.peer = p.id;
    req.cls = p.cls;
    req.bw = p.bw;
    req.congested = congested;
    req.have_pieces = p.have.held_pieces();
    req.is_seeder = p.seeder();
    const AnnounceResponse resp = tracker_.handle_announce(req, now_, rng_);
    for (const auto& [v, cls] : resp.neighbors) meet(p.id, v);

    if (opts_.capture_event_log)
      put("a t=" + std::to_string(now_) + " p=" + std::to_string(p.id) +
          " n=" + std::to_string(resp.neighbors.size()) +
          " c=" + std::to_string(congested ? 1 : 0) +
          " s=" + std::to_string(req.is_seeder ? 1 : 0));
  }

  void meet(PeerId a, PeerId b) {
    if (a == b) return;
    if (nodes_[a].pairs[b].met_at >= 0) return;
    nodes_[a].pairs[b].met_at = now_;
    nodes_[b].pairs[a].met_at = now_;
    nodes_[a].met.push_back(b);
    nodes_[b].met.push_back(a);
    if (opts_.capture_event_log)
      put("m " + std::to_string(a) + " " + std::to_string(b));
  }

  // --- choke ticks and planning -------------------------------------------

  std::int64_t window_recv(const Node& u, PeerId v) const {
    std::int64_t s = 0;
    for (int i = 0; i < window_buckets_; ++i) s += u.pairs[v].recv[static_cast<std::size_t>(i)];
    return s;
  }
  std::int64_t window_sent(const Node& u, PeerId v) const {
    std::int64_t s = 0;
    for (int i = 0; i < window_buckets_; ++i) s += u.pairs[v].sent[static_cast<std::size_t>(i)];
    return s;
  }

  bool has_useful_piece(const Node& u, const Node& d) const {
    if (u.seeder()) return !d.have.complete();
    for (std::uint32_t p = 0; p < map_.num_pieces(); ++p)
      if (u.have.has_piece(p) && !d.have.has_piece(p)) return true;
    return false;
  }

  // Hybrid gate on mobile-facing seeding: dedicated-static role and the
  // minimum-uplink eligibility rule.
  bool allowed_dest(const Node& u, const Node& d) const {
    if (mode_ != Mode::Hybrid) return true;
    if (d.cls != PeerClass::Mobile) return true;
    if (!u.seeder()) return true;
    if (u.serve_static_only) return false;
    return eligible_for_mobile_seeding(u.bw.up, cfg_.min_seed_rate);
  }

  void on_choke_tick() {
    drop_audit();
    const bool redraw = now_ % optimistic_ms_ == 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      replan_peer(static_cast<PeerId>(i), redraw);
    rotate_windows();
    served_point();
    ++choke_tick_index_;
    if (!stop_ && now_ + choke_ms_ <= duration_ms_)
      push_event(now_ + choke_ms_, Ev::Choke, 0, 0);
  }

  void subtract_plan(Node& u) {
    for (const LiveAlloc& a : u.alloc) nodes_[a.dest].planned_in -= a.rate;
  }

  void clear_plan(Node& u) {
    subtract_plan(u);
    u.alloc.clear();
  }

  std::int64_t budget_of(PeerId up, PeerId dest) const {
    return tracker_.budget_for(up, dest).max_connections;
  }

  void replan_peer(PeerId uid, bool redraw_optimistic) {
    Node& u = nodes_[uid];
    clear_plan(u);
    if (!u.online) {
      u.optimistic.reset();
      return;
    }

    std::vector<ChokeCandidate> cands;
    for (PeerId v : u.met) {
      const Node& n = nodes_[v];
      if (!n.online || n.have.complete()) continue;
      if (n.pairs[uid].refuse_until > now_) continue;
      if (!allowed_dest(u, n)) continue;
      if (!has_useful_piece(u, n)) continue;
      const std::int64_t key =
          (u.seeder() || cfg_.rank_key == RankKey::ObservedUpload)
              ? window_sent(u, v)
              : window_recv(u, v);
      cands.push_back({v, n.cls, false, key});
    }

    const ChokeDecision decision = recompute_chokes(
        cands, static_cast<std::uint32_t>(cfg_.regular_slots), rng_);

    const auto is_regular = [&](PeerId v) {
      return std::find(decision.unchoked.begin(), decision.unchoked.end(), v) !=
             decision.unchoked.end();
    };
    if (redraw_optimistic) {
      std::vector<ChokeCandidate> pool;
      for (const ChokeCandidate& c : cands)
        if (!is_regular(c.id)) pool.push_back(c);
      u.optimistic = optimistic_unchoke(pool, mode_ == Mode::Hybrid, rng_);
    } else if (u.optimistic) {
      const PeerId o = *u.optimistic;
      const bool still_valid =
          !is_regular(o) && std::any_of(cands.begin(), cands.end(),
                                        [&](const ChokeCandidate& c) {
                                          return c.id == o;
                                        });
      if (!still_valid) u.optimistic.reset();
    }

    std::vector<PlanDest> dests;
    std::vector<std::pair<PeerId, std::int64_t>> mobile_budgets;
    const auto push_dest = [&](PeerId v, bool extra) {
      const Node& n = nodes_[v];
      const std::int64_t budget = budget_of(uid, v);
      if (n.cls == PeerClass::Mobile) mobile_budgets.emplace_back(v, budget);
      dests.push_back({v, n.cls, n.bw.down, n.bw.down - n.planned_in, budget,
                       extra});
    };
    for (PeerId v : decision.unchoked) push_dest(v, false);
    if (u.optimistic) push_dest(*u.optimistic, false);

    if (mode_ == Mode::Hybrid && u.seeder() && !u.serve_static_only &&
        eligible_for_mobile_seeding(u.bw.up, cfg_.min_seed_rate)) {
      struct ExtraCand {
        PeerId id;
        std::int64_t sent;
      };
      std::vector<ExtraCand> extras;
      for (const ChokeCandidate& c : cands) {
        if (c.cls != PeerClass::Mobile) continue;
        if (is_regular(c.id) || (u.optimistic && *u.optimistic == c.id)) continue;
        extras.push_back({c.id, window_sent(u, c.id)});
      }
      rng_.shuffle(extras);
      std::stable_sort(extras.begin(), extras.end(),
                       [](const ExtraCand& a, const ExtraCand& b) {
                         return a.sent > b.sent;
                       });
      if (cfg_.rotate_extra && !extras.empty())
        std::rotate(extras.begin(),
                    extras.begin() + static_cast<std::ptrdiff_t>(
                                         choke_tick_index_ % extras.size()),
                    extras.end());
      for (const ExtraCand& e : extras) push_dest(e.id, true);
    }

    const PlanParams params{static_cast<std::uint32_t>(cfg_.u_default),
                            static_cast<std::uint32_t>(cfg_.pipeline_depth),
                            cfg_.r_min_mobile};
    const UploadPlan plan = plan_uploads(mode_, u.bw.up, dests, params);
    if (plan.allocations.empty()) return;

    std::string line;
    if (opts_.capture_event_log)
      line = "p t=" + std::to_string(now_) + " u=" + std::to_string(uid);
    for (const PlanAllocation& a : plan.allocations) {
      u.alloc.push_back({a.id, a.connections, a.rate});
      nodes_[a.id].planned_in += a.rate;
      if (opts_.capture_event_log)
        line += " " + std::to_string(a.id) + ":" +
                std::to_string(a.connections) + ":" + std::to_string(a.rate);
    }
    if (opts_.capture_event_log) put(line);

    plans_.push_back({now_, uid, u.seeder(),
                      eligible_for_mobile_seeding(u.bw.up, cfg_.min_seed_rate),
                      u.bw.up, plan.allocations, std::move(mobile_budgets)});

    for (const LiveAlloc& a : u.alloc) pump(uid, a.dest);
  }

  void rotate_windows() {
    ring_ = (ring_ + 1) % window_buckets_;
    const std::size_t slot = static_cast<std::size_t>(ring_);
    for (Node& n : nodes_) {
      for (PairState& ps : n.pairs) {
        ps.recv[slot] = 0;
        ps.sent[slot] = 0;
        ps.lat_sum_ms[slot] = 0;
        ps.lat_cnt[slot] = 0;
      }
    }
  }

  // Hybrid receivers shed connections whose delivered blocks arrive too
  // slowly, unless that neighbor is the last source of something needed.
  // The close is graceful: blocks already in flight still complete.
  void drop_audit() {
    if (mode_ != Mode::Hybrid) return;

    std::vector<std::vector<PeerId>> servers(nodes_.size());
    for (const Node& s : nodes_)
      for (const LiveAlloc& a : s.alloc)
        if (a.rate > 0) servers[a.dest].push_back(s.id);

    for (Node& d : nodes_) {
      if (d.cls != PeerClass::Mobile || !d.online || d.have.complete()) continue;
      std::vector<SlowCandidate> cands;
      for (PeerId sid : servers[d.id]) {
        std::int64_t sum = 0, cnt = 0;
        for (int i = 0; i < window_buckets_; ++i) {
          sum += d.pairs[sid].lat_sum_ms[static_cast<std::size_t>(i)];
          cnt += d.pairs[sid].lat_cnt[static_cast<std::size_t>(i)];
        }
        if (cnt == 0) continue;
        const double mean_s = static_cast<double>(sum) /
                              static_cast<double>(cnt) /
                              static_cast<double>(kMillisPerSecond);
        cands.push_back({sid, mean_s, is_only_source(sid, d)});
      }
      for (PeerId sid : drop_slow_connections(cands, cfg_.latency_threshold_s)) {
        d.pairs[sid].refuse_until =
            now_ + 2 * cfg_.rate_window_s * kMillisPerSecond;
        Node& s = nodes_[sid];
        for (auto it = s.alloc.begin(); it != s.alloc.end(); ++it) {
          if (it->dest != d.id) continue;
          nodes_[d.id].planned_in -= it->rate;
          s.alloc.erase(it);
          break;
        }
        double mean_s = 0.0;
        for (const SlowCandidate& c : cands)
          if (c.peer == sid) mean_s = c.mean_latency_s;
        drops_.push_back({now_, d.id, sid, mean_s});
        if (opts_.capture_event_log)
          put("dr t=" + std::to_string(now_) + " d=" + std::to_string(d.id) +
              " s=" + std::to_string(sid));
      }
    }
  }

  bool is_only_source(PeerId sid, const Node& d) const {
    const Node& s = nodes_[sid];
    for (std::uint32_t p = 0; p < map_.num_pieces(); ++p) {
      if (!s.have.has_piece(p) || d.have.has_piece(p)) continue;
      bool elsewhere = false;
      for (PeerId w : d.met) {
        if (w == sid || !nodes_[w].online) continue;
        if (nodes_[w].have.has_piece(p)) {
          elsewhere = true;
          break;
        }
      }
      if (!elsewhere) return true;
    }
    return false;
  }

  // --- transfers -----------------------------------------------------------

  const LiveAlloc* find_alloc(const Node& s, PeerId dest) const {
    for (const LiveAlloc& a : s.alloc)
      if (a.dest == dest) return &a;
    return nullptr;
  }

  std::vector<const Bitfield*> neighbor_fields(const Node& d) const {
    std::vector<const Bitfield*> out;
    out.reserve(d.met.size());
    for (PeerId v : d.met)
      if (nodes_[v].online) out.push_back(&nodes_[v].have);
    return out;
  }

  void pump(PeerId sid, PeerId did) {
    Node& s = nodes_[sid];
    Node& d = nodes_[did];
    if (!s.online || !d.online || d.have.complete()) return;
    const LiveAlloc* a = find_alloc(s, did);
    if (!a || a->rate <= 0) return;
    const Rate lane_rate = a->rate / a->conns;
    if (lane_rate <= 0) return;

    const auto key = std::make_pair(sid, did);
    while (live_count_[key] < a->conns) {
      // Hybrid congestion backoff: a mobile receiver defers new blocks while
      // its intake is fully committed. Issuing anyway would lock the block at
      // the floor rate and stall the lane; deliveries re-pump the idle lanes.
      if (mode_ == Mode::Hybrid && d.cls == PeerClass::Mobile &&
          d.inflight_in >= d.bw.down)
        break;
      const auto fields = neighbor_fields(d);
      const auto b = select_next_block(
          d.have, d.requested, s.have,
          std::span<const Bitfield* const>(fields.data(), fields.size()), rng_);
      if (!b) break;
      d.requested.mark(*b);
      start_flight(s, d, *b, lane_rate);
    }
    if (live_count_[key] == 0) live_count_.erase(key);
  }

  void start_flight(Node& s, Node& d, BlockId b, Rate lane_rate) {
    const SimTime met_at = d.pairs[s.id].met_at;
    const std::int64_t warm =
        warmup_permille(met_at, now_, trial_ms_, cfg_.warmup_min_permille);
    const Rate nominal =
        std::max(lane_rate * warm / 1000, cfg_.min_transfer_rate);
    const Rate remaining = d.bw.down - d.inflight_in;
    const Rate r_eff =
        std::min(nominal, std::max(remaining, cfg_.min_transfer_rate));
    const std::int64_t bytes = map_.block_len(b);
    const std::int64_t base = (s.cls == PeerClass::Mobile ||
                               d.cls == PeerClass::Mobile)
                                  ? cfg_.latency_mobile_ms
                                  : cfg_.latency_static_ms;
    const SimTime dt = transfer_time_ms(bytes, r_eff, base);

    const std::uint64_t fid = next_flight_++;
    flights_.emplace(fid, Flight{fid, s.id, d.id, b, bytes, now_, now_ + dt,
                                 r_eff, base});
    ++live_count_[std::make_pair(s.id, d.id)];
    d.inflight_in += r_eff;
    ++requested_;
    push_event(now_ + dt, Ev::Deliver, 0, fid);

    if (opts_.capture_event_log)
      put("q t=" + std::to_string(now_) + " s=" + std::to_string(s.id) +
          " d=" + std::to_string(d.id) + " p=" + std::to_string(b.piece) +
          " b=" + std::to_string(b.block) + " r=" + std::to_string(r_eff));
  }

  void on_deliver(std::uint64_t fid) {
    const auto it = flights_.find(fid);
    if (it == flights_.end()) return;  // torn down before arrival
    const Flight f = it->second;
    flights_.erase(it);

    Node& s = nodes_[f.src];
    Node& d = nodes_[f.dest];
    if (!s.online || !d.online)
      throw SimError("deliver: endpoint offline with live flight");

    d.inflight_in -= f.r_eff;
    dec_live(f.src, f.dest);

    ++delivered_;
    transfers_.push_back({f.requested_at, now_, TransferOutcome::Delivered,
                          f.src, f.dest, d.cls, f.bytes, f.r_eff, f.base_ms});

    const std::size_t slot = static_cast<std::size_t>(ring_);
    d.pairs[f.src].recv[slot] += f.bytes;
    d.pairs[f.src].lat_sum_ms[slot] += now_ - f.requested_at;
    d.pairs[f.src].lat_cnt[slot] += 1;
    s.pairs[f.dest].sent[slot] += f.bytes;

    const Bitfield::SetResult res = d.have.set_block(f.block);

    if (opts_.capture_event_log)
      put("v t=" + std::to_string(now_) + " s=" + std::to_string(f.src) +
          " d=" + std::to_string(f.dest) + " p=" + std::to_string(f.block.piece) +
          " b=" + std::to_string(f.block.block));

    if (res.piece_completed) {
      if (opts_.capture_event_log)
        put("pc p=" + std::to_string(f.dest) +
            " i=" + std::to_string(f.block.piece));
      // the receiver can now offer this piece on its own upload lanes
      for (const LiveAlloc& a : d.alloc) pump(d.id, a.dest);
    }

    if (res.file_completed) {
      complete_peer(d);
    } else if (mode_ == Mode::Hybrid && d.cls == PeerClass::Mobile) {
      // Freed intake may unblock lanes that deferred under backoff.
      for (const Node& s2 : nodes_)
        if (s2.online && find_alloc(s2, f.dest)) pump(s2.id, f.dest);
    } else {
      pump(f.src, f.dest);
    }
  }

  void dec_live(PeerId sid, PeerId did) {
    const auto key = std::make_pair(sid, did);
    const auto it = live_count_.find(key);
    if (it == live_count_.end() || it->second <= 0)
      throw SimError("flight accounting underflow");
    if (--it->second == 0) live_count_.erase(it);
  }

  void complete_peer(Node& d) {
    d.completed_at = now_;
    last_completion_ = now_;
    --incomplete_;
    d.serve_static_only = false;
    if (opts_.capture_event_log)
      put("cp t=" + std::to_string(now_) + " p=" + std::to_string(d.id));
    ++d.announce_gen;
    do_announce(d);
    schedule_announce(d, now_ + announce_ms_);
    if (incomplete_ == 0) stop_ = true;
  }

  // --- churn ---------------------------------------------------------------

  void on_leave(PeerId pid) {
    Node& p = nodes_[pid];
    if (!p.online) return;
    p.online = false;
    ++p.announce_gen;
    tracker_.set_online(pid, false);
    if (opts_.capture_event_log)
      put("l t=" + std::to_string(now_) + " p=" + std::to_string(pid));

    std::vector<std::uint64_t> gone;
    for (const auto& [fid, f] : flights_)
      if (f.src == pid || f.dest == pid) gone.push_back(fid);
    std::vector<PeerId> touched;
    for (std::uint64_t fid : gone) {
      const Flight f = flights_.at(fid);
      cancel_flight(fid);
      if (f.dest != pid) touched.push_back(f.dest);
    }
    clear_plan(p);
    p.optimistic.reset();

    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (PeerId did : touched)
      for (const Node& s : nodes_)
        if (s.online && find_alloc(s, did)) pump(s.id, did);

    const SimTime back =
        now_ + rng_churn_.exponential_ms(cfg_.mean_offline_s * kMillisPerSecond);
    if (back <= duration_ms_) push_event(back, Ev::Return, pid, 0);
  }

  void cancel_flight(std::uint64_t fid) {
    const auto it = flights_.find(fid);
    const Flight f = it->second;
    nodes_[f.dest].inflight_in -= f.r_eff;
    dec_live(f.src, f.dest);
    nodes_[f.dest].requested.unmark(f.block);
    transfers_.push_back({f.requested_at, now_, TransferOutcome::Cancelled,
                          f.src, f.dest, nodes_[f.dest].cls, f.bytes, f.r_eff,
                          f.base_ms});
    ++cancelled_;
    if (opts_.capture_event_log)
      put("x t=" + std::to_string(now_) + " s=" + std::to_string(f.src) +
          " d=" + std::to_string(f.dest) + " p=" + std::to_string(f.block.piece) +
          " b=" + std::to_string(f.block.block));
    flights_.erase(it);
  }

  void on_return(PeerId pid) {
    Node& p = nodes_[pid];
    if (p.online) return;
    p.online = true;
    tracker_.set_online(pid, true);
    if (opts_.capture_event_log)
      put("rt t=" + std::to_string(now_) + " p=" + std::to_string(pid));
    ++p.announce_gen;
    do_announce(p);
    schedule_announce(p, now_ + announce_ms_);

    const SimTime away =
        now_ + rng_churn_.exponential_ms(cfg_.mean_online_s * kMillisPerSecond);
    if (away <= duration_ms_) push_event(away, Ev::Leave, pid, 0);
  }

  // --- measurement ---------------------------------------------------------

  std::int64_t served_count() const {
    std::vector<char> served(nodes_.size(), 0);
    for (const Node& s : nodes_) {
      if (!s.seeder() || !s.online) continue;
      for (const LiveAlloc& a : s.alloc) {
        const Node& d = nodes_[a.dest];
        if (a.rate > 0 && d.cls == PeerClass::Mobile && d.online)
          served[a.dest] = 1;
      }
    }
    std::int64_t n = 0;
    for (char c : served) n += c;
    return n;
  }

  std::int64_t bound_slots() const {
    std::int64_t slots = 0;
    for (const Node& s : nodes_)
      if (s.seeder() && s.online &&
          eligible_for_mobile_seeding(s.bw.up, cfg_.min_seed_rate))
        slots += s.bw.up / cfg_.r_min_mobile;
    return slots;
  }

  void served_point() {
    const std::int64_t s = served_count();
    served_.push_back({now_, s, bound_slots(), num_mobile_});
    peak_mobile_served_ = std::max(peak_mobile_served_, s);
  }

  void on_sample() {
    const std::int64_t served = served_count();
    peak_mobile_served_ = std::max(peak_mobile_served_, served);

    Rate planned_total = 0;
    for (const Node& n : nodes_)
      for (const LiveAlloc& a : n.alloc) planned_total += a.rate;

    TimePoint tp;
    tp.t_s = static_cast<double>(now_) / 1000.0;
    tp.cumulative_blocks = delivered_;
    tp.throughput_blocks_per_s =
        static_cast<double>(delivered_ - last_sample_delivered_) /
        static_cast<double>(cfg_.sample_interval_s);
    tp.sdr = successful_delivery_ratio(delivered_, requested_);
    tp.mobile_served_fraction =
        num_mobile_ > 0
            ? static_cast<double>(served) / static_cast<double>(num_mobile_)
            : 0.0;
    tp.allocated_up_kBps = static_cast<double>(planned_total) / 1024.0;
    timeseries_.push_back(tp);
    last_sample_delivered_ = delivered_;

    if (opts_.capture_event_log)
      put("smp t=" + std::to_string(now_) + " cum=" + std::to_string(delivered_) +
          " req=" + std::to_string(requested_));

    if (!stop_ && now_ + sample_ms_ <= duration_ms_)
      push_event(now_ + sample_ms_, Ev::Sample, 0, 0);
  }

  RunResult finish() {
    if (timeseries_.empty() ||
        timeseries_.back().t_s < static_cast<double>(now_) / 1000.0) {
      on_sample_final();
    }

    RunResult r;
    r.summary.mode = mode_;
    r.summary.seed = seed_;
    r.summary.completion_time_s =
        incomplete_ == 0 ? static_cast<double>(last_completion_) / 1000.0 : -1.0;
    r.summary.mean_latency_s = mean_block_latency_s(transfers_, std::nullopt);
    r.summary.mean_latency_mobile_s =
        mean_block_latency_s(transfers_, PeerClass::Mobile);
    r.summary.mean_latency_static_s =
        mean_block_latency_s(transfers_, PeerClass::Static);
    const double window = r.summary.completion_time_s > 0
                              ? r.summary.completion_time_s
                              : static_cast<double>(cfg_.duration_s);
    r.summary.c_avg = capacity_avg(delivered_, window);
    r.summary.sdr = successful_delivery_ratio(delivered_, requested_);
    r.summary.peak_mobile_served = peak_mobile_served_;

    r.timeseries = std::move(timeseries_);
    r.transfers = std::move(transfers_);
    r.plans = std::move(plans_);
    r.drops = std::move(drops_);
    r.served = std::move(served_);
    r.event_log = std::move(log_);
    r.requested_blocks = requested_;
    r.delivered_blocks = delivered_;
    r.cancelled_blocks = cancelled_;
    r.congestion_flags = congestion_flags_;
    r.max_mobile_fraction_pct = max_mobile_pct_;
    return r;
  }

  // Closing sample so the series ends exactly at the stop instant.
  void on_sample_final() {
    const std::int64_t served = served_count();
    peak_mobile_served_ = std::max(peak_mobile_served_, served);
    TimePoint tp;
    tp.t_s = static_cast<double>(now_) / 1000.0;
    tp.cumulative_blocks = delivered_;
    tp.throughput_blocks_per_s = 0.0;
    tp.sdr = successful_delivery_ratio(delivered_, requested_);
    tp.mobile_served_fraction =
        num_mobile_ > 0
            ? static_cast<double>(served) / static_cast<double>(num_mobile_)
            : 0.0;
    Rate planned_total = 0;
    for (const Node& n : nodes_)
      for (const LiveAlloc& a : n.alloc) planned_total += a.rate;
    tp.allocated_up_kBps = static_cast<double>(planned_total) / 1024.0;
    timeseries_.push_back(tp);
  }

  // --- members -------------------------------------------------------------

  ScenarioConfig cfg_;
  Mode mode_;
  std::uint64_t seed_;
  RunOptions opts_;

  Rng rng_build_;
  Rng rng_;
  Rng rng_churn_;

  FileMap map_;
  Tracker tracker_;
  std::vector<Node> nodes_;
  std::map<std::uint64_t, Flight> flights_;
  std::map<std::pair<PeerId, PeerId>, std::int64_t> live_count_;

  std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;
  std::uint64_t seq_ = 0;
  std::uint64_t next_flight_ = 1;
  SimTime now_ = 0;
  bool stop_ = false;

  SimTime duration_ms_ = 0, choke_ms_ = 0, optimistic_ms_ = 0, announce_ms_ = 0,
          sample_ms_ = 0, trial_ms_ = 0;
  int window_buckets_ = 2;
  int ring_ = 0;
  std::uint64_t choke_tick_index_ = 0;

  std::int64_t num_mobile_ = 0;
  std::int64_t incomplete_ = 0;
  SimTime last_completion_ = -1;

  std::vector<BlockTransferRecord> transfers_;
  std::vector<PlanRecord> plans_;
  std::vector<DropRecord> drops_;
  std::vector<ServedPoint> served_;
  std::vector<TimePoint> timeseries_;
  std::string log_;

  std::int64_t requested_ = 0;
  std::int64_t delivered_ = 0;
  std::int64_t cancelled_ = 0;
  std::int64_t congestion_flags_ = 0;
  std::int64_t last_sample_delivered_ = 0;
  std::int64_t peak_mobile_served_ = 0;
  double max_mobile_pct_ = 100.0;
};

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg, Mode mode, std::uint64_t seed,
                       const RunOptions& options) {
  cfg.validate();
  World world(cfg, mode, seed, options);
  return world.run();
}

}  // namespace mobiswarm
