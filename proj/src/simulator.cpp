#include "coex/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>

#include "coex/errors.hpp"

namespace coex {

namespace {

using Ns = std::int64_t;
constexpr Ns kNever = std::numeric_limits<Ns>::max();

Ns to_ns(double us)
{
    return static_cast<Ns>(std::llround(us * 1000.0));
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

// Uniform integer in [0, n) by rejection; identical across standard libraries.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n)
{
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

enum class WifiPhase { Waiting, Difs, Countdown, Transmitting };

struct WifiNode {
    std::size_t topo = 0;
    std::vector<std::size_t> cst_peers;  // Wi-Fi locals
    std::mt19937_64 rng;
    WifiPhase phase = WifiPhase::Waiting;
    int sense = 0;  // busy sources currently heard
    int backoff = 0;
    int cw = 0;
    int retry = 0;
    Ns next = kNever;  // pending DIFS end, transmission start or end
    Ns countdown_start = 0;
    Ns tx_start = 0;
    bool collided = false;
    bool corrupted = false;
    std::uint64_t success_bits = 0;
    Ns air_ns = 0;
    SimNodeResult stats;
};

struct LtuNode {
    std::size_t topo = 0;
    std::vector<std::size_t> ltu_peers;   // LTE-U locals
    std::vector<std::size_t> wifi_peers;  // Wi-Fi locals
    Ns allotment = 0;
    bool on = false;
    bool done = false;
    Ns on_since = 0;
    Ns off_at = kNever;
    Ns frame_on = -1;   // frame-relative ON interval of the current frame
    Ns frame_off = -1;
    Ns on_ns = 0;       // inside the measurement window
    SimNodeResult stats;
};

class Engine {
public:
    Engine(const Topology& topo, const SimConfig& cfg) : topo_(topo), cfg_(cfg)
    {
        const auto graphs = build_graphs(topo.nodes, topo.channel);
        timing_ = frame_timing(cfg.mac);
        slot_ = to_ns(cfg.mac.slot_us);
        difs_ = to_ns(cfg.mac.difs_us);
        success_busy_ = to_ns(timing_.data_us + cfg.mac.sifs_us + timing_.ack_us);
        collision_busy_ = to_ns(timing_.data_us);
        frame_ = to_ns(cfg.lte.t_frame_s * 1e6);
        end_ = to_ns(cfg.sim_time_s * 1e6);
        warm_ = std::min(end_, frame_ * cfg.warmup_frames);

        std::vector<std::size_t> local(topo.nodes.size(), 0);
        for (std::size_t k = 0; k < graphs.wifi_nodes.size(); ++k) local[graphs.wifi_nodes[k]] = k;
        for (std::size_t k = 0; k < graphs.ltu_nodes.size(); ++k) local[graphs.ltu_nodes[k]] = k;

        for (auto v : graphs.wifi_nodes) {
            WifiNode w;
            w.topo = v;
            for (auto u : graphs.cst.neighbors(v)) w.cst_peers.push_back(local[u]);
            w.rng = make_stream(cfg.seed, v + 1);
            w.cw = cfg.mac.cw_min;
            w.backoff = static_cast<int>(uniform_below(w.rng, static_cast<std::uint64_t>(w.cw)));
            wifi_.push_back(std::move(w));
        }
        for (auto v : graphs.ltu_nodes) {
            LtuNode l;
            l.topo = v;
            for (auto u : graphs.edt.neighbors(v)) {
                (graphs.kinds[u] == NodeKind::LteU ? l.ltu_peers : l.wifi_peers).push_back(local[u]);
            }
            l.allotment = static_cast<Ns>(std::llround(duty_cycle(v, graphs) * static_cast<double>(frame_)));
            ltu_.push_back(std::move(l));
        }
        ltu_rng_ = make_stream(cfg.seed, 0);

        if (cfg.state_grid_step_s > 0.0) {
            const Ns step = to_ns(cfg.state_grid_step_s * 1e6);
            for (Ns g = 0; g < frame_; g += step) grid_.push_back(g);
        }
        counts_.assign(ltu_.size(), std::vector<std::array<std::uint64_t, 3>>(grid_.size(), {0, 0, 0}));
    }

    SimResult run()
    {
        Ns next_frame = 0;
        Ns frame_start = 0;
        std::uint64_t frames = 0;
        for (;;) {
            Ns t = next_frame;
            for (const auto& w : wifi_) t = std::min(t, w.next);
            for (const auto& l : ltu_) t = std::min(t, l.off_at);
            if (t >= end_) break;

            for (std::size_t k = 0; k < ltu_.size(); ++k) {
                if (ltu_[k].off_at == t) ltu_off(k, t);
            }
            for (std::size_t k = 0; k < wifi_.size(); ++k) {
                if (wifi_[k].phase == WifiPhase::Transmitting && wifi_[k].next == t) tx_end(k, t);
            }
            reevaluate(t);

            if (t == next_frame) {
                if (frames > 0) observe_frame(frame_start);
                frame_start = t;
                next_frame = t + frame_;
                ++frames;
                for (auto& l : ltu_) {
                    l.done = false;
                    l.frame_on = -1;
                    l.frame_off = -1;
                }
            }
            start_ltu(t, frame_start);
            reevaluate(t);

            for (auto& w : wifi_) {
                if (w.phase == WifiPhase::Difs && w.next == t) {
                    w.phase = WifiPhase::Countdown;
                    w.countdown_start = t;
                    w.next = t + static_cast<Ns>(w.backoff) * slot_;
                }
            }
            start_transmissions(t);
            reevaluate(t);
        }
        if (frames > 0 && frame_start + frame_ <= end_) observe_frame(frame_start);

        for (auto& l : ltu_) {
            if (l.on) l.on_ns += overlap(l.on_since, end_);
        }
        return collect(frames);
    }

private:
    Ns overlap(Ns a, Ns b) const
    {
        return std::max<Ns>(0, std::min(b, end_) - std::max(a, warm_));
    }

    void trace(Ns t, std::size_t topo, TraceKind kind)
    {
        if (cfg_.record_trace) trace_.push_back({t, topo, kind});
    }

    void reevaluate(Ns t)
    {
        for (auto& w : wifi_) {
            if ((w.phase == WifiPhase::Difs || w.phase == WifiPhase::Countdown) && w.sense > 0) {
                if (w.phase == WifiPhase::Countdown) {
                    const auto elapsed = static_cast<int>((t - w.countdown_start) / slot_);
                    w.backoff = std::max(0, w.backoff - elapsed);
                }
                w.phase = WifiPhase::Waiting;
                w.next = kNever;
            } else if (w.phase == WifiPhase::Waiting && w.sense == 0) {
                w.phase = WifiPhase::Difs;
                w.next = t + difs_;
            }
        }
    }

    void start_ltu(Ns t, Ns frame_start)
    {
        for (;;) {
            std::vector<std::size_t> eligible;
            for (std::size_t k = 0; k < ltu_.size(); ++k) {
                const auto& l = ltu_[k];
                if (l.on || l.done) continue;
                const bool blocked = std::any_of(l.ltu_peers.begin(), l.ltu_peers.end(),
                                                 [&](std::size_t m) { return ltu_[m].on; });
                if (!blocked) eligible.push_back(k);
            }
            if (eligible.empty()) return;
            const auto pick = eligible[uniform_below(ltu_rng_, eligible.size())];
            auto& l = ltu_[pick];
            l.on = true;
            l.on_since = t;
            l.off_at = std::min(t + l.allotment, frame_start + frame_);
            l.frame_on = t - frame_start;
            if (l.off_at < t + l.allotment && t >= warm_) ++l.stats.truncated_frames;
            trace(t, l.topo, TraceKind::LtuOn);
            for (auto w : l.wifi_peers) {
                ++wifi_[w].sense;
                if (wifi_[w].phase == WifiPhase::Transmitting) wifi_[w].corrupted = true;
            }
        }
    }

    void ltu_off(std::size_t k, Ns t)
    {
        auto& l = ltu_[k];
        l.on = false;
        l.done = true;
        l.off_at = kNever;
        l.frame_off = l.frame_on + (t - l.on_since);
        l.on_ns += overlap(l.on_since, t);
        trace(t, l.topo, TraceKind::LtuOff);
        for (auto w : l.wifi_peers) --wifi_[w].sense;
    }

    void start_transmissions(Ns t)
    {
        std::vector<std::size_t> batch;
        for (std::size_t k = 0; k < wifi_.size(); ++k) {
            if (wifi_[k].phase == WifiPhase::Countdown && wifi_[k].next == t) batch.push_back(k);
        }
        for (auto k : batch) {
            auto& w = wifi_[k];
            w.phase = WifiPhase::Transmitting;
            w.tx_start = t;
            w.corrupted = false;
            w.collided = false;
        }
        // Contenders in carrier-sense range that fire in the same slot collide.
        for (auto k : batch) {
            auto& w = wifi_[k];
            for (auto peer : w.cst_peers) {
                if (wifi_[peer].phase == WifiPhase::Transmitting && wifi_[peer].tx_start == t) {
                    w.collided = true;
                    break;
                }
            }
            const Ns busy = w.collided ? collision_busy_ : success_busy_;
            w.next = t + busy;
            if (t >= warm_) {
                ++w.stats.attempts;
                w.air_ns += busy + difs_;
            }
            trace(t, w.topo, TraceKind::TxStart);
            for (auto peer : w.cst_peers) ++wifi_[peer].sense;
        }
    }

    void tx_end(std::size_t k, Ns t)
    {
        auto& w = wifi_[k];
        for (auto peer : w.cst_peers) --wifi_[peer].sense;
        const bool counted = w.tx_start >= warm_;
        trace(t, w.topo, TraceKind::TxEnd);
        if (!w.collided && !w.corrupted) {
            if (counted) {
                ++w.stats.successes;
                w.success_bits += static_cast<std::uint64_t>(std::llround(cfg_.mac.exchange_payload_bits()));
            }
            w.cw = cfg_.mac.cw_min;
            w.retry = 0;
        } else {
            if (counted) {
                if (w.collided) {
                    ++w.stats.collisions;
                } else {
                    ++w.stats.ltu_losses;
                }
            }
            trace(t, w.topo, TraceKind::Collision);
            if (++w.retry > cfg_.mac.max_retry) {
                if (counted) ++w.stats.drops;
                trace(t, w.topo, TraceKind::Drop);
                w.retry = 0;
                w.cw = cfg_.mac.cw_min;
            } else {
                w.cw = std::min(2 * w.cw, cfg_.mac.cw_max);
            }
        }
        w.backoff = static_cast<int>(uniform_below(w.rng, static_cast<std::uint64_t>(w.cw)));
        w.phase = WifiPhase::Waiting;
        w.next = kNever;
    }

    void observe_frame(Ns frame_start)
    {
        if (grid_.empty() || frame_start < warm_) return;
        for (std::size_t k = 0; k < ltu_.size(); ++k) {
            const auto& l = ltu_[k];
            for (std::size_t g = 0; g < grid_.size(); ++g) {
                std::size_t phase = 0;
                if (l.frame_on >= 0 && grid_[g] >= l.frame_on) {
                    phase = (l.frame_off < 0 || grid_[g] < l.frame_off) ? 1 : 2;
                }
                ++counts_[k][g][phase];
            }
        }
        ++observed_;
    }

    SimResult collect(std::uint64_t frames)
    {
        SimResult r;
        r.seed = cfg_.seed;
        r.frames_simulated = frames;
        r.measured_s = static_cast<double>(end_ - warm_) * 1e-9;
        const double window_us = static_cast<double>(end_ - warm_) * 1e-3;
        r.nodes.resize(topo_.nodes.size());
        for (auto& w : wifi_) {
            SimNodeResult s = w.stats;
            s.throughput_mbps = window_us > 0 ? static_cast<double>(w.success_bits) / window_us : 0.0;
            s.air_time = window_us > 0 ? std::min(1.0, static_cast<double>(w.air_ns) * 1e-3 / window_us) : 0.0;
            r.wifi_collisions += s.collisions;
            r.overlap_losses += s.ltu_losses;
            r.nodes[w.topo] = s;
        }
        for (auto& l : ltu_) {
            SimNodeResult s = l.stats;
            const double frac = window_us > 0 ? static_cast<double>(l.on_ns) * 1e-3 / window_us : 0.0;
            s.air_time = frac;
            s.throughput_mbps = frac * cfg_.lte.rate_mbps;
            r.nodes[l.topo] = s;
            r.ltu_ids.push_back(topo_.nodes[l.topo].id);
        }
        for (std::size_t i = 0; i < topo_.nodes.size(); ++i) {
            r.nodes[i].id = topo_.nodes[i].id;
            r.nodes[i].kind = topo_.nodes[i].kind;
        }
        for (auto g : grid_) r.grid_us.push_back(static_cast<double>(g) * 1e-3);
        r.phase_counts = counts_;
        r.frames_observed = observed_;
        r.trace = std::move(trace_);
        return r;
    }

    const Topology& topo_;
    const SimConfig& cfg_;
    FrameTiming timing_;
    Ns slot_ = 0, difs_ = 0, success_busy_ = 0, collision_busy_ = 0;
    Ns frame_ = 0, end_ = 0, warm_ = 0;
    std::vector<WifiNode> wifi_;
    std::vector<LtuNode> ltu_;
    std::mt19937_64 ltu_rng_;
    std::vector<Ns> grid_;
    std::vector<std::vector<std::array<std::uint64_t, 3>>> counts_;
    std::uint64_t observed_ = 0;
    std::vector<TraceEvent> trace_;
};

}  // namespace

void SimConfig::validate() const
{
    mac.validate();
    lte.validate();
    if (!(sim_time_s > 0.0) || !std::isfinite(sim_time_s)) throw ValidationError("sim_time must be positive");
    if (sim_time_s < 10.0 * lte.t_frame_s - 1e-12)
        throw ValidationError("sim_time must cover at least 10 frames");
    if (warmup_frames < 0) throw ValidationError("warmup_frames must be non-negative");
    if (state_grid_step_s < 0.0) throw ValidationError("state grid step must be non-negative");
}

const char* to_string(TraceKind kind)
{
    switch (kind) {
    case TraceKind::TxStart: return "tx_start";
    case TraceKind::TxEnd: return "tx_end";
    case TraceKind::Collision: return "collision";
    case TraceKind::LtuOn: return "ltu_on";
    case TraceKind::LtuOff: return "ltu_off";
    case TraceKind::Drop: return "drop";
    }
    return "?";
}

double SimResult::system_throughput() const
{
    double sum = 0.0;
    for (const auto& n : nodes) sum += n.throughput_mbps;
    return sum;
}

const SimNodeResult& SimResult::node(const std::string& id) const
{
    for (const auto& n : nodes) {
        if (n.id == id) return n;
    }
    throw UsageError("simulation result has no node '" + id + "'");
}

SimResult simulate(const Topology& topo, const SimConfig& config)
{
    config.validate();
    Engine engine(topo, config);
    return engine.run();
}

void write_trace_csv(std::ostream& os, const Topology& topo, const SimResult& result)
{
    const auto old = os.flags();
    os << "t_us,node_id,event\n" << std::fixed << std::setprecision(3);
    for (const auto& e : result.trace) {
        os << static_cast<double>(e.t_ns) * 1e-3 << ',' << topo.nodes[e.node].id << ','
           << to_string(e.kind) << '\n';
    }
    os.flags(old);
}

void write_sim_csv(std::ostream& os, const SimResult& result)
{
    const auto old = os.flags();
    os << "node_id,kind,thr_mbps,air_time,attempts,successes,collisions,ltu_losses,drops\n"
       << std::fixed << std::setprecision(6);
    for (const auto& n : result.nodes) {
        os << n.id << ',' << to_string(n.kind) << ',' << n.throughput_mbps << ',' << n.air_time
           << ',' << n.attempts << ',' << n.successes << ',' << n.collisions << ','
           << n.ltu_losses << ',' << n.drops << '\n';
    }
    os.flags(old);
}

}  // namespace coex
