#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "coex/csma_model.hpp"
#include "coex/integrator.hpp"
#include "coex/topology.hpp"

namespace coex {

struct SimConfig {
    std::uint64_t seed = 1;
    double sim_time_s = 50.0;
    MacParameters mac;
    LteParams lte;
    int warmup_frames = 5;
    double state_grid_step_s = 0.0;  // > 0 records per-frame LTE-U phase frequencies
    bool record_trace = false;

    void validate() const;
};

enum class TraceKind { TxStart, TxEnd, Collision, LtuOn, LtuOff, Drop };

const char* to_string(TraceKind kind);

struct TraceEvent {
    std::int64_t t_ns = 0;
    std::size_t node = 0;  // topology index
    TraceKind kind = TraceKind::TxStart;
};

struct SimNodeResult {
    std::string id;
    NodeKind kind = NodeKind::WiFi;
    double throughput_mbps = 0.0;
    double air_time = 0.0;
    std::uint64_t attempts = 0;
    std::uint64_t successes = 0;
    std::uint64_t collisions = 0;   // Wi-Fi/Wi-Fi
    std::uint64_t ltu_losses = 0;   // corrupted by an LTE-U ON edge
    std::uint64_t drops = 0;
    std::uint64_t truncated_frames = 0;  // LTE-U: ON time cut by the frame end
};

struct SimResult {
    std::uint64_t seed = 0;
    std::vector<SimNodeResult> nodes;  // topology order
    std::uint64_t wifi_collisions = 0;
    std::uint64_t overlap_losses = 0;
    std::uint64_t frames_simulated = 0;
    double measured_s = 0.0;

    // Phase frequencies per LTE-U node (topology order of LTE-U nodes), per
    // grid offset: counts of (pending, transmitting, done) over observed frames.
    std::vector<std::string> ltu_ids;
    std::vector<double> grid_us;
    std::vector<std::vector<std::array<std::uint64_t, 3>>> phase_counts;
    std::uint64_t frames_observed = 0;

    std::vector<TraceEvent> trace;

    double system_throughput() const;
    const SimNodeResult& node(const std::string& id) const;
};

/// Slot-accurate discrete-event run of CSMA/CA Wi-Fi and coordinated
/// duty-cycled LTE-U on one channel. Deterministic for a given seed.
SimResult simulate(const Topology& topo, const SimConfig& config);

/// t_us,node_id,event
void write_trace_csv(std::ostream& os, const Topology& topo, const SimResult& result);
/// node_id,kind,thr_mbps,air_time,attempts,successes,collisions,ltu_losses,drops
void write_sim_csv(std::ostream& os, const SimResult& result);

}  // namespace coex
