#pragma once

#include <cstddef>
#include <map>
#include <vector>

#include "coex/graph.hpp"
#include "coex/state_engine.hpp"
#include "coex/topology.hpp"

namespace coex {

/// 802.11 DCF parameters. Defaults reproduce the reference deployment
/// (OFDM, 130 Mbps data, 6.5 Mbps headers, 4-frame aggregation).
struct MacParameters {
    int cw_min = 16;  // slots
    int cw_max = 1024;
    double slot_us = 9.0;
    double difs_us = 34.0;
    double sifs_us = 16.0;
    double phy_header_bits = 128.0;
    double mac_header_bits = 272.0;
    double ack_bits = 240.0;
    double payload_bits = 8148.0;
    int max_pdu = 4;
    double phy_rate_mbps = 130.0;
    double ack_rate_mbps = 26.0;
    double header_rate_mbps = 6.5;
    int max_retry = 6;

    void validate() const;

    /// Backoff stages between cw_min and cw_max (log2 of their ratio).
    int backoff_stages() const;
    /// E[P]: payload bits carried by one successful exchange.
    double exchange_payload_bits() const { return max_pdu * payload_bits; }
};

/// Channel occupancy of one exchange, microseconds.
struct FrameTiming {
    double data_us = 0.0;       // PHY+MAC headers and aggregated payload
    double ack_us = 0.0;        // PHY header + ACK body
    double success_us = 0.0;    // T_s: data + SIFS + ACK + DIFS
    double collision_us = 0.0;  // T_c: data + DIFS
};

FrameTiming frame_timing(const MacParameters& mac);

/// Set of Wi-Fi topology indices allowed to contend.
using ActiveSet = std::vector<std::size_t>;

/// Per-node normalised throughput, keyed by topology index.
using NormalizedVector = std::map<std::size_t, double>;

/// Independent state: Wi-Fi topology indices transmitting together.
using IndependentState = std::vector<std::size_t>;

/// 0 when an LTE-U EDT neighbour of Wi-Fi node `wifi` is transmitting, else 1.
int wifi_active_state(std::size_t wifi, const std::vector<LtuPhase>& phases,
                      const ContentionGraphs& graphs);

ActiveSet active_set(const std::vector<LtuPhase>& phases, const ContentionGraphs& graphs);

/// All maximal independent sets of `cst` induced on `active` (each sorted,
/// listed in lexicographic order). The empty active set yields one empty state.
std::vector<IndependentState> independent_states(const ActiveSet& active, const Graph& cst);

/// The members of `states` with the largest cardinality.
std::vector<IndependentState> maximum_independent_states(const std::vector<IndependentState>& states);

/// All maximum-cardinality independent sets of `g` (local vertex ids), by
/// branch and bound with a greedy clique-cover bound. Throws ResourceError for
/// graphs with more than 64 vertices.
std::vector<std::vector<std::size_t>> enumerate_maximum_independent_sets(const Graph& g);

/// Fraction of maximum independent sets containing each active node, computed
/// per connected component of the active contention graph.
NormalizedVector boe(const ActiveSet& active, const Graph& cst);

struct BianchiPoint {
    double tau = 0.0;  // per-slot transmission probability
    double p = 0.0;    // conditional collision probability
};

/// Transmission probability for collision probability `p` (infinite retry).
double bianchi_tau(double p, const MacParameters& mac);

/// Saturation fixed point for `n` contenders, by bisection on tau.
BianchiPoint bianchi_fixed_point(int n, const MacParameters& mac);

/// Aggregate saturation throughput of `n` mutually-sensing stations, Mbps.
double throughput_Z(int n, const MacParameters& mac);

double single_link_throughput(const MacParameters& mac);

/// Fraction of time the channel carries a success or a collision.
double csma_factor(int n, const MacParameters& mac);

}  // namespace coex
