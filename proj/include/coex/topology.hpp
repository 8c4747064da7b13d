#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "coex/graph.hpp"

namespace coex {

enum class NodeKind { WiFi, LteU };

const char* to_string(NodeKind kind);

struct Position {
    double x = 0.0;  // meters
    double y = 0.0;  // meters
};

struct Node {
    std::string id;
    NodeKind kind = NodeKind::WiFi;
    Position position;
    double tx_power_dbm = 20.0;
};

/// Radio environment shared by all nodes. Defaults are the reference
/// deployment values (5.3 GHz, EDT -62 dBm, CST -82 dBm).
struct ChannelParams {
    double freq_ghz = 5.3;
    double edt_dbm = -62.0;
    double cst_dbm = -82.0;
    double noise_dbm = -101.0;

    void validate() const;
};

/// Contention structure derived from geometry.
///
/// `edt` and `cst` are indexed by topology node index. `ltu` is indexed by
/// LTE-U ordinal (position within `ltu_nodes`) and is `edt` restricted to
/// LTE-U pairs.
struct ContentionGraphs {
    Graph edt;
    Graph cst;
    Graph ltu;
    std::vector<std::size_t> ltu_nodes;   // topology indices of LTE-U nodes
    std::vector<std::size_t> wifi_nodes;  // topology indices of Wi-Fi nodes
    std::vector<NodeKind> kinds;

    /// LTE-U ordinals that are EDT neighbours of topology node `v`.
    std::vector<std::size_t> ltu_neighbors_of(std::size_t v) const;
};

/// Path loss in dB: 36.7 log10(d) + 22.7 + 26 log10(f).
/// Throws std::domain_error unless d > 0 and f > 0.
double path_loss(double distance_m, double freq_ghz);

double distance(const Position& a, const Position& b);

/// Received power at `rx` of a transmission from `tx`, in dBm.
double received_power(const Node& tx, const Node& rx, const ChannelParams& ch);

/// Rejects duplicate ids, non-finite coordinates and coincident positions.
void validate_nodes(const std::vector<Node>& nodes);

ContentionGraphs build_graphs(const std::vector<Node>& nodes, const ChannelParams& ch);

/// Exact duty cycle as numerator/denominator: 19/20 when the node has no
/// EDT neighbours, else 1/(1 + neighbours).
struct DutyFraction {
    std::int64_t num = 1;
    std::int64_t den = 1;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// min(0.95, 1/(1 + |EDT neighbours|)). `node` is a topology index.
/// Throws UsageError for Wi-Fi nodes.
DutyFraction duty_fraction(std::size_t node, const ContentionGraphs& graphs);
double duty_cycle(std::size_t node, const ContentionGraphs& graphs);

/// Distance at which a transmission at `tx_power_dbm` is received at exactly
/// `threshold_dbm`.
double threshold_distance(double tx_power_dbm, double threshold_dbm, double freq_ghz);

}  // namespace coex

namespace coex {

/// A deployment: nodes plus the shared channel.
struct Topology {
    std::vector<Node> nodes;
    ChannelParams channel;

    std::size_t index_of(const std::string& id) const;  // throws ValidationError
};

/// Stable 64-bit FNV-1a digest of the canonical topology text, as hex.
std::string topology_hash(const Topology& topo);

}  // namespace coex
