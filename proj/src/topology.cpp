#include "coex/topology.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <iomanip>
#include <sstream>
#include <unordered_set>

#include "coex/errors.hpp"

namespace coex {

const char* to_string(NodeKind kind)
{
    return kind == NodeKind::WiFi ? "wifi" : "lteu";
}

void ChannelParams::validate() const
{
    if (!(freq_ghz > 0.0) || !std::isfinite(freq_ghz))
        throw ValidationError("channel.freq_ghz must be positive");
    if (!std::isfinite(edt_dbm) || !std::isfinite(cst_dbm) || !std::isfinite(noise_dbm))
        throw ValidationError("channel thresholds must be finite");
    if (cst_dbm > edt_dbm)
        throw ValidationError("channel.cst_dbm must not exceed channel.edt_dbm");
}

std::vector<std::size_t> ContentionGraphs::ltu_neighbors_of(std::size_t v) const
{
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < ltu_nodes.size(); ++k) {
        if (ltu_nodes[k] != v && edt.has_edge(v, ltu_nodes[k])) out.push_back(k);
    }
    return out;
}

double path_loss(double distance_m, double freq_ghz)
{
    if (!(distance_m > 0.0)) throw std::domain_error("path_loss: distance must be positive");
    if (!(freq_ghz > 0.0)) throw std::domain_error("path_loss: frequency must be positive");
    return 36.7 * std::log10(distance_m) + 22.7 + 26.0 * std::log10(freq_ghz);
}

double distance(const Position& a, const Position& b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

double received_power(const Node& tx, const Node& rx, const ChannelParams& ch)
{
    const double d = distance(tx.position, rx.position);
    if (!(d > 0.0))
        throw std::domain_error("received_power: nodes '" + tx.id + "' and '" + rx.id + "' coincide");
    return tx.tx_power_dbm - path_loss(d, ch.freq_ghz);
}

double threshold_distance(double tx_power_dbm, double threshold_dbm, double freq_ghz)
{
    const double budget = tx_power_dbm - threshold_dbm - 22.7 - 26.0 * std::log10(freq_ghz);
    return std::pow(10.0, budget / 36.7);
}

void validate_nodes(const std::vector<Node>& nodes)
{
    std::unordered_set<std::string> ids;
    for (const auto& n : nodes) {
        if (n.id.empty()) throw ValidationError("node id must not be empty");
        if (!ids.insert(n.id).second) throw ValidationError("duplicate node id '" + n.id + "'");
        if (!std::isfinite(n.position.x) || !std::isfinite(n.position.y))
            throw ValidationError("node '" + n.id + "' has non-finite coordinates");
        if (!std::isfinite(n.tx_power_dbm))
            throw ValidationError("node '" + n.id + "' has non-finite tx_power_dbm");
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
            if (distance(nodes[i].position, nodes[j].position) == 0.0)
                throw ValidationError("nodes '" + nodes[i].id + "' and '" + nodes[j].id +
                                      "' share a position");
        }
    }
}

ContentionGraphs build_graphs(const std::vector<Node>& nodes, const ChannelParams& ch)
{
    validate_nodes(nodes);
    ch.validate();

    const std::size_t n = nodes.size();
    ContentionGraphs g;
    g.edt = Graph(n);
    g.cst = Graph(n);
    g.kinds.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        g.kinds.push_back(nodes[i].kind);
        (nodes[i].kind == NodeKind::LteU ? g.ltu_nodes : g.wifi_nodes).push_back(i);
    }

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            // Either direction above threshold puts the pair in contention.
            const double rx = std::max(received_power(nodes[i], nodes[j], ch),
                                       received_power(nodes[j], nodes[i], ch));
            const bool both_wifi =
                nodes[i].kind == NodeKind::WiFi && nodes[j].kind == NodeKind::WiFi;
            if (both_wifi) {
                if (rx >= ch.cst_dbm) g.cst.add_edge(i, j);
            } else if (rx >= ch.edt_dbm) {
                g.edt.add_edge(i, j);
            }
        }
    }

    g.ltu = g.edt.induced(g.ltu_nodes);
    return g;
}

DutyFraction duty_fraction(std::size_t node, const ContentionGraphs& graphs)
{
    if (node >= graphs.kinds.size()) throw UsageError("duty_cycle: node index out of range");
    if (graphs.kinds[node] != NodeKind::LteU)
        throw UsageError("duty_cycle: node is not an LTE-U node");
    const auto neighbours = static_cast<std::int64_t>(graphs.edt.degree(node));
    if (neighbours == 0) return {19, 20};
    return {1, 1 + neighbours};
}

double duty_cycle(std::size_t node, const ContentionGraphs& graphs)
{
    return duty_fraction(node, graphs).value();
}

}  // namespace coex

namespace coex {

std::size_t Topology::index_of(const std::string& id) const
{
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].id == id) return i;
    }
    throw ValidationError("unknown node id '" + id + "'");
}

std::string topology_hash(const Topology& topo)
{
    std::ostringstream canon;
    canon.precision(17);
    canon << topo.channel.freq_ghz << ';' << topo.channel.edt_dbm << ';' << topo.channel.cst_dbm
          << ';' << topo.channel.noise_dbm << '\n';
    for (const auto& n : topo.nodes) {
        canon << n.id << ';' << to_string(n.kind) << ';' << n.position.x << ';' << n.position.y
              << ';' << n.tx_power_dbm << '\n';
    }
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canon.str()) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    std::ostringstream hex;
    hex << std::hex << std::setw(16) << std::setfill('0') << h;
    return hex.str();
}

}  // namespace coex
