#include "coex/csma_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>

#include "coex/errors.hpp"

namespace coex {

void MacParameters::validate() const
{
    if (cw_min <= 0 || cw_max < cw_min) throw ValidationError("mac: need 0 < cw_min <= cw_max");
    if (cw_max % cw_min != 0 || !std::has_single_bit(static_cast<unsigned>(cw_max / cw_min)))
        throw ValidationError("mac: cw_max must be cw_min times a power of two");
    const double positives[] = {slot_us, difs_us, sifs_us, phy_header_bits, mac_header_bits,
                                ack_bits, payload_bits, phy_rate_mbps, ack_rate_mbps,
                                header_rate_mbps};
    for (double v : positives) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("mac: durations, sizes and rates must be positive");
    }
    if (max_pdu <= 0) throw ValidationError("mac: max_pdu must be positive");
    if (max_retry < 0) throw ValidationError("mac: max_retry must be non-negative");
}

int MacParameters::backoff_stages() const
{
    return std::countr_zero(static_cast<unsigned>(cw_max / cw_min));
}

FrameTiming frame_timing(const MacParameters& mac)
{
    FrameTiming t;
    t.data_us = (mac.phy_header_bits + mac.mac_header_bits) / mac.header_rate_mbps +
                mac.exchange_payload_bits() / mac.phy_rate_mbps;
    t.ack_us = mac.phy_header_bits / mac.header_rate_mbps + mac.ack_bits / mac.ack_rate_mbps;
    t.success_us = t.data_us + mac.sifs_us + t.ack_us + mac.difs_us;
    t.collision_us = t.data_us + mac.difs_us;
    return t;
}

int wifi_active_state(std::size_t wifi, const std::vector<LtuPhase>& phases,
                      const ContentionGraphs& graphs)
{
    for (std::size_t k = 0; k < graphs.ltu_nodes.size(); ++k) {
        if (phases[k] == LtuPhase::Transmitting && graphs.edt.has_edge(wifi, graphs.ltu_nodes[k]))
            return 0;
    }
    return 1;
}

ActiveSet active_set(const std::vector<LtuPhase>& phases, const ContentionGraphs& graphs)
{
    if (phases.size() != graphs.ltu_nodes.size()) throw UsageError("active_set: phase vector size mismatch");
    ActiveSet out;
    for (auto w : graphs.wifi_nodes) {
        if (wifi_active_state(w, phases, graphs) == 1) out.push_back(w);
    }
    return out;
}

namespace {

using Mask = std::uint64_t;

std::vector<Mask> adjacency_masks(const Graph& g)
{
    if (g.size() > 64)
        throw ResourceError("independent-set search limited to 64 vertices per component, got " +
                            std::to_string(g.size()));
    std::vector<Mask> adj(g.size(), 0);
    for (std::size_t v = 0; v < g.size(); ++v) {
        for (auto w : g.neighbors(v)) adj[v] |= Mask{1} << w;
    }
    return adj;
}

Mask full_mask(std::size_t n)
{
    return n == 64 ? ~Mask{0} : (Mask{1} << n) - 1;
}

std::vector<std::size_t> bits_of(Mask m)
{
    std::vector<std::size_t> out;
    while (m) {
        out.push_back(static_cast<std::size_t>(std::countr_zero(m)));
        m &= m - 1;
    }
    return out;
}

// Bron-Kerbosch with pivoting on the complement graph: maximal cliques of the
// complement are the maximal independent sets.
void bron_kerbosch(Mask r, Mask p, Mask x, const std::vector<Mask>& non_adj, std::vector<Mask>& out)
{
    if (p == 0 && x == 0) {
        out.push_back(r);
        return;
    }
    Mask px = p | x;
    std::size_t pivot = static_cast<std::size_t>(std::countr_zero(px));
    int best = -1;
    for (auto u : bits_of(px)) {
        const int c = std::popcount(p & non_adj[u]);
        if (c > best) {
            best = c;
            pivot = u;
        }
    }
    for (auto v : bits_of(p & ~non_adj[pivot])) {
        const Mask bit = Mask{1} << v;
        bron_kerbosch(r | bit, p & non_adj[v], x & non_adj[v], non_adj, out);
        p &= ~bit;
        x |= bit;
    }
}

// Number of cliques in a greedy clique cover of `cand`: an upper bound on the
// independence number of the induced subgraph.
int clique_cover_bound(Mask cand, const std::vector<Mask>& adj)
{
    std::vector<Mask> cliques;
    for (auto v : bits_of(cand)) {
        bool placed = false;
        for (auto& c : cliques) {
            if ((c & ~adj[v]) == 0) {
                c |= Mask{1} << v;
                placed = true;
                break;
            }
        }
        if (!placed) cliques.push_back(Mask{1} << v);
    }
    return static_cast<int>(cliques.size());
}

struct MisSearch {
    const std::vector<Mask>& adj;
    int best = -1;
    std::vector<Mask> found;

    void run(Mask chosen, int size, Mask cand)
    {
        if (cand == 0) {
            if (size > best) {
                best = size;
                found.clear();
            }
            if (size == best) found.push_back(chosen);
            return;
        }
        if (size + clique_cover_bound(cand, adj) < best) return;

        // Branch on the candidate with the most candidate neighbours.
        std::size_t v = static_cast<std::size_t>(std::countr_zero(cand));
        int deg = -1;
        for (auto u : bits_of(cand)) {
            const int d = std::popcount(adj[u] & cand);
            if (d > deg) {
                deg = d;
                v = u;
            }
        }
        const Mask bit = Mask{1} << v;
        run(chosen | bit, size + 1, cand & ~bit & ~adj[v]);
        if (deg > 0) run(chosen, size, cand & ~bit);
    }
};

}  // namespace

std::vector<IndependentState> independent_states(const ActiveSet& active, const Graph& cst)
{
    const Graph sub = cst.induced(active);
    const auto adj = adjacency_masks(sub);
    const Mask all = full_mask(sub.size());
    std::vector<Mask> non_adj(sub.size());
    for (std::size_t v = 0; v < sub.size(); ++v) non_adj[v] = all & ~adj[v] & ~(Mask{1} << v);

    std::vector<Mask> sets;
    bron_kerbosch(0, all, 0, non_adj, sets);

    std::vector<IndependentState> out;
    for (auto m : sets) {
        IndependentState s;
        for (auto b : bits_of(m)) s.push_back(active[b]);
        std::sort(s.begin(), s.end());
        out.push_back(std::move(s));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<IndependentState> maximum_independent_states(const std::vector<IndependentState>& states)
{
    std::size_t best = 0;
    for (const auto& s : states) best = std::max(best, s.size());
    std::vector<IndependentState> out;
    for (const auto& s : states) {
        if (s.size() == best) out.push_back(s);
    }
    return out;
}

std::vector<std::vector<std::size_t>> enumerate_maximum_independent_sets(const Graph& g)
{
    const auto adj = adjacency_masks(g);
    MisSearch search{adj, -1, {}};
    search.run(0, 0, full_mask(g.size()));
    std::vector<std::vector<std::size_t>> out;
    for (auto m : search.found) out.push_back(bits_of(m));
    std::sort(out.begin(), out.end());
    return out;
}

NormalizedVector boe(const ActiveSet& active, const Graph& cst)
{
    NormalizedVector out;
    if (active.empty()) return out;
    const Graph sub = cst.induced(active);
    for (const auto& comp : sub.components()) {
        if (comp.size() == 1) {
            out[active[comp[0]]] = 1.0;
            continue;
        }
        const auto sets = enumerate_maximum_independent_sets(sub.induced(comp));
        std::vector<double> hits(comp.size(), 0.0);
        for (const auto& s : sets) {
            for (auto v : s) hits[v] += 1.0;
        }
        for (std::size_t i = 0; i < comp.size(); ++i)
            out[active[comp[i]]] = hits[i] / static_cast<double>(sets.size());
    }
    return out;
}

double bianchi_tau(double p, const MacParameters& mac)
{
    const double w = mac.cw_min;
    double series = 0.0;  // sum_{k<m} (2p)^k
    double term = 1.0;
    for (int k = 0; k < mac.backoff_stages(); ++k) {
        series += term;
        term *= 2.0 * p;
    }
    return 2.0 / (1.0 + w + p * w * series);
}

BianchiPoint bianchi_fixed_point(int n, const MacParameters& mac)
{
    if (n < 1) throw std::domain_error("bianchi_fixed_point: need at least one station");
    mac.validate();
    if (n == 1) return {bianchi_tau(0.0, mac), 0.0};

    auto collision = [n](double tau) { return 1.0 - std::pow(1.0 - tau, n - 1); };
    // g(tau) = tau(p(tau)) - tau is strictly decreasing on (0,1).
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (bianchi_tau(collision(mid), mac) > mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double tau = 0.5 * (lo + hi);
    const double p = collision(tau);
    if (std::abs(bianchi_tau(p, mac) - tau) > 1e-9)
        throw NumericError("bianchi_fixed_point: bisection did not converge");
    return {tau, p};
}

namespace {

struct SlotMix {
    double p_tr = 0.0;
    double p_s = 0.0;
    double idle = 0.0;     // (1 - P_tr) sigma
    double success = 0.0;  // P_tr P_s T_s
    double collide = 0.0;  // P_tr (1 - P_s) T_c
};

SlotMix slot_mix(int n, const MacParameters& mac)
{
    const auto fp = bianchi_fixed_point(n, mac);
    const auto timing = frame_timing(mac);
    SlotMix m;
    m.p_tr = 1.0 - std::pow(1.0 - fp.tau, n);
    m.p_s = n * fp.tau * std::pow(1.0 - fp.tau, n - 1) / m.p_tr;
    m.idle = (1.0 - m.p_tr) * mac.slot_us;
    m.success = m.p_tr * m.p_s * timing.success_us;
    m.collide = m.p_tr * (1.0 - m.p_s) * timing.collision_us;
    return m;
}

}  // namespace

double throughput_Z(int n, const MacParameters& mac)
{
    const auto m = slot_mix(n, mac);
    // bits per microsecond == Mbps
    return m.p_s * m.p_tr * mac.exchange_payload_bits() / (m.idle + m.success + m.collide);
}

double single_link_throughput(const MacParameters& mac)
{
    return throughput_Z(1, mac);
}

double csma_factor(int n, const MacParameters& mac)
{
    const auto m = slot_mix(n, mac);
    return (m.success + m.collide) / (m.idle + m.success + m.collide);
}

}  // namespace coex
