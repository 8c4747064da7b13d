#include "coex/harness.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>

#include "coex/errors.hpp"

namespace coex {

Topology gen_topology(std::size_t n_total, double wifi_fraction, double area_m, std::uint64_t seed,
                      double min_dist_m)
{
    if (n_total < 1) throw ValidationError("gen_topology: n_total must be at least 1");
    if (!(wifi_fraction >= 0.0 && wifi_fraction <= 1.0))
        throw ValidationError("gen_topology: wifi_fraction must lie in [0, 1]");
    if (!(area_m > 0.0) || !std::isfinite(area_m)) throw ValidationError("gen_topology: area must be positive");
    if (min_dist_m < 0.0) throw ValidationError("gen_topology: min_dist must be non-negative");

    const auto n_wifi = static_cast<std::size_t>(std::floor(static_cast<double>(n_total) * wifi_fraction + 0.5));
    std::mt19937_64 rng(seed);
    // Draw from raw bits so placements do not depend on the library's distributions.
    auto coord = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * area_m; };

    Topology topo;
    for (std::size_t i = 0; i < n_total; ++i) {
        Node node;
        node.kind = i < n_wifi ? NodeKind::WiFi : NodeKind::LteU;
        node.id = (i < n_wifi ? "W" + std::to_string(i + 1) : "L" + std::to_string(i - n_wifi + 1));
        for (int attempt = 0;; ++attempt) {
            if (attempt == 100000) throw ValidationError("gen_topology: cannot honour min_dist in this area");
            node.position = {coord(), coord()};
            const bool clear = std::all_of(topo.nodes.begin(), topo.nodes.end(), [&](const Node& o) {
                const double d = distance(o.position, node.position);
                return d > 0.0 && d >= min_dist_m;
            });
            if (clear) break;
        }
        topo.nodes.push_back(node);
    }
    return topo;
}

std::vector<SimResult> simulate_runs(const Topology& topo, const SimConfig& config, std::size_t runs)
{
    if (runs == 0) throw ValidationError("runs must be at least 1");
    std::vector<SimResult> out;
    for (std::size_t r = 0; r < runs; ++r) {
        SimConfig c = config;
        c.seed = config.seed + r;
        out.push_back(simulate(topo, c));
    }
    return out;
}

double error_pct(double analysis, double simulation)
{
    if (simulation == 0.0) return analysis == 0.0 ? 0.0 : 100.0;
    return std::abs(analysis - simulation) / simulation * 100.0;
}

Comparison compare(const Report& report, const std::vector<SimResult>& runs)
{
    if (runs.empty()) throw UsageError("compare needs at least one simulation run");
    Comparison cmp;
    double wifi_sum = 0.0, ltu_sum = 0.0;
    for (std::size_t i = 0; i < report.nodes.size(); ++i) {
        const auto& a = report.nodes[i];
        CompareRow row;
        row.id = a.id;
        row.kind = a.kind;
        row.analysis_mbps = a.throughput_mbps;
        row.analysis_air = a.air_time;
        for (const auto& run : runs) {
            const auto& s = run.node(a.id);
            row.simulation_mbps += s.throughput_mbps;
            row.simulation_air += s.air_time;
        }
        row.simulation_mbps /= static_cast<double>(runs.size());
        row.simulation_air /= static_cast<double>(runs.size());
        row.error_pct = error_pct(row.analysis_mbps, row.simulation_mbps);
        if (a.kind == NodeKind::WiFi) {
            wifi_sum += row.error_pct;
            ++cmp.wifi_count;
        } else {
            ltu_sum += row.error_pct;
            ++cmp.ltu_count;
        }
        cmp.analysis_system_mbps += row.analysis_mbps;
        cmp.simulation_system_mbps += row.simulation_mbps;
        cmp.rows.push_back(row);
    }
    if (cmp.wifi_count) cmp.wifi_error_pct = wifi_sum / static_cast<double>(cmp.wifi_count);
    if (cmp.ltu_count) cmp.ltu_error_pct = ltu_sum / static_cast<double>(cmp.ltu_count);
    if (!cmp.rows.empty())
        cmp.system_error_pct = (wifi_sum + ltu_sum) / static_cast<double>(cmp.rows.size());
    return cmp;
}

Comparison compare(const Topology& topo, const SimConfig& config, std::size_t runs)
{
    AnalysisOptions opts;
    opts.lte = config.lte;
    const auto report = analyze(topo, config.mac, opts);
    return compare(report, simulate_runs(topo, config, runs));
}

Topology replace_ltu_with_wifi(const Topology& topo)
{
    Topology ww = topo;
    for (auto& n : ww.nodes) n.kind = NodeKind::WiFi;
    return ww;
}

StudyResult coexist_study(const Topology& topo, const MacParameters& mac, const AnalysisOptions& options)
{
    const bool has_ltu = std::any_of(topo.nodes.begin(), topo.nodes.end(),
                                     [](const Node& n) { return n.kind == NodeKind::LteU; });
    if (!has_ltu) throw UsageError("coexist study needs at least one LTE-U node");

    StudyResult st;
    st.wl = analyze(topo, mac, options);
    st.ww = analyze(replace_ltu_with_wifi(topo), mac, options);
    const double z1 = st.wl.z1_mbps;
    for (std::size_t i = 0; i < topo.nodes.size(); ++i) {
        PairedRow row;
        row.id = topo.nodes[i].id;
        row.replaced = topo.nodes[i].kind == NodeKind::LteU;
        row.wl_mbps = st.wl.nodes[i].throughput_mbps;
        row.ww_mbps = st.ww.nodes[i].throughput_mbps;
        row.wl_norm = row.replaced ? row.wl_mbps / options.lte.rate_mbps : row.wl_mbps / z1;
        row.ww_norm = row.ww_mbps / z1;
        st.rows.push_back(row);
    }
    return st;
}

std::vector<double> cdf_quantiles(std::vector<double> samples, std::size_t points)
{
    if (samples.empty() || points == 0) return {};
    std::sort(samples.begin(), samples.end());
    std::vector<double> out;
    out.reserve(points);
    const double last = static_cast<double>(samples.size() - 1);
    for (std::size_t k = 0; k < points; ++k) {
        const double q = points == 1 ? 1.0 : static_cast<double>(k) / static_cast<double>(points - 1);
        const double pos = q * last;
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, samples.size() - 1);
        out.push_back(samples[lo] + (pos - static_cast<double>(lo)) * (samples[hi] - samples[lo]));
    }
    return out;
}

std::vector<CdfPoint> study_cdf(const std::vector<PairedRow>& rows, std::size_t points)
{
    std::vector<double> wifi_wl, wifi_ww, rep_wl, rep_ww;
    for (const auto& r : rows) {
        (r.replaced ? rep_wl : wifi_wl).push_back(r.wl_norm);
        (r.replaced ? rep_ww : wifi_ww).push_back(r.ww_norm);
    }
    std::vector<CdfPoint> out;
    auto add = [&](const char* name, const std::vector<double>& s) {
        const auto q = cdf_quantiles(s, points);
        for (std::size_t k = 0; k < q.size(); ++k) {
            const double p = points == 1 ? 1.0 : static_cast<double>(k) / static_cast<double>(points - 1);
            out.push_back({name, p, q[k]});
        }
    };
    add("wifi_wl", wifi_wl);
    add("wifi_ww", wifi_ww);
    add("replaced_wl", rep_wl);
    add("replaced_ww", rep_ww);
    return out;
}

std::vector<SweepRow> tframe_sweep(const Topology& topo, const SimConfig& config,
                                   const std::vector<double>& t_frames_s, std::size_t runs)
{
    if (t_frames_s.empty()) throw ValidationError("sweep needs at least one T_frame value");
    std::vector<SweepRow> out;
    for (double tf : t_frames_s) {
        SimConfig c = config;
        c.lte.t_frame_s = tf;
        AnalysisOptions opts;
        opts.lte = c.lte;
        SweepRow row;
        row.t_frame_s = tf;
        row.analysis_mbps = analyze(topo, c.mac, opts).system_throughput();
        const auto sims = simulate_runs(topo, c, runs);
        for (const auto& s : sims) row.simulation_mbps += s.system_throughput();
        row.simulation_mbps /= static_cast<double>(sims.size());
        out.push_back(row);
    }
    return out;
}

void write_compare_csv(std::ostream& os, const Comparison& cmp)
{
    const auto old = os.flags();
    os << "node_id,kind,analysis_mbps,simulation_mbps,error_pct,analysis_air,simulation_air\n"
       << std::fixed << std::setprecision(6);
    for (const auto& r : cmp.rows) {
        os << r.id << ',' << to_string(r.kind) << ',' << r.analysis_mbps << ',' << r.simulation_mbps << ','
           << r.error_pct << ',' << r.analysis_air << ',' << r.simulation_air << '\n';
    }
    os.flags(old);
}

void write_paired_csv(std::ostream& os, const std::vector<PairedRow>& rows)
{
    const auto old = os.flags();
    os << "node_id,replaced,wl_mbps,ww_mbps,wl_norm,ww_norm\n" << std::fixed << std::setprecision(6);
    for (const auto& r : rows) {
        os << r.id << ',' << (r.replaced ? 1 : 0) << ',' << r.wl_mbps << ',' << r.ww_mbps << ','
           << r.wl_norm << ',' << r.ww_norm << '\n';
    }
    os.flags(old);
}

void write_cdf_csv(std::ostream& os, const std::vector<CdfPoint>& cdf)
{
    const auto old = os.flags();
    os << "series,quantile,normalized\n" << std::fixed << std::setprecision(6);
    for (const auto& p : cdf) os << p.series << ',' << p.quantile << ',' << p.value << '\n';
    os.flags(old);
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows)
{
    const auto old = os.flags();
    os << "t_frame_us,analysis_mbps,simulation_mbps\n" << std::fixed << std::setprecision(6);
    for (const auto& r : rows) {
        os << r.t_frame_s * 1e6 << ',' << r.analysis_mbps << ',' << r.simulation_mbps << '\n';
    }
    os.flags(old);
}

}  // namespace coex
