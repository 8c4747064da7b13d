#include "coex/integrator.hpp"

#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <stdexcept>

#include "coex/errors.hpp"
#include "json.hpp"

namespace coex {

void LteParams::validate() const
{
    if (!(rate_mbps > 0.0) || !std::isfinite(rate_mbps)) throw ValidationError("lte.rate_mbps must be positive");
    if (!(t_frame_s > 0.0) || !std::isfinite(t_frame_s)) throw ValidationError("lte.t_frame_us must be positive");
}

double Report::system_throughput() const
{
    double sum = 0.0;
    for (const auto& n : nodes) sum += n.throughput_mbps;
    return sum;
}

const NodeReport& Report::node(const std::string& id) const
{
    for (const auto& n : nodes) {
        if (n.id == id) return n;
    }
    throw UsageError("report has no node '" + id + "'");
}

NormalizedVector wifi_normalized(const SegmentCover& cover, const ContentionGraphs& graphs,
                                 std::size_t* distinct_active_sets)
{
    NormalizedVector acc;
    for (auto w : graphs.wifi_nodes) acc[w] = 0.0;

    // Many segments share an active set; BOE is evaluated once per set.
    std::map<ActiveSet, NormalizedVector> memo;
    const double frame = static_cast<double>(cover.schedule.frame_ticks);
    for (const auto& seg : cover.segments) {
        const ActiveSet active = active_set(seg.phases, graphs);
        auto it = memo.find(active);
        if (it == memo.end()) it = memo.emplace(active, boe(active, graphs.cst)).first;
        const double weight = seg.probability * static_cast<double>(seg.end - seg.start) / frame;
        for (const auto& [w, share] : it->second) acc[w] += weight * share;
    }
    if (distinct_active_sets) *distinct_active_sets = memo.size();
    return acc;
}

double wifi_throughput(double w_nor, const MacParameters& mac)
{
    return w_nor * single_link_throughput(mac);
}

double ltu_throughput(double duty, double rate_mbps)
{
    return duty * rate_mbps;
}

double wifi_air_time(double w_nor, const MacParameters& mac)
{
    return w_nor * csma_factor(1, mac);
}

double ltu_air_time(double duty)
{
    return duty;
}

Report analyze(const Topology& topo, const MacParameters& mac, const AnalysisOptions& options)
{
    mac.validate();
    options.lte.validate();

    Report report;
    report.topology_hash = topology_hash(topo);
    report.mac = mac;
    report.lte = options.lte;
    report.z1_mbps = single_link_throughput(mac);
    report.omega1 = csma_factor(1, mac);
    if (topo.nodes.empty()) return report;

    const ContentionGraphs graphs = build_graphs(topo.nodes, topo.channel);
    const LtuSchedule schedule = make_schedule(graphs, options.lte.t_frame_s);
    const SegmentCover cover = build_segments(schedule, graphs.ltu, options.enumeration);
    report.segment_count = cover.segments.size();
    report.warnings = cover.warnings;

    const NormalizedVector w_nor = wifi_normalized(cover, graphs, &report.distinct_active_sets);

    std::vector<std::size_t> ltu_ordinal(topo.nodes.size(), 0);
    for (std::size_t k = 0; k < graphs.ltu_nodes.size(); ++k) ltu_ordinal[graphs.ltu_nodes[k]] = k;

    for (std::size_t i = 0; i < topo.nodes.size(); ++i) {
        NodeReport r;
        r.id = topo.nodes[i].id;
        r.kind = topo.nodes[i].kind;
        if (r.kind == NodeKind::WiFi) {
            r.normalized = w_nor.at(i);
            r.throughput_mbps = r.normalized * report.z1_mbps;
            r.air_time = r.normalized * report.omega1;
        } else {
            const double duty = duty_cycle(i, graphs);
            r.normalized = duty;
            r.throughput_mbps = ltu_throughput(duty, options.lte.rate_mbps);
            r.air_time = ltu_air_time(duty);
            r.realized_duty = cover.expected_on_seconds[ltu_ordinal[i]] / options.lte.t_frame_s;
        }
        report.nodes.push_back(std::move(r));
    }

    if (options.grid_step_s > 0.0) {
        const auto steps = static_cast<std::size_t>(std::ceil(options.lte.t_frame_s / options.grid_step_s - 1e-9));
        for (std::size_t k = 0; k < graphs.ltu_nodes.size(); ++k) {
            for (std::size_t s = 0; s < steps; ++s) {
                const double t = static_cast<double>(s) * options.grid_step_s;
                StateProbabilitySample sample;
                sample.node_id = topo.nodes[graphs.ltu_nodes[k]].id;
                sample.t_us = t * 1e6;
                sample.psi = node_state_probability(cover, k, t);
                report.state_grid.push_back(std::move(sample));
            }
        }
    }
    return report;
}

void write_report_csv(std::ostream& os, const Report& report)
{
    const auto old = os.flags();
    os << "node_id,kind,w_nor,thr_mbps,air_time\n" << std::fixed << std::setprecision(6);
    for (const auto& n : report.nodes) {
        os << n.id << ',' << to_string(n.kind) << ',' << n.normalized << ',' << n.throughput_mbps
           << ',' << n.air_time << '\n';
    }
    os.flags(old);
}

void write_state_grid_csv(std::ostream& os, const std::vector<StateProbabilitySample>& grid)
{
    const auto old = os.flags();
    os << "node_id,t_us,psi0,psi1,psi2\n";
    for (const auto& s : grid) {
        os << s.node_id << ',' << std::fixed << std::setprecision(3) << s.t_us << ','
           << std::setprecision(9) << s.psi[0] << ',' << s.psi[1] << ',' << s.psi[2] << '\n';
    }
    os.flags(old);
}

void write_report_summary(std::ostream& os, const Report& report)
{
    nlohmann::ordered_json j;
    j["topology_hash"] = report.topology_hash;
    j["z1_mbps"] = report.z1_mbps;
    j["omega1"] = report.omega1;
    j["ltu_rate_mbps"] = report.lte.rate_mbps;
    j["t_frame_us"] = report.lte.t_frame_s * 1e6;
    j["segments"] = report.segment_count;
    j["distinct_active_sets"] = report.distinct_active_sets;
    double wifi = 0.0;
    double ltu = 0.0;
    for (const auto& n : report.nodes) (n.kind == NodeKind::WiFi ? wifi : ltu) += n.throughput_mbps;
    j["wifi_throughput_mbps"] = wifi;
    j["lteu_throughput_mbps"] = ltu;
    j["system_throughput_mbps"] = wifi + ltu;
    j["warnings"] = report.warnings;
    os << j.dump(2) << '\n';
}

}  // namespace coex
