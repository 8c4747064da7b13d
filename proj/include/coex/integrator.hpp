#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "coex/csma_model.hpp"
#include "coex/state_engine.hpp"
#include "coex/topology.hpp"

namespace coex {

/// LTE-U parameters that are not part of the Wi-Fi MAC.
struct LteParams {
    double rate_mbps = 93.24;  // sigma_l
    double t_frame_s = 0.040;

    void validate() const;
};

struct AnalysisOptions {
    LteParams lte;
    double grid_step_s = 0.0;  // > 0 samples node state probabilities on this grid
    EnumerationOptions enumeration;
};

struct NodeReport {
    std::string id;
    NodeKind kind = NodeKind::WiFi;
    double normalized = 0.0;  // w_nor for Wi-Fi, duty cycle for LTE-U
    double throughput_mbps = 0.0;
    double air_time = 0.0;
    double realized_duty = 0.0;  // LTE-U only: expected ON fraction actually achieved
};

struct StateProbabilitySample {
    std::string node_id;
    double t_us = 0.0;
    std::array<double, 3> psi{0.0, 0.0, 0.0};
};

struct Report {
    std::vector<NodeReport> nodes;  // topology order
    std::string topology_hash;
    MacParameters mac;
    LteParams lte;
    double z1_mbps = 0.0;
    double omega1 = 0.0;
    std::size_t segment_count = 0;
    std::size_t distinct_active_sets = 0;
    std::vector<std::string> warnings;
    std::vector<StateProbabilitySample> state_grid;

    double system_throughput() const;
    const NodeReport& node(const std::string& id) const;
};

/// Time- and probability-averaged BOE share of every Wi-Fi node (zero while
/// an LTE-U neighbour transmits). Integration is exact over the segments.
NormalizedVector wifi_normalized(const SegmentCover& cover, const ContentionGraphs& graphs,
                                 std::size_t* distinct_active_sets = nullptr);

double wifi_throughput(double w_nor, const MacParameters& mac);
double ltu_throughput(double duty, double rate_mbps);
double wifi_air_time(double w_nor, const MacParameters& mac);
double ltu_air_time(double duty);

/// Full pipeline: graphs, duty cycles, state enumeration, BOE integration,
/// throughputs and air times.
Report analyze(const Topology& topo, const MacParameters& mac, const AnalysisOptions& options = {});

/// node_id,kind,w_nor,thr_mbps,air_time
void write_report_csv(std::ostream& os, const Report& report);
/// node_id,t_us,psi0,psi1,psi2
void write_state_grid_csv(std::ostream& os, const std::vector<StateProbabilitySample>& grid);
/// JSON summary with metadata and class totals.
void write_report_summary(std::ostream& os, const Report& report);

}  // namespace coex
