#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "coex/integrator.hpp"
#include "coex/simulator.hpp"
#include "coex/topology.hpp"

namespace coex {

/// Uniform i.i.d. placement over [0, area]^2. Wi-Fi count is
/// floor(n * fraction + 0.5); ids are W1.. then L1... Positions closer than
/// `min_dist_m` to an earlier node are redrawn.
Topology gen_topology(std::size_t n_total, double wifi_fraction, double area_m, std::uint64_t seed,
                      double min_dist_m = 1.0);

/// Seeds seed, seed+1, ... of the same configuration.
std::vector<SimResult> simulate_runs(const Topology& topo, const SimConfig& config, std::size_t runs);

struct CompareRow {
    std::string id;
    NodeKind kind = NodeKind::WiFi;
    double analysis_mbps = 0.0;
    double simulation_mbps = 0.0;  // mean over runs
    double error_pct = 0.0;
    double analysis_air = 0.0;
    double simulation_air = 0.0;
};

struct Comparison {
    std::vector<CompareRow> rows;
    double wifi_error_pct = 0.0;  // class means; 0 when the class is empty
    double ltu_error_pct = 0.0;
    double system_error_pct = 0.0;  // mean over all nodes
    std::size_t wifi_count = 0;
    std::size_t ltu_count = 0;
    double analysis_system_mbps = 0.0;
    double simulation_system_mbps = 0.0;
};

/// |ana - sim| / sim in percent. A node the simulator never serves scores 0
/// when the analysis agrees and 100 otherwise.
double error_pct(double analysis, double simulation);

Comparison compare(const Report& report, const std::vector<SimResult>& runs);
Comparison compare(const Topology& topo, const SimConfig& config, std::size_t runs = 1);

struct PairedRow {
    std::string id;
    bool replaced = false;  // LTE-U in WL, Wi-Fi in WW
    double wl_mbps = 0.0;
    double ww_mbps = 0.0;
    double wl_norm = 0.0;  // by Z1 for Wi-Fi, by sigma_l for LTE-U
    double ww_norm = 0.0;
};

struct CdfPoint {
    std::string series;
    double quantile = 0.0;
    double value = 0.0;
};

struct StudyResult {
    std::vector<PairedRow> rows;
    Report wl;
    Report ww;
};

/// Analyzes the topology as given and with every LTE-U node turned into a
/// Wi-Fi AP in place. Throws UsageError when there is no LTE-U node.
StudyResult coexist_study(const Topology& topo, const MacParameters& mac,
                          const AnalysisOptions& options = {});

Topology replace_ltu_with_wifi(const Topology& topo);

/// `points` evenly spaced quantiles (linear interpolation) of `samples`.
std::vector<double> cdf_quantiles(std::vector<double> samples, std::size_t points = 100);

/// CDF series wifi_wl, wifi_ww, replaced_wl, replaced_ww over paired rows.
std::vector<CdfPoint> study_cdf(const std::vector<PairedRow>& rows, std::size_t points = 100);

struct SweepRow {
    double t_frame_s = 0.0;
    double analysis_mbps = 0.0;
    double simulation_mbps = 0.0;
};

std::vector<SweepRow> tframe_sweep(const Topology& topo, const SimConfig& config,
                                   const std::vector<double>& t_frames_s, std::size_t runs = 1);

/// node_id,kind,analysis_mbps,simulation_mbps,error_pct,analysis_air,simulation_air
void write_compare_csv(std::ostream& os, const Comparison& cmp);
/// node_id,replaced,wl_mbps,ww_mbps,wl_norm,ww_norm
void write_paired_csv(std::ostream& os, const std::vector<PairedRow>& rows);
/// series,quantile,normalized
void write_cdf_csv(std::ostream& os, const std::vector<CdfPoint>& cdf);
/// t_frame_us,analysis_mbps,simulation_mbps
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

}  // namespace coex
