// coexsim: analytical model and simulator for duty-cycled LTE-U next to Wi-Fi.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "coex/errors.hpp"
#include "coex/harness.hpp"
#include "coex/integrator.hpp"
#include "coex/io.hpp"
#include "coex/simulator.hpp"

namespace fs = std::filesystem;
using namespace coex;

namespace {

struct Common {
    std::string topology;
    std::string outdir = ".";
    std::string params;
    double t_frame_us = 0.0;
    std::uint64_t seed = 1;
    std::size_t runs = 1;
    double sim_time_s = 50.0;
    int warmup = 5;
    std::size_t max_segments = 1'000'000;
};

void add_common(CLI::App* cmd, Common& c, bool needs_topology = true)
{
    if (needs_topology) cmd->add_option("topology", c.topology, "topology file (JSON)")->required();
    cmd->add_option("-o,--out", c.outdir, "output directory");
    cmd->add_option("--params", c.params, "parameter override file");
    cmd->add_option("--t-frame-us", c.t_frame_us, "LTE-U frame period in microseconds");
    if (needs_topology) cmd->add_option("--max-segments", c.max_segments, "cap on enumerated LTE-U states");
}

void add_sim(CLI::App* cmd, Common& c)
{
    cmd->add_option("--seed", c.seed, "first RNG seed");
    cmd->add_option("--runs", c.runs, "number of seeds (seed, seed+1, ...)");
    cmd->add_option("--sim-time", c.sim_time_s, "simulated seconds per run");
    cmd->add_option("--warmup-frames", c.warmup, "frames discarded before measuring");
}

Scenario load(const Common& c)
{
    Scenario s = load_scenario(c.topology);
    if (!c.params.empty()) apply_overrides_file(s, c.params);
    if (c.t_frame_us > 0.0) s.lte.t_frame_s = c.t_frame_us * 1e-6;
    s.lte.validate();
    return s;
}

SimConfig sim_config(const Common& c, const Scenario& s)
{
    SimConfig cfg;
    cfg.seed = c.seed;
    cfg.sim_time_s = c.sim_time_s;
    cfg.mac = s.mac;
    cfg.lte = s.lte;
    cfg.warmup_frames = c.warmup;
    return cfg;
}

std::ofstream open_out(const Common& c, const std::string& name)
{
    fs::create_directories(c.outdir);
    const auto path = fs::path(c.outdir) / name;
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    return out;
}

void print_warnings(const Report& r)
{
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"LTE-U / Wi-Fi coexistence throughput analysis and simulation"};
    app.require_subcommand(1);
    Common c;
    double grid_us = 0.0;
    std::string node_id;
    bool trace = false;
    std::size_t gen_n = 10;
    double gen_frac = 0.5, gen_area = 200.0, gen_min = 1.0;
    std::string gen_name = "topology.json";
    std::vector<double> sweep_us{10000, 20000, 40000, 80000};

    auto* analyze_cmd = app.add_subcommand("analyze", "analytical per-node throughput and air time");
    add_common(analyze_cmd, c);
    analyze_cmd->add_option("--grid-us", grid_us, "also export state probabilities on this grid");

    auto* simulate_cmd = app.add_subcommand("simulate", "discrete-event simulation");
    add_common(simulate_cmd, c);
    add_sim(simulate_cmd, c);
    simulate_cmd->add_flag("--trace", trace, "write the event trace");

    auto* compare_cmd = app.add_subcommand("compare", "analysis against simulation, per node");
    add_common(compare_cmd, c);
    add_sim(compare_cmd, c);

    auto* coexist_cmd = app.add_subcommand("coexist", "WL vs WW study: LTE-U replaced by Wi-Fi in place");
    add_common(coexist_cmd, c);

    auto* sweep_cmd = app.add_subcommand("sweep-tframe", "system throughput against the frame period");
    add_common(sweep_cmd, c);
    add_sim(sweep_cmd, c);
    sweep_cmd->add_option("--values-us", sweep_us, "frame periods to sweep");

    auto* gen_cmd = app.add_subcommand("gen-topology", "random uniform placement");
    add_common(gen_cmd, c, false);
    gen_cmd->add_option("-n,--nodes", gen_n, "total node count");
    gen_cmd->add_option("--wifi-fraction", gen_frac, "share of Wi-Fi nodes");
    gen_cmd->add_option("--area", gen_area, "side of the square, metres");
    gen_cmd->add_option("--min-dist", gen_min, "minimum node separation, metres");
    gen_cmd->add_option("--seed", c.seed, "placement seed");
    gen_cmd->add_option("--name", gen_name, "output file name");

    auto* state_cmd = app.add_subcommand("state-prob", "LTE-U state probabilities over one frame");
    add_common(state_cmd, c);
    grid_us = 0.0;
    state_cmd->add_option("--node", node_id, "restrict to one LTE-U node");
    state_cmd->add_option("--grid-us", grid_us, "grid step in microseconds (default 100)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*gen_cmd) {
            Scenario s;
            s.topology = gen_topology(gen_n, gen_frac, gen_area, c.seed, gen_min);
            if (!c.params.empty()) apply_overrides_file(s, c.params);
            if (c.t_frame_us > 0.0) s.lte.t_frame_s = c.t_frame_us * 1e-6;
            fs::create_directories(c.outdir);
            save_scenario((fs::path(c.outdir) / gen_name).string(), s);
            return 0;
        }

        const Scenario s = load(c);
        AnalysisOptions opts;
        opts.lte = s.lte;
        opts.enumeration.max_segments = c.max_segments;

        if (*analyze_cmd) {
            opts.grid_step_s = grid_us * 1e-6;
            const auto report = analyze(s.topology, s.mac, opts);
            print_warnings(report);
            auto out = open_out(c, "report.csv");
            write_report_csv(out, report);
            auto summary = open_out(c, "summary.json");
            write_report_summary(summary, report);
            if (grid_us > 0.0) {
                auto grid = open_out(c, "state_prob.csv");
                write_state_grid_csv(grid, report.state_grid);
            }
            std::cout << "system throughput " << report.system_throughput() << " Mbps\n";
        } else if (*simulate_cmd) {
            auto cfg = sim_config(c, s);
            cfg.record_trace = trace;
            const auto runs = simulate_runs(s.topology, cfg, c.runs);
            for (const auto& r : runs) {
                const auto suffix = c.runs == 1 ? std::string() : "_" + std::to_string(r.seed);
                auto out = open_out(c, "sim" + suffix + ".csv");
                write_sim_csv(out, r);
                if (trace) {
                    auto tr = open_out(c, "trace" + suffix + ".csv");
                    write_trace_csv(tr, s.topology, r);
                }
                std::cout << "seed " << r.seed << ": system throughput " << r.system_throughput()
                          << " Mbps, " << r.wifi_collisions << " collisions, " << r.overlap_losses
                          << " LTE-U overlap losses\n";
            }
        } else if (*compare_cmd) {
            const auto report = analyze(s.topology, s.mac, opts);
            print_warnings(report);
            const auto cmp = compare(report, simulate_runs(s.topology, sim_config(c, s), c.runs));
            auto out = open_out(c, "compare.csv");
            write_compare_csv(out, cmp);
            std::cout << "mean error: wifi " << cmp.wifi_error_pct << "%, lteu " << cmp.ltu_error_pct
                      << "%, system " << cmp.system_error_pct << "%\n";
        } else if (*coexist_cmd) {
            const auto st = coexist_study(s.topology, s.mac, opts);
            auto paired = open_out(c, "paired.csv");
            write_paired_csv(paired, st.rows);
            auto cdf = open_out(c, "cdf.csv");
            write_cdf_csv(cdf, study_cdf(st.rows));
        } else if (*sweep_cmd) {
            std::vector<double> values;
            for (double us : sweep_us) values.push_back(us * 1e-6);
            const auto rows = tframe_sweep(s.topology, sim_config(c, s), values, c.runs);
            auto out = open_out(c, "sweep.csv");
            write_sweep_csv(out, rows);
        } else if (*state_cmd) {
            opts.grid_step_s = (grid_us > 0.0 ? grid_us : 100.0) * 1e-6;
            const auto report = analyze(s.topology, s.mac, opts);
            print_warnings(report);
            std::vector<StateProbabilitySample> rows;
            for (const auto& p : report.state_grid) {
                if (node_id.empty() || p.node_id == node_id) rows.push_back(p);
            }
            if (!node_id.empty() && rows.empty())
                throw ValidationError("--node " + node_id + ": no LTE-U node with this id");
            auto out = open_out(c, "state_prob.csv");
            write_state_grid_csv(out, rows);
        }
    } catch (const ResourceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
