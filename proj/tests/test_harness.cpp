#include <algorithm>
#include <sstream>

#include "coex/errors.hpp"
#include "coex/harness.hpp"
#include "coex/io.hpp"
#include "doctest.h"

using namespace coex;

namespace {

Node wifi(const std::string& id, double x, double y) { return {id, NodeKind::WiFi, {x, y}, 20.0}; }
Node lteu(const std::string& id, double x, double y) { return {id, NodeKind::LteU, {x, y}, 20.0}; }

Topology make(std::vector<Node> nodes)
{
    Topology t;
    t.nodes = std::move(nodes);
    return t;
}

}  // namespace

TEST_CASE("gen_topology counts, ids and determinism")
{
    const auto t = gen_topology(20, 0.5, 200.0, 9);
    CHECK(std::count_if(t.nodes.begin(), t.nodes.end(), [](const Node& n) { return n.kind == NodeKind::WiFi; }) == 10);
    CHECK(t.nodes.front().id == "W1");
    CHECK(t.nodes.back().id == "L10");
    CHECK(topology_hash(gen_topology(20, 0.5, 200.0, 9)) == topology_hash(t));
    CHECK(topology_hash(gen_topology(20, 0.5, 200.0, 10)) != topology_hash(t));
    for (const auto& n : t.nodes) {
        CHECK(n.position.x >= 0.0);
        CHECK(n.position.x <= 200.0);
    }

    const auto one = gen_topology(1, 1.0, 200.0, 1);
    REQUIRE(one.nodes.size() == 1);
    CHECK(one.nodes[0].kind == NodeKind::WiFi);

    // 0.5 rounds half to Wi-Fi
    const auto odd = gen_topology(5, 0.5, 200.0, 1);
    CHECK(odd.nodes[2].kind == NodeKind::WiFi);
    CHECK(odd.nodes[3].kind == NodeKind::LteU);

    const auto tight = gen_topology(30, 0.5, 20.0, 2, 2.0);
    for (std::size_t a = 0; a < tight.nodes.size(); ++a)
        for (std::size_t b = a + 1; b < tight.nodes.size(); ++b)
            CHECK(distance(tight.nodes[a].position, tight.nodes[b].position) >= 2.0);

    CHECK_THROWS_AS(gen_topology(0, 0.5, 200.0, 1), ValidationError);
    CHECK_THROWS_AS(gen_topology(3, 1.5, 200.0, 1), ValidationError);
    CHECK_THROWS_AS(gen_topology(50, 0.5, 2.0, 1, 5.0), ValidationError);
}

TEST_CASE("error convention")
{
    CHECK(error_pct(11.0, 10.0) == doctest::Approx(10.0));
    CHECK(error_pct(9.0, 10.0) == doctest::Approx(10.0));
    CHECK(error_pct(0.0, 0.0) == 0.0);
    CHECK(error_pct(1.0, 0.0) == 100.0);
}

TEST_CASE("compare on single nodes")
{
    SimConfig cfg;
    cfg.sim_time_s = 20.0;
    const auto w = compare(make({wifi("W1", 0, 0)}), cfg);
    CHECK(w.wifi_error_pct <= 2.0);
    CHECK(w.ltu_count == 0);
    const auto l = compare(make({lteu("L1", 0, 0)}), cfg);
    CHECK(l.ltu_error_pct <= 0.5);
    CHECK(l.system_error_pct == l.ltu_error_pct);
    std::ostringstream os;
    write_compare_csv(os, w);
    CHECK(os.str().rfind("node_id,kind,analysis_mbps,simulation_mbps,error_pct", 0) == 0);
}

TEST_CASE("coexist study pairs rows and flips only kinds")
{
    const auto topo = gen_topology(12, 0.5, 60.0, 5);
    const auto st = coexist_study(topo, MacParameters{});
    REQUIRE(st.rows.size() == topo.nodes.size());
    const auto ww = replace_ltu_with_wifi(topo);
    for (std::size_t i = 0; i < topo.nodes.size(); ++i) {
        CHECK(st.rows[i].id == topo.nodes[i].id);
        CHECK(st.rows[i].replaced == (topo.nodes[i].kind == NodeKind::LteU));
        CHECK(ww.nodes[i].position.x == topo.nodes[i].position.x);
        CHECK(ww.nodes[i].kind == NodeKind::WiFi);
    }
    CHECK_THROWS_AS(coexist_study(make({wifi("W1", 0, 0)}), MacParameters{}), UsageError);
}

TEST_CASE("coexist closed form with everything in range")
{
    // Two Wi-Fi and two LTE-U within 12 m of each other: every LTE-U has three
    // EDT neighbours (duty 1/4); the two serialise, leaving half the frame to
    // the two Wi-Fi (1/2 each). WW: four Wi-Fi in CST range, 1/4 each.
    const auto topo = make({wifi("W1", 0, 0), wifi("W2", 5, 0), lteu("L1", 0, 5), lteu("L2", 5, 5)});
    const auto st = coexist_study(topo, MacParameters{});
    CHECK(st.rows[0].wl_norm == doctest::Approx(0.25));
    CHECK(st.rows[0].ww_norm == doctest::Approx(0.25));
    CHECK(st.rows[2].wl_norm == doctest::Approx(0.25));
    CHECK(st.rows[2].ww_norm == doctest::Approx(0.25));
}

TEST_CASE("replaced nodes that cannot hear each other starve a Wi-Fi node in WW only")
{
    // W1 halfway between L1 and L2, 30 m from each and so in CST range of both
    // once they become Wi-Fi; they are 60 m apart. In WW the only MIS is
    // {L1, L2}. In WL both are beyond W1's energy-detection range.
    const auto topo = make({wifi("W1", 0, 0), lteu("L1", -30, 0), lteu("L2", 30, 0)});
    const auto st = coexist_study(topo, MacParameters{});
    CHECK(st.rows[0].ww_mbps == 0.0);
    CHECK(st.rows[0].wl_mbps > 0.0);
}

TEST_CASE("cdf quantiles")
{
    const auto q = cdf_quantiles({3.0, 1.0, 2.0}, 5);
    REQUIRE(q.size() == 5);
    CHECK(q[0] == 1.0);
    CHECK(q[1] == doctest::Approx(1.5));
    CHECK(q[2] == 2.0);
    CHECK(q[4] == 3.0);
    CHECK(cdf_quantiles({}, 100).empty());

    const auto topo = gen_topology(12, 0.5, 60.0, 5);
    const auto cdf = study_cdf(coexist_study(topo, MacParameters{}).rows);
    CHECK(cdf.size() == 400);
    for (std::size_t i = 1; i < cdf.size(); ++i) {
        if (cdf[i].series == cdf[i - 1].series) CHECK(cdf[i].value >= cdf[i - 1].value);
    }
}

TEST_CASE("tframe sweep keeps the analytical column constant")
{
    SimConfig cfg;
    cfg.sim_time_s = 2.0;
    const auto rows = tframe_sweep(gen_topology(6, 0.5, 40.0, 1), cfg, {0.01, 0.02, 0.04});
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].analysis_mbps == rows[1].analysis_mbps);
    CHECK(rows[0].analysis_mbps == rows[2].analysis_mbps);
    CHECK_THROWS_AS(tframe_sweep(gen_topology(2, 0.5, 40.0, 1), cfg, {}), ValidationError);

    const auto flat = tframe_sweep(make({wifi("W1", 0, 0)}), cfg, {0.01, 0.08});
    CHECK(flat[0].simulation_mbps == doctest::Approx(flat[1].simulation_mbps).epsilon(0.03));
}

TEST_CASE("topology documents")
{
    const std::string doc = R"({
      "nodes": [{"id": "W1", "kind": "wifi", "x": 0, "y": 0},
                {"id": "L1", "kind": "lteu", "x": 5, "y": 0, "tx_power_dbm": 23}],
      "mac": {"cw_min": 32},
      "lte": {"t_frame_us": 20000}
    })";
    const auto s = parse_scenario(doc);
    REQUIRE(s.topology.nodes.size() == 2);
    CHECK(s.topology.nodes[1].kind == NodeKind::LteU);
    CHECK(s.topology.nodes[1].tx_power_dbm == 23.0);
    CHECK(s.topology.nodes[0].tx_power_dbm == 20.0);
    CHECK(s.mac.cw_min == 32);
    CHECK(s.mac.cw_max == 1024);
    CHECK(s.lte.t_frame_s == doctest::Approx(0.02));

    const auto again = parse_scenario(dump_scenario(s));
    CHECK(dump_scenario(again) == dump_scenario(s));

    auto message_of = [](const std::string& text) {
        try {
            parse_scenario(text);
        } catch (const ValidationError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message_of(R"({"nodes": [{"id": "A", "kind": "bluetooth", "x": 0, "y": 0}]})").find("nodes[0].kind") !=
          std::string::npos);
    CHECK(message_of(R"({"nodes": [{"id": "A", "kind": "wifi", "x": "zero", "y": 0}]})").find("nodes[0].x") !=
          std::string::npos);
    CHECK(message_of(R"({"nodes": [], "mac": {"cw_mn": 3}})").find("mac.cw_mn") != std::string::npos);
    CHECK(message_of(R"({"nodes": [{"id": "A", "kind": "wifi", "y": 0}]})").find("nodes[0].x") != std::string::npos);
    CHECK(message_of(R"({"nodes": [], "mac": {"cw_min": 1.5}})").find("mac.cw_min") != std::string::npos);
    CHECK(message_of("{not json").find("malformed") != std::string::npos);
    CHECK_FALSE(message_of(R"({"nodes": [{"id": "A", "kind": "wifi", "x": 0, "y": 0},
                                         {"id": "A", "kind": "wifi", "x": 1, "y": 0}]})")
                    .empty());

    Scenario over = s;
    apply_overrides(over, R"({"lte": {"rate_mbps": 50}})");
    CHECK(over.lte.rate_mbps == 50.0);
    CHECK_THROWS_AS(apply_overrides(over, R"({"nodes": []})"), ValidationError);
}
