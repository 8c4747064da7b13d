#include "coex/io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "coex/errors.hpp"
#include "json.hpp"

namespace coex {

namespace {

using json = nlohmann::json;

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed)
{
    if (!obj.is_object()) throw ValidationError(where + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) throw ValidationError(where + "." + it.key() + ": unknown field");
    }
}

double get_number(const json& obj, const std::string& where, const std::string& key, double fallback)
{
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ValidationError(where + "." + key + ": expected a number");
    return v.get<double>();
}

int get_int(const json& obj, const std::string& where, const std::string& key, int fallback)
{
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_integer()) throw ValidationError(where + "." + key + ": expected an integer");
    return v.get<int>();
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json(const std::string& text)
{
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("malformed document: ") + e.what());
    }
}

void read_channel(const json& j, ChannelParams& ch)
{
    check_keys(j, "channel", {"freq_ghz", "edt_dbm", "cst_dbm", "noise_dbm"});
    ch.freq_ghz = get_number(j, "channel", "freq_ghz", ch.freq_ghz);
    ch.edt_dbm = get_number(j, "channel", "edt_dbm", ch.edt_dbm);
    ch.cst_dbm = get_number(j, "channel", "cst_dbm", ch.cst_dbm);
    ch.noise_dbm = get_number(j, "channel", "noise_dbm", ch.noise_dbm);
}

void read_mac(const json& j, MacParameters& m)
{
    check_keys(j, "mac", {"cw_min", "cw_max", "slot_us", "difs_us", "sifs_us", "phy_header_bits",
                          "mac_header_bits", "ack_bits", "payload_bits", "max_pdu", "phy_rate_mbps",
                          "ack_rate_mbps", "header_rate_mbps", "max_retry"});
    m.cw_min = get_int(j, "mac", "cw_min", m.cw_min);
    m.cw_max = get_int(j, "mac", "cw_max", m.cw_max);
    m.slot_us = get_number(j, "mac", "slot_us", m.slot_us);
    m.difs_us = get_number(j, "mac", "difs_us", m.difs_us);
    m.sifs_us = get_number(j, "mac", "sifs_us", m.sifs_us);
    m.phy_header_bits = get_number(j, "mac", "phy_header_bits", m.phy_header_bits);
    m.mac_header_bits = get_number(j, "mac", "mac_header_bits", m.mac_header_bits);
    m.ack_bits = get_number(j, "mac", "ack_bits", m.ack_bits);
    m.payload_bits = get_number(j, "mac", "payload_bits", m.payload_bits);
    m.max_pdu = get_int(j, "mac", "max_pdu", m.max_pdu);
    m.phy_rate_mbps = get_number(j, "mac", "phy_rate_mbps", m.phy_rate_mbps);
    m.ack_rate_mbps = get_number(j, "mac", "ack_rate_mbps", m.ack_rate_mbps);
    m.header_rate_mbps = get_number(j, "mac", "header_rate_mbps", m.header_rate_mbps);
    m.max_retry = get_int(j, "mac", "max_retry", m.max_retry);
}

void read_lte(const json& j, LteParams& lte)
{
    check_keys(j, "lte", {"rate_mbps", "t_frame_us"});
    lte.rate_mbps = get_number(j, "lte", "rate_mbps", lte.rate_mbps);
    lte.t_frame_s = get_number(j, "lte", "t_frame_us", lte.t_frame_s * 1e6) * 1e-6;
}

std::vector<Node> read_nodes(const json& j)
{
    if (!j.is_array()) throw ValidationError("nodes: expected an array");
    std::vector<Node> nodes;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto where = "nodes[" + std::to_string(i) + "]";
        const auto& n = j[i];
        check_keys(n, where, {"id", "kind", "x", "y", "tx_power_dbm"});
        for (const char* req : {"id", "kind", "x", "y"}) {
            if (!n.contains(req)) throw ValidationError(where + "." + req + ": missing");
        }
        Node node;
        if (!n["id"].is_string()) throw ValidationError(where + ".id: expected a string");
        node.id = n["id"].get<std::string>();
        if (!n["kind"].is_string()) throw ValidationError(where + ".kind: expected a string");
        const auto kind = n["kind"].get<std::string>();
        if (kind == "wifi") {
            node.kind = NodeKind::WiFi;
        } else if (kind == "lteu") {
            node.kind = NodeKind::LteU;
        } else {
            throw ValidationError(where + ".kind: expected \"wifi\" or \"lteu\", got \"" + kind + "\"");
        }
        node.position.x = get_number(n, where, "x", 0.0);
        node.position.y = get_number(n, where, "y", 0.0);
        node.tx_power_dbm = get_number(n, where, "tx_power_dbm", node.tx_power_dbm);
        nodes.push_back(node);
    }
    return nodes;
}

void validate_scenario(const Scenario& s)
{
    s.topology.channel.validate();
    s.mac.validate();
    s.lte.validate();
    validate_nodes(s.topology.nodes);
}

}  // namespace

Scenario parse_scenario(const std::string& text)
{
    const auto doc = parse_json(text);
    check_keys(doc, "topology", {"nodes", "channel", "mac", "lte"});
    if (!doc.contains("nodes")) throw ValidationError("topology.nodes: missing");
    Scenario s;
    s.topology.nodes = read_nodes(doc["nodes"]);
    if (doc.contains("channel")) read_channel(doc["channel"], s.topology.channel);
    if (doc.contains("mac")) read_mac(doc["mac"], s.mac);
    if (doc.contains("lte")) read_lte(doc["lte"], s.lte);
    validate_scenario(s);
    return s;
}

Scenario load_scenario(const std::string& path)
{
    return parse_scenario(read_file(path));
}

void apply_overrides(Scenario& scenario, const std::string& text)
{
    const auto doc = parse_json(text);
    check_keys(doc, "params", {"channel", "mac", "lte"});
    if (doc.contains("channel")) read_channel(doc["channel"], scenario.topology.channel);
    if (doc.contains("mac")) read_mac(doc["mac"], scenario.mac);
    if (doc.contains("lte")) read_lte(doc["lte"], scenario.lte);
    validate_scenario(scenario);
}

void apply_overrides_file(Scenario& scenario, const std::string& path)
{
    apply_overrides(scenario, read_file(path));
}

std::string dump_scenario(const Scenario& s)
{
    nlohmann::ordered_json doc;
    doc["nodes"] = nlohmann::ordered_json::array();
    for (const auto& n : s.topology.nodes) {
        doc["nodes"].push_back({{"id", n.id},
                                {"kind", to_string(n.kind)},
                                {"x", n.position.x},
                                {"y", n.position.y},
                                {"tx_power_dbm", n.tx_power_dbm}});
    }
    const auto& ch = s.topology.channel;
    doc["channel"] = {{"freq_ghz", ch.freq_ghz}, {"edt_dbm", ch.edt_dbm}, {"cst_dbm", ch.cst_dbm},
                      {"noise_dbm", ch.noise_dbm}};
    const auto& m = s.mac;
    doc["mac"] = {{"cw_min", m.cw_min},
                  {"cw_max", m.cw_max},
                  {"slot_us", m.slot_us},
                  {"difs_us", m.difs_us},
                  {"sifs_us", m.sifs_us},
                  {"phy_header_bits", m.phy_header_bits},
                  {"mac_header_bits", m.mac_header_bits},
                  {"ack_bits", m.ack_bits},
                  {"payload_bits", m.payload_bits},
                  {"max_pdu", m.max_pdu},
                  {"phy_rate_mbps", m.phy_rate_mbps},
                  {"ack_rate_mbps", m.ack_rate_mbps},
                  {"header_rate_mbps", m.header_rate_mbps},
                  {"max_retry", m.max_retry}};
    doc["lte"] = {{"rate_mbps", s.lte.rate_mbps}, {"t_frame_us", s.lte.t_frame_s * 1e6}};
    return doc.dump(2) + "\n";
}

void save_scenario(const std::string& path, const Scenario& scenario)
{
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path + "'");
    out << dump_scenario(scenario);
}

}  // namespace coex
