#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fogsim/placement.hpp"
#include "fogsim/store.hpp"
#include "fogsim/topology.hpp"

namespace fogsim {

// Sectioned key-value config: `[section]` headers, `key = value` lines,
// `#` comments. Values are strings; typed getters below.
class Config {
public:
    static Config parse(std::istream& in) {
        Config c;
        std::string line, section;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::string s = trim(line);
            if (s.empty() || s[0] == '#') continue;
            if (s.front() == '[' && s.back() == ']') {
                section = trim(s.substr(1, s.size() - 2));
                c.sections_[section];
                continue;
            }
            auto eq = s.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
            c.sections_[section][trim(s.substr(0, eq))] = trim(s.substr(eq + 1));
        }
        return c;
    }

    static Config load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open config file: " + path);
        return parse(in);
    }

    bool has_section(const std::string& s) const { return sections_.count(s) > 0; }
    bool has(const std::string& s, const std::string& k) const {
        auto it = sections_.find(s);
        return it != sections_.end() && it->second.count(k) > 0;
    }

    std::vector<std::string> section_names() const {
        std::vector<std::string> out;
        for (const auto& [name, _] : sections_) out.push_back(name);
        return out;
    }

    const std::string& get(const std::string& s, const std::string& k) const {
        auto it = sections_.find(s);
        if (it == sections_.end()) throw std::invalid_argument("missing config section [" + s + "]");
        auto kit = it->second.find(k);
        if (kit == it->second.end()) throw std::invalid_argument("missing config key " + s + "." + k);
        return kit->second;
    }

    std::string get_or(const std::string& s, const std::string& k, const std::string& def) const {
        return has(s, k) ? get(s, k) : def;
    }

    double get_double(const std::string& s, const std::string& k) const { return std::stod(get(s, k)); }
    double get_double_or(const std::string& s, const std::string& k, double def) const {
        return has(s, k) ? get_double(s, k) : def;
    }
    std::int64_t get_int(const std::string& s, const std::string& k) const { return std::stoll(get(s, k)); }
    std::int64_t get_int_or(const std::string& s, const std::string& k, std::int64_t def) const {
        return has(s, k) ? get_int(s, k) : def;
    }
    bool get_bool_or(const std::string& s, const std::string& k, bool def) const {
        if (!has(s, k)) return def;
        const std::string& v = get(s, k);
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw std::invalid_argument("bad boolean for " + s + "." + k + ": " + v);
    }

    std::vector<std::string> get_list(const std::string& s, const std::string& k) const {
        std::vector<std::string> out;
        std::string item;
        std::istringstream is(get(s, k));
        while (std::getline(is, item, ',')) {
            item = trim(item);
            if (!item.empty()) out.push_back(item);
        }
        return out;
    }

    static std::string trim(const std::string& s) {
        auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return "";
        auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

// Topology file: [node.N] entries, an [adjacency] pair list (`a-b`, each
// undirected edge once), and an N x N [latency] table (row.N lines).
inline Topology load_topology(const Config& c) {
    std::vector<FogNode> nodes;
    for (NodeId n = 0;; ++n) {
        std::string sec = "node." + std::to_string(n);
        if (!c.has_section(sec)) break;
        FogNode fn;
        fn.id = n;
        fn.position = {c.get_double(sec, "x"), c.get_double(sec, "y")};
        fn.zone = c.get(sec, "zone");
        fn.storage_capacity = static_cast<std::uint64_t>(c.get_int(sec, "capacity_bytes"));
        fn.local_latency_ms = c.get_double(sec, "local_latency_ms");
        nodes.push_back(fn);
    }
    if (nodes.empty()) throw std::invalid_argument("topology config has no [node.0] section");
    std::vector<std::pair<NodeId, NodeId>> pairs;
    for (const auto& pr : c.get_list("adjacency", "pairs")) {
        auto dash = pr.find('-');
        if (dash == std::string::npos) throw std::invalid_argument("bad adjacency pair: " + pr);
        NodeId a = static_cast<NodeId>(std::stoul(pr.substr(0, dash)));
        NodeId b = static_cast<NodeId>(std::stoul(pr.substr(dash + 1)));
        pairs.emplace_back(a, b);
        pairs.emplace_back(b, a);
    }
    std::vector<std::vector<double>> latency;
    for (NodeId n = 0; n < nodes.size(); ++n) {
        std::vector<double> row;
        for (const auto& v : c.get_list("latency", "row." + std::to_string(n)))
            row.push_back(std::stod(v));
        latency.push_back(std::move(row));
    }
    Topology topo(std::move(nodes), std::move(pairs), std::move(latency));
    auto violations = topo.validate();
    if (!violations.empty()) {
        std::string msg = "invalid topology:";
        for (const auto& v : violations) msg += "\n  " + v;
        throw std::invalid_argument(msg);
    }
    return topo;
}

inline Topology load_topology_file(const std::string& path) {
    return load_topology(Config::load(path));
}

struct PredictorParams {
    double alpha = 1.0;        // Laplace smoothing
    double rate_beta = 0.3;    // EWMA for inter-access intervals
    double dwell_beta = 0.3;   // EWMA for dwell durations
    double dwell_floor_s = 10.0;
    FusionWeights weights;
};

struct SimParams {
    double report_interval_s = 10.0;
    double predict_interval_s = 5.0;
    double bandwidth_bytes_per_s = 1e6;
    double setup_delay_s = 0.0;
    double measure_from_s = 0.0;  // warmup cutoff for access metrics
    double end_time_s = 0.0;      // 0 = run until last trace event
    bool audit = false;           // per-event invariant auditor
};

struct Scenario {
    std::string name;
    std::string topology_path;
    std::string trace_path;
    std::string out_dir = "out";
    std::vector<std::string> strategies;
    std::vector<std::uint64_t> seeds;
    std::vector<Keygroup> keygroups;
    CostParams costs;
    PredictorParams predictor;
    SimParams sim;
};

inline CostParams load_cost_params(const Config& c, const std::string& sec = "costs") {
    CostParams p;
    p.c_net = c.get_double_or(sec, "c_net", p.c_net);
    p.c_store = c.get_double_or(sec, "c_store", p.c_store);
    p.c_consistency = c.get_double_or(sec, "c_consistency", p.c_consistency);
    p.c_latency = c.get_double_or(sec, "c_latency", p.c_latency);
    p.sla_threshold_ms = c.get_double_or(sec, "sla_threshold_ms", p.sla_threshold_ms);
    p.c_sla = c.get_double_or(sec, "c_sla", p.c_sla);
    p.horizon_s = c.get_double_or(sec, "horizon_s", p.horizon_s);
    p.replicate_margin = c.get_double_or(sec, "replicate_margin", p.replicate_margin);
    p.eviction_idle_s = c.get_double_or(sec, "eviction_idle_s", p.eviction_idle_s);
    p.resiliency_bonus = c.get_double_or(sec, "resiliency_bonus", p.resiliency_bonus);
    return p;
}

// Scenario file; relative paths resolve against the scenario's directory.
inline Scenario load_scenario(const std::string& path) {
    Config c = Config::load(path);
    std::filesystem::path base = std::filesystem::path(path).parent_path();
    auto resolve = [&](const std::string& p) {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp.string() : (base / fp).string();
    };

    Scenario s;
    s.name = c.get_or("scenario", "name", std::filesystem::path(path).stem().string());
    s.topology_path = resolve(c.get("scenario", "topology"));
    s.trace_path = resolve(c.get("scenario", "trace"));
    s.out_dir = resolve(c.get_or("scenario", "out_dir", "out"));
    s.strategies = c.get_list("scenario", "strategies");
    for (const auto& seed : c.get_list("scenario", "seeds"))
        s.seeds.push_back(std::stoull(seed));
    if (s.seeds.empty()) throw std::invalid_argument("scenario needs at least one seed");
    if (s.strategies.empty()) throw std::invalid_argument("scenario needs at least one strategy");

    for (KeygroupId k = 0;; ++k) {
        std::string sec = "keygroup." + std::to_string(k);
        if (!c.has_section(sec)) break;
        Keygroup kg;
        kg.id = k;
        kg.size = static_cast<std::uint64_t>(c.get_int(sec, "size_bytes"));
        kg.owner = static_cast<ClientId>(c.get_int(sec, "owner_client"));
        kg.home_node = static_cast<NodeId>(c.get_int(sec, "home_node"));
        for (const auto& z : c.get_list(sec, "allowed_zones")) kg.allowed_zones.insert(z);
        s.keygroups.push_back(std::move(kg));
    }
    if (s.keygroups.empty()) throw std::invalid_argument("scenario has no [keygroup.0] section");

    s.costs = load_cost_params(c);
    s.predictor.alpha = c.get_double_or("predictor", "alpha", s.predictor.alpha);
    s.predictor.rate_beta = c.get_double_or("predictor", "beta", s.predictor.rate_beta);
    s.predictor.dwell_beta = c.get_double_or("predictor", "dwell_beta", s.predictor.dwell_beta);
    s.predictor.dwell_floor_s = c.get_double_or("predictor", "dwell_floor_s", s.predictor.dwell_floor_s);
    s.predictor.weights.markov = c.get_double_or("predictor", "w_markov", s.predictor.weights.markov);
    s.predictor.weights.direction = c.get_double_or("predictor", "w_direction", s.predictor.weights.direction);
    s.predictor.weights.hint = c.get_double_or("predictor", "w_hint", s.predictor.weights.hint);
    s.sim.report_interval_s = c.get_double_or("sim", "report_interval_s", s.sim.report_interval_s);
    s.sim.predict_interval_s = c.get_double_or("sim", "predict_interval_s", s.sim.predict_interval_s);
    s.sim.bandwidth_bytes_per_s = c.get_double_or("sim", "bandwidth_bytes_per_s", s.sim.bandwidth_bytes_per_s);
    s.sim.setup_delay_s = c.get_double_or("sim", "setup_delay_s", s.sim.setup_delay_s);
    s.sim.measure_from_s = c.get_double_or("sim", "measure_from_s", s.sim.measure_from_s);
    s.sim.end_time_s = c.get_double_or("sim", "end_time_s", s.sim.end_time_s);
    s.sim.audit = c.get_bool_or("sim", "audit", s.sim.audit);
    return s;
}

}  // namespace fogsim
