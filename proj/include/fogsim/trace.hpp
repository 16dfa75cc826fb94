#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fogsim/client.hpp"
#include "fogsim/topology.hpp"

namespace fogsim {

// One mobility/access sample. Empty optional fields are emitted as empty
// CSV cells.
struct TraceRow {
    ClientId client_id = 0;
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    std::optional<KeygroupId> access_kg;
    std::optional<GeoHint> hint;

    bool operator==(const TraceRow& o) const {
        bool hints_equal = hint.has_value() == o.hint.has_value();
        if (hints_equal && hint) {
            hints_equal = hint->target == o.hint->target && hint->window_start == o.hint->window_start &&
                          hint->window_end == o.hint->window_end && hint->confidence == o.hint->confidence;
        }
        return client_id == o.client_id && t == o.t && x == o.x && y == o.y &&
               access_kg == o.access_kg && hints_equal;
    }
};

inline constexpr const char* kTraceHeader =
    "client_id,t,x,y,access_kg,hint_node,hint_start,hint_end,hint_conf";

namespace detail {

inline std::string format_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::runtime_error("double formatting failed");
    return std::string(buf, p);
}

inline double parse_double(const std::string& s) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw std::invalid_argument("bad numeric field: '" + s + "'");
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite field: '" + s + "'");
    return v;
}

inline std::uint32_t parse_u32(const std::string& s) {
    std::uint32_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw std::invalid_argument("bad integer field: '" + s + "'");
    return v;
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace detail

inline std::string emit_trace(const std::vector<TraceRow>& rows) {
    std::ostringstream os;
    os << kTraceHeader << "\n";
    for (const auto& r : rows) {
        os << r.client_id << ',' << detail::format_double(r.t) << ',' << detail::format_double(r.x)
           << ',' << detail::format_double(r.y) << ',';
        if (r.access_kg) os << *r.access_kg;
        os << ',';
        if (r.hint) {
            os << r.hint->target << ',' << detail::format_double(r.hint->window_start) << ','
               << detail::format_double(r.hint->window_end) << ','
               << detail::format_double(r.hint->confidence);
        } else {
            os << ",,,";
        }
        os << "\n";
    }
    return os.str();
}

inline std::vector<TraceRow> parse_trace(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty trace file");
    if (line != kTraceHeader) throw std::invalid_argument("bad trace header: '" + line + "'");
    std::vector<TraceRow> rows;
    std::map<ClientId, double> last_t;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto f = detail::split_csv(line);
        if (f.size() != 9)
            throw std::invalid_argument("trace line " + std::to_string(lineno) + ": expected 9 fields");
        TraceRow r;
        r.client_id = detail::parse_u32(f[0]);
        r.t = detail::parse_double(f[1]);
        r.x = detail::parse_double(f[2]);
        r.y = detail::parse_double(f[3]);
        if (!f[4].empty()) r.access_kg = detail::parse_u32(f[4]);
        bool any_hint = !f[5].empty() || !f[6].empty() || !f[7].empty() || !f[8].empty();
        if (any_hint) {
            GeoHint h;
            h.target = detail::parse_u32(f[5]);
            h.window_start = detail::parse_double(f[6]);
            h.window_end = detail::parse_double(f[7]);
            h.confidence = detail::parse_double(f[8]);
            r.hint = h;
        }
        auto it = last_t.find(r.client_id);
        if (it != last_t.end() && r.t < it->second)
            throw std::invalid_argument("trace line " + std::to_string(lineno) + ": time regression for client " +
                                        std::to_string(r.client_id));
        last_t[r.client_id] = r.t;
        rows.push_back(r);
    }
    return rows;
}

inline std::vector<TraceRow> load_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file: " + path);
    return parse_trace(in);
}

// ---- synthetic trace generators ----

struct CommuterParams {
    ClientId client = 0;
    std::vector<NodeId> node_sequence;
    double dwell_s = 100.0;
    double access_interval_s = 10.0;
    std::uint32_t cycles = 10;
    KeygroupId keygroup = 0;
};

// Client cycles a fixed node sequence, dwelling at each node and accessing
// its keygroup on a fixed cadence. Consecutive sequence nodes (wrap
// included) must be adjacent.
inline std::vector<TraceRow> gen_cyclic_commuter(const CommuterParams& p, const Topology& topo) {
    if (p.node_sequence.size() < 2) throw std::invalid_argument("cyclic_commuter needs >= 2 nodes");
    if (p.dwell_s <= 0 || p.access_interval_s <= 0) throw std::invalid_argument("dwell and access interval must be > 0");
    for (std::size_t i = 0; i < p.node_sequence.size(); ++i) {
        NodeId a = p.node_sequence[i];
        NodeId b = p.node_sequence[(i + 1) % p.node_sequence.size()];
        if (a == b || !topo.is_adjacent_move(a, b))
            throw std::invalid_argument("cyclic_commuter: nodes " + std::to_string(a) + " and " +
                                        std::to_string(b) + " are not adjacent");
    }
    std::vector<TraceRow> rows;
    double t = 0.0;
    for (std::uint32_t c = 0; c < p.cycles; ++c) {
        for (NodeId n : p.node_sequence) {
            Vec2 pos = topo.node(n).position;
            for (double off = 0.0; off < p.dwell_s; off += p.access_interval_s)
                rows.push_back({p.client, t + off, pos.x, pos.y, p.keygroup, std::nullopt});
            t += p.dwell_s;
        }
    }
    return rows;
}

struct WaypointParams {
    ClientId client = 0;
    NodeId start_node = 0;
    double duration_s = 1000.0;
    double dwell_min_s = 50.0;
    double dwell_max_s = 150.0;
    double access_interval_s = 10.0;
    KeygroupId keygroup = 0;
};

// Random adjacent waypoint: each dwell ends with a uniformly chosen move to
// a neighboring section, so every transition is adjacency-legal.
inline std::vector<TraceRow> gen_random_adjacent_waypoint(const WaypointParams& p, const Topology& topo,
                                                          std::uint64_t seed) {
    if (p.dwell_min_s <= 0 || p.dwell_max_s < p.dwell_min_s) throw std::invalid_argument("bad dwell range");
    if (p.access_interval_s <= 0) throw std::invalid_argument("access interval must be > 0");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dwell_dist(p.dwell_min_s, p.dwell_max_s);
    std::vector<TraceRow> rows;
    NodeId node = p.start_node;
    double t = 0.0;
    while (t < p.duration_s) {
        double dwell = dwell_dist(rng);
        Vec2 pos = topo.node(node).position;
        for (double off = 0.0; off < dwell && t + off < p.duration_s; off += p.access_interval_s)
            rows.push_back({p.client, t + off, pos.x, pos.y, p.keygroup, std::nullopt});
        t += dwell;
        const auto& nb = topo.adjacent_set(node);
        if (nb.empty()) break;
        std::uniform_int_distribution<std::size_t> pick(0, nb.size() - 1);
        node = nb[pick(rng)];
    }
    return rows;
}

struct TeleporterParams {
    WaypointParams base;
    std::vector<double> jump_times;  // reconnect at a non-adjacent node
};

// Adjacency-legal movement with configured teleports: at each jump time the
// client reconnects at a uniformly chosen non-adjacent node and continues
// the walk from there.
inline std::vector<TraceRow> gen_teleporter(const TeleporterParams& p, const Topology& topo,
                                            std::uint64_t seed) {
    const WaypointParams& b = p.base;
    if (b.dwell_min_s <= 0 || b.dwell_max_s < b.dwell_min_s) throw std::invalid_argument("bad dwell range");
    if (b.access_interval_s <= 0) throw std::invalid_argument("access interval must be > 0");
    std::vector<double> jumps = p.jump_times;
    std::sort(jumps.begin(), jumps.end());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dwell_dist(b.dwell_min_s, b.dwell_max_s);
    std::vector<TraceRow> rows;
    NodeId node = b.start_node;
    double t = 0.0;
    std::size_t next_jump = 0;
    bool any_far_pair = false;
    for (NodeId a = 0; a < topo.size() && !any_far_pair; ++a)
        for (NodeId n = 0; n < topo.size(); ++n)
            if (n != a && !topo.is_adjacent_move(a, n)) {
                any_far_pair = true;
                break;
            }
    if (!jumps.empty() && !any_far_pair)
        throw std::invalid_argument("teleporter: topology is fully connected, nowhere to jump");
    while (t < b.duration_s) {
        double dwell = dwell_dist(rng);
        bool jump = next_jump < jumps.size() && jumps[next_jump] < t + dwell;
        std::vector<NodeId> far;
        if (jump) {
            for (NodeId n = 0; n < topo.size(); ++n)
                if (n != node && !topo.is_adjacent_move(node, n)) far.push_back(n);
            if (far.empty()) jump = false;  // defer until the walk reaches a node with a far target
        }
        double seg_end = jump ? std::max(jumps[next_jump], t) : t + dwell;
        Vec2 pos = topo.node(node).position;
        for (double at = t; at < seg_end && at < b.duration_s; at += b.access_interval_s)
            rows.push_back({b.client, at, pos.x, pos.y, b.keygroup, std::nullopt});
        if (jump) {
            std::uniform_int_distribution<std::size_t> pick(0, far.size() - 1);
            node = far[pick(rng)];
            ++next_jump;
        } else {
            const auto& nb = topo.adjacent_set(node);
            if (nb.empty()) break;
            std::uniform_int_distribution<std::size_t> pick(0, nb.size() - 1);
            node = nb[pick(rng)];
        }
        t = seg_end;
    }
    return rows;
}

}  // namespace fogsim
