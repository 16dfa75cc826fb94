#pragma once

#include <cmath>
#include <cstdint>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fogsim {

using NodeId = std::uint32_t;
using Zone = std::string;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(Vec2 a, double s) { return {a.x * s, a.y * s}; }
    friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
};

inline double distance(Vec2 a, Vec2 b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

// A storage node. Its position induces the section (Voronoi cell) whose
// clients treat it as their closest node.
struct FogNode {
    NodeId id = 0;
    Vec2 position;
    Zone zone;
    std::uint64_t storage_capacity = 0;  // bytes
    double local_latency_ms = 0.0;       // client <-> own-section node
};

// Planar fog network: nodes, neighbor sections, and an explicit pairwise
// latency matrix (latency[a][b] = client at a accessing data held only at b).
// Immutable after construction; validate() reports every invariant breach.
class Topology {
public:
    Topology(std::vector<FogNode> nodes,
             std::vector<std::pair<NodeId, NodeId>> adjacency_pairs,
             std::vector<std::vector<double>> latency)
        : nodes_(std::move(nodes)),
          adjacency_pairs_(std::move(adjacency_pairs)),
          latency_(std::move(latency)),
          neighbor_sets_(nodes_.size()),
          neighbors_(nodes_.size()) {
        for (const auto& [a, b] : adjacency_pairs_) {
            if (a >= nodes_.size() || b >= nodes_.size() || a == b) continue;
            neighbor_sets_[a].insert(b);
            neighbor_sets_[b].insert(a);
        }
        for (NodeId n = 0; n < nodes_.size(); ++n) {
            neighbors_[n].assign(neighbor_sets_[n].begin(), neighbor_sets_[n].end());
        }
    }

    std::size_t size() const { return nodes_.size(); }

    const FogNode& node(NodeId id) const {
        check_id(id);
        return nodes_[id];
    }

    const std::vector<FogNode>& nodes() const { return nodes_; }

    NodeId closest_node(Vec2 position) const {
        NodeId best = 0;
        double best_d = distance(position, nodes_.at(0).position);
        for (NodeId n = 1; n < nodes_.size(); ++n) {
            double d = distance(position, nodes_[n].position);
            if (d < best_d) {
                best_d = d;
                best = n;  // ties keep the lowest id
            }
        }
        return best;
    }

    // Staying put counts as an adjacent move; skipping a section does not.
    bool is_adjacent_move(NodeId from, NodeId to) const {
        check_id(from);
        check_id(to);
        if (from == to) return true;
        return neighbor_sets_[from].count(to) > 0;
    }

    // Neighbors of node, ascending id, node itself excluded.
    const std::vector<NodeId>& adjacent_set(NodeId id) const {
        check_id(id);
        return neighbors_[id];
    }

    // Candidate set for next-node prediction: neighbors plus the node itself.
    std::vector<NodeId> candidate_set(NodeId id) const {
        check_id(id);
        std::vector<NodeId> c;
        c.reserve(neighbors_[id].size() + 1);
        bool placed = false;
        for (NodeId n : neighbors_[id]) {
            if (!placed && id < n) {
                c.push_back(id);
                placed = true;
            }
            c.push_back(n);
        }
        if (!placed) c.push_back(id);
        return c;
    }

    double latency_ms(NodeId from, NodeId to) const {
        check_id(from);
        check_id(to);
        return latency_[from][to];
    }

    double local_latency_ms(NodeId id) const { return node(id).local_latency_ms; }

    // Returns every invariant violation, not just the first. Empty = ok.
    std::vector<std::string> validate() const {
        std::vector<std::string> v;
        if (nodes_.empty()) {
            v.push_back("topology has no nodes");
            return v;
        }
        for (NodeId n = 0; n < nodes_.size(); ++n) {
            const FogNode& fn = nodes_[n];
            if (fn.id != n)
                v.push_back("node at index " + std::to_string(n) + " has id " + std::to_string(fn.id) + " (ids must be dense 0..N-1)");
            if (fn.storage_capacity == 0)
                v.push_back("node " + std::to_string(n) + ": storage_capacity must be > 0");
            if (fn.local_latency_ms < 0)
                v.push_back("node " + std::to_string(n) + ": negative local latency");
            if (fn.zone.empty())
                v.push_back("node " + std::to_string(n) + ": empty zone label");
            for (NodeId m = n + 1; m < nodes_.size(); ++m) {
                if (nodes_[n].position == nodes_[m].position)
                    v.push_back("nodes " + std::to_string(n) + " and " + std::to_string(m) + " share a position");
            }
        }
        std::set<std::pair<NodeId, NodeId>> directed;
        for (const auto& [a, b] : adjacency_pairs_) {
            if (a >= nodes_.size() || b >= nodes_.size()) {
                v.push_back("adjacency pair (" + std::to_string(a) + "," + std::to_string(b) + ") references unknown node");
                continue;
            }
            if (a == b) {
                v.push_back("self-loop adjacency at node " + std::to_string(a));
                continue;
            }
            directed.emplace(a, b);
        }
        for (const auto& [a, b] : directed) {
            if (!directed.count({b, a}))
                v.push_back("asymmetric adjacency: (" + std::to_string(a) + "," + std::to_string(b) + ") present without its reverse");
        }
        // connectivity via BFS from node 0
        {
            std::vector<bool> seen(nodes_.size(), false);
            std::queue<NodeId> q;
            q.push(0);
            seen[0] = true;
            std::size_t reached = 1;
            while (!q.empty()) {
                NodeId n = q.front();
                q.pop();
                for (NodeId m : neighbors_[n]) {
                    if (!seen[m]) {
                        seen[m] = true;
                        ++reached;
                        q.push(m);
                    }
                }
            }
            if (reached != nodes_.size())
                v.push_back("topology not connected: BFS from node 0 reaches " + std::to_string(reached) + " of " + std::to_string(nodes_.size()) + " nodes");
        }
        // latency matrix
        if (latency_.size() != nodes_.size()) {
            v.push_back("latency matrix has " + std::to_string(latency_.size()) + " rows, expected " + std::to_string(nodes_.size()));
        } else {
            for (NodeId a = 0; a < nodes_.size(); ++a) {
                if (latency_[a].size() != nodes_.size()) {
                    v.push_back("latency row " + std::to_string(a) + " has wrong length");
                    continue;
                }
                if (latency_[a][a] != nodes_[a].local_latency_ms)
                    v.push_back("latency[" + std::to_string(a) + "][" + std::to_string(a) + "] differs from node's local latency");
                for (NodeId b = 0; b < nodes_.size(); ++b) {
                    if (b == a || latency_[b].size() != nodes_.size()) continue;
                    if (latency_[a][b] != latency_[b][a])
                        v.push_back("latency[" + std::to_string(a) + "][" + std::to_string(b) + "] not symmetric");
                    if (latency_[a][b] <= nodes_[a].local_latency_ms)
                        v.push_back("remote faster than local: latency[" + std::to_string(a) + "][" + std::to_string(b) + "] <= local latency of " + std::to_string(a));
                }
            }
        }
        return v;
    }

    // Optional sanity check: declared adjacency vs. the Voronoi adjacency of
    // node positions, approximated on a sampling grid over the bounding box.
    // Returns warnings for declared edges whose sections never touch on the
    // grid. Advisory only; declared adjacency always wins.
    std::vector<std::string> voronoi_adjacency_warnings(int grid = 64) const {
        std::vector<std::string> w;
        if (nodes_.size() < 2 || grid < 2) return w;
        double min_x = nodes_[0].position.x, max_x = min_x;
        double min_y = nodes_[0].position.y, max_y = min_y;
        for (const auto& n : nodes_) {
            min_x = std::min(min_x, n.position.x);
            max_x = std::max(max_x, n.position.x);
            min_y = std::min(min_y, n.position.y);
            max_y = std::max(max_y, n.position.y);
        }
        double pad_x = (max_x - min_x) * 0.5 + 1.0;
        double pad_y = (max_y - min_y) * 0.5 + 1.0;
        min_x -= pad_x; max_x += pad_x;
        min_y -= pad_y; max_y += pad_y;
        std::vector<std::vector<NodeId>> cell(grid, std::vector<NodeId>(grid));
        for (int i = 0; i < grid; ++i) {
            for (int j = 0; j < grid; ++j) {
                Vec2 p{min_x + (max_x - min_x) * i / (grid - 1),
                       min_y + (max_y - min_y) * j / (grid - 1)};
                cell[i][j] = closest_node(p);
            }
        }
        std::set<std::pair<NodeId, NodeId>> touching;
        for (int i = 0; i < grid; ++i) {
            for (int j = 0; j < grid; ++j) {
                if (i + 1 < grid && cell[i][j] != cell[i + 1][j])
                    touching.emplace(std::min(cell[i][j], cell[i + 1][j]), std::max(cell[i][j], cell[i + 1][j]));
                if (j + 1 < grid && cell[i][j] != cell[i][j + 1])
                    touching.emplace(std::min(cell[i][j], cell[i][j + 1]), std::max(cell[i][j], cell[i][j + 1]));
            }
        }
        std::set<std::pair<NodeId, NodeId>> declared;
        for (const auto& [a, b] : adjacency_pairs_)
            if (a < nodes_.size() && b < nodes_.size() && a != b)
                declared.emplace(std::min(a, b), std::max(a, b));
        for (const auto& e : declared) {
            if (!touching.count(e))
                w.push_back("declared edge (" + std::to_string(e.first) + "," + std::to_string(e.second) + ") does not match Voronoi adjacency of positions");
        }
        return w;
    }

    const std::vector<std::pair<NodeId, NodeId>>& adjacency_pairs() const { return adjacency_pairs_; }

private:
    void check_id(NodeId id) const {
        if (id >= nodes_.size())
            throw std::out_of_range("unknown node id " + std::to_string(id));
    }

    std::vector<FogNode> nodes_;
    std::vector<std::pair<NodeId, NodeId>> adjacency_pairs_;  // as given in config
    std::vector<std::vector<double>> latency_;
    std::vector<std::set<NodeId>> neighbor_sets_;
    std::vector<std::vector<NodeId>> neighbors_;  // ascending, per node
};

}  // namespace fogsim
