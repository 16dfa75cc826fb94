#pragma once

#include <vector>

#include "fogsim/store.hpp"
#include "fogsim/topology.hpp"

namespace fogsim::test {

inline std::vector<std::pair<NodeId, NodeId>> both_ways(std::vector<std::pair<NodeId, NodeId>> edges) {
    std::vector<std::pair<NodeId, NodeId>> out;
    for (auto [a, b] : edges) {
        out.emplace_back(a, b);
        out.emplace_back(b, a);
    }
    return out;
}

// 0 -- 1 -- 2 on a line, uniform local latency 2ms.
inline Topology line3() {
    std::vector<FogNode> nodes = {
        {0, {0, 0}, "EU", 1u << 30, 2.0},
        {1, {100, 0}, "EU", 1u << 30, 2.0},
        {2, {200, 0}, "EU", 1u << 30, 2.0},
    };
    std::vector<std::vector<double>> lat = {
        {2, 20, 30},
        {20, 2, 20},
        {30, 20, 2},
    };
    return Topology(std::move(nodes), both_ways({{0, 1}, {1, 2}}), std::move(lat));
}

// Fully connected triangle.
inline Topology triangle(const char* zone2 = "EU") {
    std::vector<FogNode> nodes = {
        {0, {0, 0}, "EU", 1u << 30, 2.0},
        {1, {100, 0}, "EU", 1u << 30, 2.0},
        {2, {50, 87}, zone2, 1u << 30, 2.0},
    };
    std::vector<std::vector<double>> lat = {
        {2, 20, 20},
        {20, 2, 20},
        {20, 20, 2},
    };
    return Topology(std::move(nodes), both_ways({{0, 1}, {1, 2}, {0, 2}}), std::move(lat));
}

// 4-cycle 0-1-2-3-0.
inline Topology cycle4() {
    std::vector<FogNode> nodes = {
        {0, {0, 0}, "EU", 1u << 30, 2.0},
        {1, {100, 0}, "EU", 1u << 30, 2.0},
        {2, {100, 100}, "EU", 1u << 30, 2.0},
        {3, {0, 100}, "EU", 1u << 30, 2.0},
    };
    std::vector<std::vector<double>> lat = {
        {2, 20, 28, 20},
        {20, 2, 20, 28},
        {28, 20, 2, 20},
        {20, 28, 20, 2},
    };
    return Topology(std::move(nodes), both_ways({{0, 1}, {1, 2}, {2, 3}, {3, 0}}), std::move(lat));
}

inline Keygroup keygroup(KeygroupId id = 0, std::uint64_t size = 1'000'000, ClientId owner = 0,
                         NodeId home = 0) {
    Keygroup kg;
    kg.id = id;
    kg.size = size;
    kg.allowed_zones = {"EU"};
    kg.owner = owner;
    kg.home_node = home;
    return kg;
}

}  // namespace fogsim::test
