#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "fogsim/topology.hpp"

namespace fogsim {

using KeygroupId = std::uint32_t;
using ClientId = std::uint32_t;

enum class AccessKind { Read, Write };

struct RestrictionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Single-owner unit of replication.
struct Keygroup {
    KeygroupId id = 0;
    std::uint64_t size = 0;  // bytes
    std::set<Zone> allowed_zones;
    ClientId owner = 0;
    NodeId home_node = 0;  // primary is pinned here
};

struct Replica {
    NodeId node = 0;
    bool completed = true;
    double completes_at = 0.0;
    double created_at = 0.0;
    double last_access_at = 0.0;
    std::uint64_t accesses = 0;
};

struct ReplicaMap {
    NodeId primary = 0;
    std::map<NodeId, Replica> replicas;  // includes primary; in-flight entries too
};

struct AccessOutcome {
    NodeId served_by = 0;
    double latency_ms = 0.0;
    bool hit = false;  // served by the client's current-section node
};

struct TransferJob {
    KeygroupId keygroup = 0;
    NodeId node = 0;
    double completes_at = 0.0;
};

// Keygroups, their replica placement, and access routing to the nearest
// completed replica. Transfers reserve capacity immediately but a replica
// serves reads only once completed. Mutation is driven by the sim loop.
class Store {
public:
    explicit Store(const Topology& topo) : topo_(&topo), used_bytes_(topo.size(), 0) {}

    void add_keygroup(const Keygroup& kg, double now = 0.0) {
        if (kg.size == 0) throw std::invalid_argument("keygroup size must be > 0");
        if (kg.allowed_zones.empty()) throw std::invalid_argument("keygroup needs at least one allowed zone");
        if (keygroups_.count(kg.id)) throw std::invalid_argument("duplicate keygroup id");
        if (!zone_allowed(kg, kg.home_node))
            throw RestrictionError("home node zone not in allowed_zones for keygroup " + std::to_string(kg.id));
        if (free_capacity(kg.home_node) < kg.size)
            throw CapacityError("home node lacks capacity for keygroup " + std::to_string(kg.id));
        accrue(now);
        keygroups_.emplace(kg.id, kg);
        ReplicaMap rm;
        rm.primary = kg.home_node;
        Replica primary;
        primary.node = kg.home_node;
        primary.completed = true;
        primary.created_at = now;
        primary.last_access_at = now;
        rm.replicas.emplace(kg.home_node, primary);
        maps_.emplace(kg.id, rm);
        used_bytes_[kg.home_node] += kg.size;
        placed_bytes_ += kg.size;
    }

    const Keygroup& keygroup(KeygroupId id) const {
        auto it = keygroups_.find(id);
        if (it == keygroups_.end()) throw std::out_of_range("unknown keygroup " + std::to_string(id));
        return it->second;
    }

    const std::map<KeygroupId, Keygroup>& keygroups() const { return keygroups_; }

    const ReplicaMap& replica_map(KeygroupId id) const {
        auto it = maps_.find(id);
        if (it == maps_.end()) throw std::out_of_range("unknown keygroup " + std::to_string(id));
        return it->second;
    }

    bool has_replica(KeygroupId kg, NodeId node) const {
        const auto& rm = replica_map(kg);
        return rm.replicas.count(node) > 0;
    }

    bool zone_allowed(KeygroupId kg, NodeId node) const { return zone_allowed(keygroup(kg), node); }

    bool zone_allowed(const Keygroup& kg, NodeId node) const {
        return kg.allowed_zones.count(topo_->node(node).zone) > 0;
    }

    std::uint64_t free_capacity(NodeId node) const {
        std::uint64_t cap = topo_->node(node).storage_capacity;
        return cap > used_bytes_.at(node) ? cap - used_bytes_[node] : 0;
    }

    // Serves from the latency-minimal completed replica (ties: lowest id).
    // Writes apply at the serving node; sync to other replicas is modeled as
    // instantaneous metadata.
    AccessOutcome route_access(NodeId client_node, KeygroupId kg_id, AccessKind, double now) {
        auto& rm = maps_.at(map_checked(kg_id));
        NodeId best = rm.primary;
        double best_lat = topo_->latency_ms(client_node, rm.primary);
        for (auto& [node, rep] : rm.replicas) {
            if (!rep.completed) continue;
            double lat = topo_->latency_ms(client_node, node);
            if (lat < best_lat || (lat == best_lat && node < best)) {
                best_lat = lat;
                best = node;
            }
        }
        auto& served = rm.replicas.at(best);
        served.last_access_at = now;
        served.accesses += 1;
        return AccessOutcome{best, best_lat, best == client_node};
    }

    // Reserves capacity now; the replica becomes servable at completes_at
    // (the caller signals that via complete_transfer). nullopt = duplicate.
    std::optional<TransferJob> create_replica(KeygroupId kg_id, NodeId node, double now,
                                              double bandwidth_bytes_per_s, double setup_delay_s) {
        const Keygroup& kg = keygroup(kg_id);
        auto& rm = maps_.at(kg_id);
        if (rm.replicas.count(node)) return std::nullopt;  // flagged no-op
        if (!zone_allowed(kg, node))
            throw RestrictionError("node " + std::to_string(node) + " zone not allowed for keygroup " + std::to_string(kg_id));
        if (free_capacity(node) < kg.size)
            throw CapacityError("node " + std::to_string(node) + " lacks capacity for keygroup " + std::to_string(kg_id));
        if (bandwidth_bytes_per_s <= 0) throw std::invalid_argument("bandwidth must be > 0");
        accrue(now);
        Replica rep;
        rep.node = node;
        rep.completed = false;
        rep.created_at = now;
        rep.completes_at = now + setup_delay_s + static_cast<double>(kg.size) / bandwidth_bytes_per_s;
        rep.last_access_at = now;
        rm.replicas.emplace(node, rep);
        used_bytes_[node] += kg.size;
        placed_bytes_ += kg.size;
        return TransferJob{kg_id, node, rep.completes_at};
    }

    void complete_transfer(KeygroupId kg_id, NodeId node, double now) {
        auto& rm = maps_.at(map_checked(kg_id));
        auto it = rm.replicas.find(node);
        if (it == rm.replicas.end()) return;  // evicted while in flight
        it->second.completed = true;
        it->second.completes_at = now;
    }

    // Returns false for a flagged no-op (node holds no replica). Removing the
    // primary is an error. Out param reports whether the evicted replica was
    // never accessed.
    bool remove_replica(KeygroupId kg_id, NodeId node, double now, bool* was_unused = nullptr) {
        const Keygroup& kg = keygroup(kg_id);
        auto& rm = maps_.at(kg_id);
        if (node == rm.primary) throw std::logic_error("primary-protected: cannot remove primary replica");
        auto it = rm.replicas.find(node);
        if (it == rm.replicas.end()) return false;
        accrue(now);
        if (was_unused) *was_unused = (it->second.accesses == 0);
        rm.replicas.erase(it);
        used_bytes_[node] -= kg.size;
        placed_bytes_ -= kg.size;
        return true;
    }

    // byte*seconds of replica presence (reservations included), up to `now`.
    double replica_byte_seconds(double now) {
        accrue(now);
        return replica_byte_seconds_;
    }

    const std::vector<std::uint64_t>& used_bytes() const { return used_bytes_; }
    const Topology& topology() const { return *topo_; }

private:
    KeygroupId map_checked(KeygroupId id) const {
        if (!maps_.count(id)) throw std::out_of_range("unknown keygroup " + std::to_string(id));
        return id;
    }

    void accrue(double now) {
        if (now > last_accrual_) {
            replica_byte_seconds_ += static_cast<double>(placed_bytes_) * (now - last_accrual_);
            last_accrual_ = now;
        }
    }

    const Topology* topo_;
    std::map<KeygroupId, Keygroup> keygroups_;
    std::map<KeygroupId, ReplicaMap> maps_;
    std::vector<std::uint64_t> used_bytes_;  // replicas + reservations
    std::uint64_t placed_bytes_ = 0;
    double replica_byte_seconds_ = 0.0;
    double last_accrual_ = 0.0;
};

}  // namespace fogsim
