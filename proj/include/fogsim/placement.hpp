#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fogsim/predictor.hpp"
#include "fogsim/store.hpp"
#include "fogsim/topology.hpp"

namespace fogsim {

// Replication-cost vs. opportunity-cost economics. The functional forms are
// linear in the coefficients so decisions stay desk-checkable.
struct CostParams {
    double c_net = 0.0;           // cost / byte transferred
    double c_store = 0.0;         // cost / (byte * second)
    double c_consistency = 0.0;   // cost / (replica * second)
    double c_latency = 0.0;       // cost / (ms * access)
    double sla_threshold_ms = 0.0;
    double c_sla = 0.0;           // cost / violating access
    double horizon_s = 60.0;
    double replicate_margin = 1.0;  // >= 1; hysteresis against churn
    double eviction_idle_s = 120.0;
    double resiliency_bonus = 0.0;  // flat benefit per extra replica
};

enum class Action { Replicate, Evict, Hold };

inline const char* to_string(Action a) {
    switch (a) {
        case Action::Replicate: return "Replicate";
        case Action::Evict: return "Evict";
        case Action::Hold: return "Hold";
    }
    return "?";
}

struct PlacementDecision {
    KeygroupId keygroup = 0;
    NodeId node = 0;
    Action action = Action::Hold;
    double benefit = 0.0;
    double cost = 0.0;
    std::string reason;
};

// Cost of creating and holding a replica of this keygroup for one horizon.
inline double replication_cost(const Keygroup& kg, const CostParams& p) {
    double size = static_cast<double>(kg.size);
    return p.c_net * size + (p.c_store * size + p.c_consistency) * p.horizon_s;
}

// Expected cost of NOT replicating at `node`, given the probability the
// client is there next and its expected access count over the horizon.
// local/best_remote are the access latencies with and without a replica
// at the node.
inline double opportunity_cost(double p_next, double expected_accesses,
                               double local_ms, double best_remote_ms,
                               const CostParams& p) {
    double delta = std::max(0.0, best_remote_ms - local_ms);
    double sla_hits = (best_remote_ms > p.sla_threshold_ms && p.sla_threshold_ms >= local_ms)
                          ? expected_accesses
                          : 0.0;
    return p_next * (expected_accesses * delta * p.c_latency + sla_hits * p.c_sla);
}

struct ClientView {
    ClientId client = 0;
    NodeId current_node = 0;
    Prediction prediction;  // combined, support within candidate set
};

// Replicate/Evict/Hold per (keygroup, candidate) under zone and capacity
// constraints. Constraint failures demote Replicate to Hold with a reason
// tag; output is ordered by keygroup id then node id.
inline std::vector<PlacementDecision> decide(const Store& store,
                                             const std::map<ClientId, ClientView>& clients,
                                             const RateEstimator& rates,
                                             const Topology& topo,
                                             const CostParams& params,
                                             double now) {
    std::vector<PlacementDecision> out;
    std::map<NodeId, std::uint64_t> pending_reservations;  // within this batch
    for (const auto& [kg_id, kg] : store.keygroups()) {
        auto cit = clients.find(kg.owner);
        if (cit == clients.end()) continue;
        const ClientView& view = cit->second;
        const ReplicaMap& rm = store.replica_map(kg_id);
        double horizon = view.prediction.horizon_s > 0 ? view.prediction.horizon_s : params.horizon_s;
        CostParams h_params = params;
        h_params.horizon_s = horizon;
        ExpectedAccesses ea = rates.expected_accesses(kg.owner, kg_id, horizon);
        double rep_cost = replication_cost(kg, h_params);

        for (const auto& [cand, p_next] : view.prediction.distribution) {
            PlacementDecision d;
            d.keygroup = kg_id;
            d.node = cand;
            d.cost = rep_cost;
            if (rm.replicas.count(cand)) {
                d.action = Action::Hold;
                d.reason = "already-replica";
                out.push_back(d);
                continue;
            }
            double best_remote = topo.latency_ms(cand, rm.primary);
            for (const auto& [rnode, rep] : rm.replicas) {
                if (!rep.completed) continue;
                best_remote = std::min(best_remote, topo.latency_ms(cand, rnode));
            }
            d.benefit = opportunity_cost(p_next, ea.count, topo.local_latency_ms(cand), best_remote, h_params) +
                        params.resiliency_bonus;
            if (!store.zone_allowed(kg, cand)) {
                d.action = Action::Hold;
                d.reason = "restriction";
            } else if (store.free_capacity(cand) < kg.size + pending_reservations[cand]) {
                d.action = Action::Hold;
                d.reason = "capacity";
            } else if (d.benefit > params.replicate_margin * d.cost) {
                d.action = Action::Replicate;
                d.reason = ea.cold ? "predicted(cold-rate)" : "predicted";
                pending_reservations[cand] += kg.size;
            } else {
                d.action = Action::Hold;
                d.reason = "uneconomic";
            }
            out.push_back(d);
        }

        // Evictions: idle non-primary replicas outside the prediction support,
        // never the owner's current node.
        for (const auto& [rnode, rep] : rm.replicas) {
            if (rnode == rm.primary || rnode == view.current_node) continue;
            if (view.prediction.distribution.count(rnode)) continue;
            if (now - rep.last_access_at > params.eviction_idle_s) {
                PlacementDecision d;
                d.keygroup = kg_id;
                d.node = rnode;
                d.action = Action::Evict;
                d.reason = "idle";
                out.push_back(d);
            }
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const PlacementDecision& a, const PlacementDecision& b) {
        if (a.keygroup != b.keygroup) return a.keygroup < b.keygroup;
        return a.node < b.node;
    });
    return out;
}

}  // namespace fogsim
