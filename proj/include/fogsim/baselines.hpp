#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fogsim/placement.hpp"

namespace fogsim {

struct StrategyContext {
    const Store& store;
    const Topology& topo;
    const CostParams& params;
    const std::map<ClientId, ClientView>& clients;
    const RateEstimator& rates;
    double now = 0.0;
};

// Placement strategy behind one interface; all strategies are filtered by
// the same zone/capacity constraints when their decisions are applied.
class Strategy {
public:
    virtual ~Strategy() = default;
    virtual std::string_view name() const = 0;

    virtual std::vector<PlacementDecision> on_start(const StrategyContext&) { return {}; }
    virtual std::vector<PlacementDecision> on_transition(const StrategyContext&, const NodeTransition&) { return {}; }
    virtual std::vector<PlacementDecision> on_access_miss(const StrategyContext&, ClientId, KeygroupId, NodeId) { return {}; }
    virtual std::vector<PlacementDecision> on_tick(const StrategyContext&) { return {}; }
};

class NoReplication final : public Strategy {
public:
    std::string_view name() const override { return "NoReplication"; }
};

// Replicates every keygroup everywhere at t=0. The constraint filter turns
// zone-disallowed targets into denials.
class FullReplication final : public Strategy {
public:
    std::string_view name() const override { return "FullReplication"; }

    std::vector<PlacementDecision> on_start(const StrategyContext& ctx) override {
        std::vector<PlacementDecision> out;
        for (const auto& [kg_id, kg] : ctx.store.keygroups()) {
            for (NodeId n = 0; n < ctx.topo.size(); ++n) {
                if (ctx.store.has_replica(kg_id, n)) continue;
                out.push_back({kg_id, n, Action::Replicate, 0.0, 0.0, "full-replication"});
            }
        }
        return out;
    }
};

// Replicates to the client's node on the first miss there; idle replicas
// left behind are evicted on ticks.
class ReactiveFollowMe final : public Strategy {
public:
    std::string_view name() const override { return "ReactiveFollowMe"; }

    std::vector<PlacementDecision> on_access_miss(const StrategyContext& ctx, ClientId,
                                                  KeygroupId kg, NodeId node) override {
        if (ctx.store.has_replica(kg, node)) return {};  // transfer already in flight
        return {{kg, node, Action::Replicate, 0.0, 0.0, "follow-me"}};
    }

    std::vector<PlacementDecision> on_tick(const StrategyContext& ctx) override {
        std::vector<PlacementDecision> out;
        for (const auto& [kg_id, kg] : ctx.store.keygroups()) {
            const ReplicaMap& rm = ctx.store.replica_map(kg_id);
            NodeId owner_at = rm.primary;
            auto cit = ctx.clients.find(kg.owner);
            if (cit != ctx.clients.end()) owner_at = cit->second.current_node;
            for (const auto& [rnode, rep] : rm.replicas) {
                if (rnode == rm.primary || rnode == owner_at) continue;
                if (ctx.now - rep.last_access_at > ctx.params.eviction_idle_s)
                    out.push_back({kg_id, rnode, Action::Evict, 0.0, 0.0, "idle"});
            }
        }
        return out;
    }
};

// The predictive engine: fused next-node prediction drives the cost model.
class Predictive final : public Strategy {
public:
    std::string_view name() const override { return "Predictive"; }

    std::vector<PlacementDecision> on_tick(const StrategyContext& ctx) override {
        return decide(ctx.store, ctx.clients, ctx.rates, ctx.topo, ctx.params, ctx.now);
    }
};

inline std::unique_ptr<Strategy> make_strategy(std::string_view name) {
    if (name == "NoReplication") return std::make_unique<NoReplication>();
    if (name == "FullReplication") return std::make_unique<FullReplication>();
    if (name == "ReactiveFollowMe") return std::make_unique<ReactiveFollowMe>();
    if (name == "Predictive") return std::make_unique<Predictive>();
    throw std::invalid_argument("unknown strategy: " + std::string(name));
}

}  // namespace fogsim
