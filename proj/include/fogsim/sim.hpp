#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fogsim/baselines.hpp"
#include "fogsim/client.hpp"
#include "fogsim/config.hpp"
#include "fogsim/placement.hpp"
#include "fogsim/predictor.hpp"
#include "fogsim/store.hpp"
#include "fogsim/topology.hpp"
#include "fogsim/trace.hpp"

namespace fogsim {

enum class EventKind { ClientMove, Access, ReportFlush, PredictTick, TransferComplete, End };

struct SimEvent {
    double at = 0.0;
    std::uint64_t seq = 0;  // tie-breaker, unique, insertion-ordered
    EventKind kind = EventKind::End;
    ClientId client = 0;
    KeygroupId keygroup = 0;
    NodeId node = 0;
    Vec2 position;
    std::optional<GeoHint> hint;
};

struct MetricsReport {
    std::uint64_t accesses = 0;
    double hit_ratio = 1.0;  // zero-access runs report 1.0 by convention
    double mean_latency_ms = 0.0;
    double p95_latency_ms = 0.0;
    std::uint64_t bytes_transferred = 0;
    double replica_seconds = 0.0;  // byte*seconds
    std::uint64_t wasted_replications = 0;
    double sla_violation_ratio = 0.0;
    std::uint64_t replicate_count = 0;
    std::uint64_t evict_count = 0;
    std::uint64_t hold_count = 0;
    std::uint64_t restriction_denials = 0;
};

struct RunResult {
    MetricsReport metrics;
    std::string decisions_log;  // one record per line
    std::uint64_t audit_violations = 0;
    std::uint64_t dropped_hints = 0;
};

inline constexpr const char* kMetricsCsvHeader =
    "scenario,strategy,seed,accesses,hit_ratio,mean_latency_ms,p95_latency_ms,bytes_transferred,"
    "replica_seconds,wasted_replications,sla_violation_ratio,replicate_count,evict_count,hold_count,"
    "restriction_denials";

inline std::string metrics_csv_row(const std::string& scenario, const std::string& strategy,
                                   std::uint64_t seed, const MetricsReport& m) {
    std::ostringstream os;
    os << scenario << ',' << strategy << ',' << seed << ',' << m.accesses << ','
       << detail::format_double(m.hit_ratio) << ',' << detail::format_double(m.mean_latency_ms) << ','
       << detail::format_double(m.p95_latency_ms) << ',' << m.bytes_transferred << ','
       << detail::format_double(m.replica_seconds) << ',' << m.wasted_replications << ','
       << detail::format_double(m.sla_violation_ratio) << ',' << m.replicate_count << ','
       << m.evict_count << ',' << m.hold_count << ',' << m.restriction_denials;
    return os.str();
}

// Deterministic discrete-event simulator. Events are processed in strict
// (at, seq) order; all randomness comes from the single seeded generator,
// so equal inputs give bit-identical outputs.
class Simulator {
public:
    Simulator(const Topology& topo, const std::vector<Keygroup>& keygroups,
              const std::vector<TraceRow>& trace, Strategy& strategy,
              const CostParams& costs, const PredictorParams& pred, const SimParams& params,
              std::uint64_t seed)
        : topo_(topo),
          store_(topo),
          strategy_(strategy),
          costs_(costs),
          pred_params_(pred),
          params_(params),
          rates_(pred.rate_beta),
          dwells_(pred.dwell_beta, pred.dwell_floor_s),
          rng_(seed) {
        for (const auto& kg : keygroups) store_.add_keygroup(kg, 0.0);
        validate_trace(trace, keygroups);
        double last_t = 0.0;
        for (const auto& row : trace) {
            SimEvent mv;
            mv.at = row.t;
            mv.kind = EventKind::ClientMove;
            mv.client = row.client_id;
            mv.position = {row.x, row.y};
            mv.hint = row.hint;
            push(mv);
            if (row.access_kg) {
                SimEvent ac;
                ac.at = row.t;
                ac.kind = EventKind::Access;
                ac.client = row.client_id;
                ac.keygroup = *row.access_kg;
                push(ac);
            }
            last_t = std::max(last_t, row.t);
        }
        end_time_ = params_.end_time_s > 0 ? params_.end_time_s : last_t;
        SimEvent tick;
        tick.at = params_.predict_interval_s;
        tick.kind = EventKind::PredictTick;
        push(tick);
        SimEvent end;
        end.at = end_time_;
        end.kind = EventKind::End;
        push(end);
        apply_decisions(strategy_.on_start(context(0.0, build_views(0.0))), 0.0);
        if (params_.audit) audit(0.0);
    }

    // Processes exactly one event; nullopt when the run is over.
    std::optional<SimEvent> step() {
        if (done_) return std::nullopt;
        if (queue_.empty()) {
            finish(end_time_);
            return std::nullopt;
        }
        SimEvent ev = queue_.top();
        queue_.pop();
        if (ev.at < last_event_t_) throw std::logic_error("event causality violated");
        last_event_t_ = ev.at;
        switch (ev.kind) {
            case EventKind::ClientMove: handle_move(ev); break;
            case EventKind::Access: handle_access(ev); break;
            case EventKind::ReportFlush: handle_report_flush(ev); break;
            case EventKind::PredictTick: handle_tick(ev); break;
            case EventKind::TransferComplete:
                store_.complete_transfer(ev.keygroup, ev.node, ev.at);
                break;
            case EventKind::End:
                finish(ev.at);
                return ev;
        }
        if (params_.audit) audit(ev.at);
        return ev;
    }

    RunResult run() {
        while (!done_ && step()) {
        }
        RunResult r;
        r.metrics = metrics_;
        r.decisions_log = log_.str();
        r.audit_violations = audit_violations_;
        r.dropped_hints = dropped_hints_;
        return r;
    }

    // diagnostics
    const Store& store() const { return store_; }
    const TransitionModel* transition_model(ClientId c) const {
        auto it = models_.find(c);
        return it == models_.end() ? nullptr : &it->second;
    }
    const RateEstimator& rates() const { return rates_; }

    void dump_predictor_state(std::ostream& os) const {
        for (const auto& [client, model] : models_) {
            os << "client " << client << "\n";
            model.dump(os);
        }
    }

private:
    struct ClientRuntime {
        std::unique_ptr<ClientMiddleware> mw;
        double section_entered_at = 0.0;
        std::optional<NodeId> last_tick_node;
        std::vector<VelocitySample> velocity_samples;  // from the latest report
        std::vector<GeoHint> active_hints;
        std::map<KeygroupId, double> last_access_at;
        bool flush_scheduled = false;
    };

    struct EventOrder {
        bool operator()(const SimEvent& a, const SimEvent& b) const {
            if (a.at != b.at) return a.at > b.at;
            return a.seq > b.seq;
        }
    };

    void validate_trace(const std::vector<TraceRow>& trace, const std::vector<Keygroup>& kgs) {
        std::set<KeygroupId> known;
        for (const auto& kg : kgs) known.insert(kg.id);
        for (const auto& row : trace) {
            if (row.access_kg && !known.count(*row.access_kg))
                throw std::invalid_argument("trace references unknown keygroup " + std::to_string(*row.access_kg));
            if (row.hint && row.hint->target >= topo_.size())
                throw std::invalid_argument("trace hint references unknown node " + std::to_string(row.hint->target));
        }
    }

    void push(SimEvent ev) {
        ev.seq = next_seq_++;
        queue_.push(ev);
    }

    ClientRuntime& runtime(ClientId id, Vec2 pos, double at) {
        auto it = clients_.find(id);
        if (it == clients_.end()) {
            ClientRuntime rt;
            rt.mw = std::make_unique<ClientMiddleware>(id, pos, at, topo_);
            rt.section_entered_at = at;
            it = clients_.emplace(id, std::move(rt)).first;
            models_.emplace(id, TransitionModel(pred_params_.alpha));
        }
        return it->second;
    }

    void handle_move(const SimEvent& ev) {
        ClientRuntime& rt = runtime(ev.client, ev.position, ev.at);
        auto tr = rt.mw->move_to(ev.position, ev.at, topo_);
        if (ev.hint) rt.mw->submit_hint(*ev.hint);
        if (!rt.flush_scheduled) {
            schedule_flush(ev.client, ev.at + params_.report_interval_s);
            rt.flush_scheduled = true;
        }
        if (tr) {
            dwells_.observe(ev.client, ev.at - rt.section_entered_at);
            rt.section_entered_at = ev.at;
            deliver_report(rt, rt.mw->flush_report(ev.at), ev.at);
            auto views = build_views(ev.at);
            apply_decisions(strategy_.on_transition(context(ev.at, views), *tr), ev.at);
            // a report carrying a transition triggers an immediate tick
            rt.last_tick_node = rt.mw->current_node();
            apply_decisions(strategy_.on_tick(context(ev.at, views)), ev.at);
        }
    }

    void handle_access(const SimEvent& ev) {
        auto it = clients_.find(ev.client);
        if (it == clients_.end())
            throw std::logic_error("access before any position sample for client " + std::to_string(ev.client));
        ClientRuntime& rt = it->second;
        rt.mw->record_access(ev.keygroup, AccessKind::Read, ev.at);
        auto la = rt.last_access_at.find(ev.keygroup);
        if (la != rt.last_access_at.end() && ev.at > la->second)
            rates_.update(ev.client, ev.keygroup, ev.at - la->second);
        rt.last_access_at[ev.keygroup] = ev.at;
        AccessOutcome out = store_.route_access(rt.mw->current_node(), ev.keygroup, AccessKind::Read, ev.at);
        if (ev.at >= params_.measure_from_s) {
            total_accesses_ += 1;
            if (out.hit) hits_ += 1;
            latencies_.push_back(out.latency_ms);
            if (costs_.sla_threshold_ms > 0 && out.latency_ms > costs_.sla_threshold_ms) sla_violations_ += 1;
        }
        if (!out.hit) {
            auto views = build_views(ev.at);
            apply_decisions(
                strategy_.on_access_miss(context(ev.at, views), ev.client, ev.keygroup, rt.mw->current_node()),
                ev.at);
        }
    }

    void schedule_flush(ClientId client, double at) {
        SimEvent ev;
        ev.at = at;
        ev.kind = EventKind::ReportFlush;
        ev.client = client;
        push(ev);
    }

    void handle_report_flush(const SimEvent& ev) {
        auto it = clients_.find(ev.client);
        if (it != clients_.end())
            deliver_report(it->second, it->second.mw->flush_report(ev.at), ev.at);
        if (ev.at < end_time_) schedule_flush(ev.client, ev.at + params_.report_interval_s);
    }

    void deliver_report(ClientRuntime& rt, MiddlewareReport report, double now) {
        auto& model = models_.at(report.client);
        for (const auto& tr : report.transitions) model.update(tr, topo_);
        rt.velocity_samples = std::move(report.velocity_samples);
        dropped_hints_ += report.dropped_hints;
        for (const auto& h : report.hints) rt.active_hints.push_back(h);
        std::erase_if(rt.active_hints, [now](const GeoHint& h) { return h.window_end < now; });
    }

    void handle_tick(const SimEvent& ev) {
        for (auto& [id, rt] : clients_) {
            NodeId node = rt.mw->current_node();
            if (rt.last_tick_node && *rt.last_tick_node == node)
                models_.at(id).observe_dwell(node, topo_);  // dwell is learnable
            rt.last_tick_node = node;
        }
        apply_decisions(strategy_.on_tick(context(ev.at, build_views(ev.at))), ev.at);
        if (ev.at + params_.predict_interval_s <= end_time_) {
            SimEvent next;
            next.at = ev.at + params_.predict_interval_s;
            next.kind = EventKind::PredictTick;
            push(next);
        }
    }

    std::map<ClientId, ClientView> build_views(double now) {
        std::map<ClientId, ClientView> views;
        for (auto& [id, rt] : clients_) {
            NodeId node = rt.mw->current_node();
            double horizon = dwells_.horizon(id);
            std::erase_if(rt.active_hints, [now](const GeoHint& h) { return h.window_end < now; });
            auto markov = models_.at(id).predict(node, topo_);
            auto direction = direction_predict(rt.velocity_samples, node, horizon, topo_);
            auto hint = hint_predict(rt.active_hints, now, node, horizon, topo_, &skipped_hints_);
            Prediction combined = combine(markov, direction, hint, pred_params_.weights);
            combined.horizon_s = horizon;
            views[id] = ClientView{id, node, std::move(combined)};
        }
        return views;
    }

    StrategyContext context(double now, const std::map<ClientId, ClientView>& views) {
        return StrategyContext{store_, topo_, costs_, views, rates_, now};
    }

    void apply_decisions(const std::vector<PlacementDecision>& decisions, double now) {
        for (PlacementDecision d : decisions) {
            if (d.action == Action::Replicate) {
                if (store_.has_replica(d.keygroup, d.node)) {
                    d.action = Action::Hold;
                    d.reason = "already-replica";
                } else if (!store_.zone_allowed(d.keygroup, d.node)) {
                    d.action = Action::Hold;
                    d.reason = "restriction";
                    metrics_.restriction_denials += 1;
                } else if (store_.free_capacity(d.node) < store_.keygroup(d.keygroup).size) {
                    d.action = Action::Hold;
                    d.reason = "capacity";
                } else {
                    auto job = store_.create_replica(d.keygroup, d.node, now,
                                                     params_.bandwidth_bytes_per_s, params_.setup_delay_s);
                    if (job) {
                        metrics_.bytes_transferred += store_.keygroup(d.keygroup).size;
                        SimEvent tc;
                        tc.at = job->completes_at;
                        tc.kind = EventKind::TransferComplete;
                        tc.keygroup = d.keygroup;
                        tc.node = d.node;
                        push(tc);
                    }
                }
            } else if (d.action == Action::Evict) {
                const ReplicaMap& rm = store_.replica_map(d.keygroup);
                if (d.node == rm.primary) {
                    d.action = Action::Hold;
                    d.reason = "primary-protected";
                } else {
                    bool unused = false;
                    if (store_.remove_replica(d.keygroup, d.node, now, &unused)) {
                        if (unused) metrics_.wasted_replications += 1;
                    } else {
                        d.action = Action::Hold;
                        d.reason = "no-replica";
                    }
                }
            } else if (d.reason == "restriction") {
                metrics_.restriction_denials += 1;  // demoted upstream in decide()
            }
            switch (d.action) {
                case Action::Replicate: metrics_.replicate_count += 1; break;
                case Action::Evict: metrics_.evict_count += 1; break;
                case Action::Hold: metrics_.hold_count += 1; break;
            }
            log_ << detail::format_double(now) << ',' << d.keygroup << ',' << d.node << ','
                 << to_string(d.action) << ',' << detail::format_double(d.benefit) << ','
                 << detail::format_double(d.cost) << ',' << d.reason << "\n";
        }
    }

    void audit(double now) {
        (void)now;
        for (const auto& [kg_id, kg] : store_.keygroups()) {
            const ReplicaMap& rm = store_.replica_map(kg_id);
            if (!rm.replicas.count(rm.primary)) audit_violations_ += 1;
            if (rm.replicas.empty()) audit_violations_ += 1;
            for (const auto& [node, rep] : rm.replicas) {
                if (!store_.zone_allowed(kg, node)) audit_violations_ += 1;
            }
        }
        for (NodeId n = 0; n < topo_.size(); ++n) {
            if (store_.used_bytes()[n] > topo_.node(n).storage_capacity) audit_violations_ += 1;
        }
    }

    void finish(double at) {
        if (done_) return;
        done_ = true;
        metrics_.accesses = total_accesses_;
        metrics_.hit_ratio = total_accesses_ == 0 ? 1.0 : static_cast<double>(hits_) / total_accesses_;
        metrics_.sla_violation_ratio =
            total_accesses_ == 0 ? 0.0 : static_cast<double>(sla_violations_) / total_accesses_;
        if (!latencies_.empty()) {
            double sum = 0;
            for (double l : latencies_) sum += l;
            metrics_.mean_latency_ms = sum / latencies_.size();
            std::vector<double> sorted = latencies_;
            std::sort(sorted.begin(), sorted.end());
            std::size_t rank = static_cast<std::size_t>(std::ceil(0.95 * sorted.size()));
            metrics_.p95_latency_ms = sorted[rank == 0 ? 0 : rank - 1];  // nearest-rank
        }
        metrics_.replica_seconds = store_.replica_byte_seconds(at);
    }

    const Topology& topo_;
    Store store_;
    Strategy& strategy_;
    CostParams costs_;
    PredictorParams pred_params_;
    SimParams params_;
    RateEstimator rates_;
    DwellEstimator dwells_;
    std::mt19937_64 rng_;

    std::priority_queue<SimEvent, std::vector<SimEvent>, EventOrder> queue_;
    std::uint64_t next_seq_ = 0;
    double last_event_t_ = 0.0;
    double end_time_ = 0.0;
    bool done_ = false;

    std::map<ClientId, ClientRuntime> clients_;
    std::map<ClientId, TransitionModel> models_;

    MetricsReport metrics_;
    std::uint64_t total_accesses_ = 0;
    std::uint64_t hits_ = 0;
    std::uint64_t sla_violations_ = 0;
    std::vector<double> latencies_;
    std::ostringstream log_;
    std::uint64_t audit_violations_ = 0;
    std::uint64_t dropped_hints_ = 0;
    std::uint32_t skipped_hints_ = 0;
};

// One full run under a named strategy.
inline RunResult run_simulation(const Topology& topo, const std::vector<Keygroup>& keygroups,
                                const std::vector<TraceRow>& trace, const std::string& strategy_name,
                                const CostParams& costs, const PredictorParams& pred,
                                const SimParams& params, std::uint64_t seed) {
    auto strategy = make_strategy(strategy_name);
    Simulator sim(topo, keygroups, trace, *strategy, costs, pred, params, seed);
    return sim.run();
}

}  // namespace fogsim
