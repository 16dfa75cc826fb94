#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fogsim/store.hpp"
#include "fogsim/topology.hpp"

namespace fogsim {

// Application-supplied hint about future client location.
struct GeoHint {
    NodeId target = 0;
    double window_start = 0.0;
    double window_end = 0.0;
    double confidence = 0.0;  // in [0,1]
};

struct AccessRecord {
    ClientId client = 0;
    KeygroupId keygroup = 0;
    double at = 0.0;
    NodeId node = 0;
    AccessKind kind = AccessKind::Read;
};

struct NodeTransition {
    ClientId client = 0;
    NodeId from = 0;
    NodeId to = 0;
    double at = 0.0;
    bool teleport = false;  // sections were not adjacent
};

struct VelocitySample {
    double at = 0.0;
    Vec2 position;
};

// What the middleware relays to the current edge node. Raw position history
// stays on the client; only transitions, counts, hints, and the last k
// velocity samples leave it.
struct MiddlewareReport {
    ClientId client = 0;
    NodeId addressed_to = 0;
    double at = 0.0;
    std::vector<NodeTransition> transitions;
    std::map<KeygroupId, std::uint32_t> access_counts;  // since last report
    std::vector<GeoHint> hints;
    std::vector<VelocitySample> velocity_samples;
    std::uint32_t dropped_hints = 0;  // expired before delivery
};

// Thin client middleware: tracks position/section, records access metadata
// and geo-hints, and flushes periodic reports to the current edge node.
class ClientMiddleware {
public:
    static constexpr std::size_t kHistoryCapacity = 32;
    static constexpr std::size_t kVelocitySamples = 5;

    ClientMiddleware(ClientId id, Vec2 start, double at, const Topology& topo)
        : id_(id), position_(start), current_(topo.closest_node(start)) {
        push_history(at, start, current_);
    }

    ClientId id() const { return id_; }
    Vec2 position() const { return position_; }
    NodeId current_node() const { return current_; }

    std::optional<NodeTransition> move_to(Vec2 position, double at, const Topology& topo) {
        if (at < last_time_) throw std::invalid_argument("non-monotonic trace: time regression for client " + std::to_string(id_));
        position_ = position;
        NodeId node = topo.closest_node(position);
        push_history(at, position, node);
        if (node == current_) return std::nullopt;
        NodeTransition tr{id_, current_, node, at, !topo.is_adjacent_move(current_, node)};
        current_ = node;
        pending_transitions_.push_back(tr);
        return tr;
    }

    AccessRecord record_access(KeygroupId kg, AccessKind kind, double at) {
        if (at < last_time_) throw std::invalid_argument("non-monotonic trace: access time regression");
        last_time_ = at;
        AccessRecord rec{id_, kg, at, current_, kind};
        pending_counts_[kg] += 1;
        auto it = last_access_.find(kg);
        if (it != last_access_.end()) intervals_[kg].push_back(at - it->second);
        last_access_[kg] = at;
        return rec;
    }

    void submit_hint(const GeoHint& hint) {
        if (hint.window_start >= hint.window_end) throw std::invalid_argument("geo-hint window must have start < end");
        if (hint.confidence < 0.0 || hint.confidence > 1.0) throw std::invalid_argument("geo-hint confidence must be in [0,1]");
        pending_hints_.push_back(hint);
    }

    // Covers activity since the previous flush and resets the accumulators.
    MiddlewareReport flush_report(double now) {
        MiddlewareReport r;
        r.client = id_;
        r.addressed_to = current_;
        r.at = now;
        r.transitions = std::move(pending_transitions_);
        pending_transitions_.clear();
        r.access_counts = std::move(pending_counts_);
        pending_counts_.clear();
        for (const auto& h : pending_hints_) {
            if (h.window_end < now)
                r.dropped_hints += 1;
            else
                r.hints.push_back(h);
        }
        pending_hints_.clear();
        std::size_t take = std::min(kVelocitySamples, history_.size());
        for (std::size_t i = history_.size() - take; i < history_.size(); ++i)
            r.velocity_samples.push_back({history_[i].at, history_[i].position});
        return r;
    }

    // Inter-access interval series per keygroup, client-side only.
    const std::vector<double>& access_intervals(KeygroupId kg) const {
        static const std::vector<double> kEmpty;
        auto it = intervals_.find(kg);
        return it == intervals_.end() ? kEmpty : it->second;
    }

    struct HistoryEntry {
        double at;
        Vec2 position;
        NodeId node;
    };
    const std::deque<HistoryEntry>& history() const { return history_; }

private:
    void push_history(double at, Vec2 pos, NodeId node) {
        last_time_ = at;
        history_.push_back({at, pos, node});
        while (history_.size() > kHistoryCapacity) history_.pop_front();
    }

    ClientId id_;
    Vec2 position_;
    NodeId current_;
    double last_time_ = 0.0;
    std::deque<HistoryEntry> history_;
    std::vector<NodeTransition> pending_transitions_;
    std::map<KeygroupId, std::uint32_t> pending_counts_;
    std::vector<GeoHint> pending_hints_;
    std::map<KeygroupId, double> last_access_;
    std::map<KeygroupId, std::vector<double>> intervals_;
};

}  // namespace fogsim
