#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "fogsim/client.hpp"
#include "fogsim/topology.hpp"

namespace fogsim {

enum class PredictionSource { Markov, Direction, Hint, Combined };

inline const char* to_string(PredictionSource s) {
    switch (s) {
        case PredictionSource::Markov: return "markov";
        case PredictionSource::Direction: return "direction";
        case PredictionSource::Hint: return "hint";
        case PredictionSource::Combined: return "combined";
    }
    return "?";
}

// Next-node probability distribution. Support is always a subset of the
// current node's candidate set (its neighbors plus itself).
struct Prediction {
    double horizon_s = 0.0;
    std::map<NodeId, double> distribution;
    PredictionSource source = PredictionSource::Combined;

    double probability(NodeId n) const {
        auto it = distribution.find(n);
        return it == distribution.end() ? 0.0 : it->second;
    }
};

// Adjacency-constrained Markov model for one client. Counts only grow,
// except on teleport where the whole per-client context resets.
class TransitionModel {
public:
    explicit TransitionModel(double alpha = 1.0) : alpha_(alpha) {
        if (alpha <= 0) throw std::invalid_argument("smoothing alpha must be > 0");
    }

    void update(const NodeTransition& tr, const Topology& topo) {
        topo.node(tr.from);
        topo.node(tr.to);
        if (tr.teleport) {
            counts_.clear();  // reconnecting elsewhere: history no longer applies
            return;
        }
        counts_[tr.from][tr.to] += 1;
    }

    // A tick where the client stayed in its section: dwell is learnable too.
    void observe_dwell(NodeId node, const Topology& topo) {
        topo.node(node);
        counts_[node][node] += 1;
    }

    Prediction predict(NodeId current, const Topology& topo) const {
        std::vector<NodeId> candidates = topo.candidate_set(current);
        double total = alpha_ * static_cast<double>(candidates.size());
        auto row = counts_.find(current);
        if (row != counts_.end()) {
            for (NodeId c : candidates) {
                auto it = row->second.find(c);
                if (it != row->second.end()) total += static_cast<double>(it->second);
            }
        }
        Prediction p;
        p.source = PredictionSource::Markov;
        for (NodeId c : candidates) {
            double n = alpha_;
            if (row != counts_.end()) {
                auto it = row->second.find(c);
                if (it != row->second.end()) n += static_cast<double>(it->second);
            }
            p.distribution[c] = n / total;
        }
        return p;
    }

    std::uint64_t count(NodeId from, NodeId to) const {
        auto row = counts_.find(from);
        if (row == counts_.end()) return 0;
        auto it = row->second.find(to);
        return it == row->second.end() ? 0 : it->second;
    }

    bool empty() const { return counts_.empty(); }
    double alpha() const { return alpha_; }

    void dump(std::ostream& os) const {
        for (const auto& [from, row] : counts_) {
            os << from << ":";
            for (const auto& [to, n] : row) os << " " << to << "=" << n;
            os << "\n";
        }
    }

private:
    double alpha_;
    std::map<NodeId, std::map<NodeId, std::uint64_t>> counts_;
};

// Dead-reckoning: least-squares velocity from the report's position samples,
// projected over the horizon. Yields a point mass on the projected section,
// or nothing when the projection would skip a section.
inline std::optional<Prediction> direction_predict(const std::vector<VelocitySample>& samples,
                                                   NodeId current, double horizon_s,
                                                   const Topology& topo) {
    if (samples.size() < 2) return std::nullopt;
    double t0 = samples.front().at;
    double sum_t = 0, sum_tt = 0, sum_x = 0, sum_y = 0, sum_tx = 0, sum_ty = 0;
    for (const auto& s : samples) {
        double t = s.at - t0;
        sum_t += t;
        sum_tt += t * t;
        sum_x += s.position.x;
        sum_y += s.position.y;
        sum_tx += t * s.position.x;
        sum_ty += t * s.position.y;
    }
    double n = static_cast<double>(samples.size());
    double denom = n * sum_tt - sum_t * sum_t;
    if (denom <= 0) return std::nullopt;  // zero time span
    Vec2 v{(n * sum_tx - sum_t * sum_x) / denom, (n * sum_ty - sum_t * sum_y) / denom};
    Vec2 projected = samples.back().position + v * horizon_s;
    NodeId candidate = topo.closest_node(projected);
    if (candidate != current && !topo.is_adjacent_move(current, candidate))
        return std::nullopt;
    Prediction p;
    p.horizon_s = horizon_s;
    p.source = PredictionSource::Direction;
    p.distribution[candidate] = 1.0;
    return p;
}

// Applies the best hint whose window intersects [now, now+horizon] and whose
// target lies in the candidate set. Highest confidence wins, ties go to the
// earliest window. Non-adjacent targets are skipped (reported via out param
// for teleport/restriction analysis).
inline std::optional<Prediction> hint_predict(const std::vector<GeoHint>& hints, double now,
                                              NodeId current, double horizon_s,
                                              const Topology& topo,
                                              std::uint32_t* skipped_non_adjacent = nullptr) {
    const GeoHint* best = nullptr;
    for (const auto& h : hints) {
        if (h.window_end < now || h.window_start > now + horizon_s) continue;
        if (h.target != current && !topo.is_adjacent_move(current, h.target)) {
            if (skipped_non_adjacent) *skipped_non_adjacent += 1;
            continue;
        }
        if (!best || h.confidence > best->confidence ||
            (h.confidence == best->confidence && h.window_start < best->window_start))
            best = &h;
    }
    if (!best) return std::nullopt;
    Prediction p;
    p.horizon_s = horizon_s;
    p.source = PredictionSource::Hint;
    p.distribution[best->target] = best->confidence;
    p.distribution[current] += 1.0 - best->confidence;
    return p;
}

struct ExpectedAccesses {
    double count = 0.0;
    bool cold = false;  // no estimate yet
};

// Per-(client, keygroup) access-rate estimate from EWMA-smoothed
// inter-access intervals.
class RateEstimator {
public:
    explicit RateEstimator(double beta = 0.3) : beta_(beta) {
        if (beta <= 0 || beta > 1) throw std::invalid_argument("beta must be in (0,1]");
    }

    void update(ClientId client, KeygroupId kg, double interval_s) {
        if (interval_s <= 0) throw std::invalid_argument("inter-access interval must be > 0");
        auto& e = estimates_[{client, kg}];
        if (e.samples == 0)
            e.ewma_interval_s = interval_s;
        else
            e.ewma_interval_s = beta_ * interval_s + (1 - beta_) * e.ewma_interval_s;
        e.samples += 1;
    }

    // lambda = 1/ewma_interval, or nothing while cold.
    std::optional<double> rate(ClientId client, KeygroupId kg) const {
        auto it = estimates_.find({client, kg});
        if (it == estimates_.end() || it->second.samples == 0) return std::nullopt;
        return 1.0 / it->second.ewma_interval_s;
    }

    ExpectedAccesses expected_accesses(ClientId client, KeygroupId kg, double horizon_s) const {
        auto r = rate(client, kg);
        if (!r) return {0.0, true};
        return {*r * horizon_s, false};
    }

    double beta() const { return beta_; }

private:
    struct Estimate {
        double ewma_interval_s = 0.0;
        std::uint64_t samples = 0;
    };
    double beta_;
    std::map<std::pair<ClientId, KeygroupId>, Estimate> estimates_;
};

// EWMA of per-client section dwell durations; used as prediction horizon.
class DwellEstimator {
public:
    DwellEstimator(double beta = 0.3, double floor_s = 10.0) : beta_(beta), floor_s_(floor_s) {}

    void observe(ClientId client, double dwell_s) {
        if (dwell_s <= 0) return;
        auto& e = ewma_[client];
        e = (e == 0.0) ? dwell_s : beta_ * dwell_s + (1 - beta_) * e;
    }

    double horizon(ClientId client) const {
        auto it = ewma_.find(client);
        double h = it == ewma_.end() ? 0.0 : it->second;
        return std::max(h, floor_s_);
    }

private:
    double beta_;
    double floor_s_;
    std::map<ClientId, double> ewma_;
};

struct FusionWeights {
    double markov = 1.0;
    double direction = 0.5;
    double hint = 2.0;
};

// Pointwise weighted sum over the union of supports, renormalized. Absent
// sources contribute nothing; at least one input must be present with a
// positive weight.
inline Prediction combine(const std::optional<Prediction>& markov,
                          const std::optional<Prediction>& direction,
                          const std::optional<Prediction>& hint,
                          const FusionWeights& w) {
    if (w.markov < 0 || w.direction < 0 || w.hint < 0)
        throw std::invalid_argument("fusion weights must be >= 0");
    std::map<NodeId, double> acc;
    double total = 0.0;
    auto add = [&](const std::optional<Prediction>& p, double weight) {
        if (!p || weight == 0.0) return;
        for (const auto& [node, prob] : p->distribution) acc[node] += weight * prob;
        total += weight;
    };
    add(markov, w.markov);
    add(direction, w.direction);
    add(hint, w.hint);
    if (total == 0.0 || acc.empty())
        throw std::invalid_argument("combine: no prediction source present with positive weight");
    double sum = 0.0;
    for (const auto& [node, mass] : acc) sum += mass;
    Prediction p;
    p.source = PredictionSource::Combined;
    if (markov) p.horizon_s = markov->horizon_s;
    if (direction) p.horizon_s = direction->horizon_s;
    if (hint) p.horizon_s = hint->horizon_s;
    for (const auto& [node, mass] : acc) p.distribution[node] = mass / sum;
    return p;
}

}  // namespace fogsim
