// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria mix exact checks, closed forms, and an independent
// enumeration oracle; runtime-limited checks are timed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "fogsim/runner.hpp"
#include "fogsim/sim.hpp"
#include "helpers.hpp"
#include "oracle.hpp"

using namespace fogsim;
using namespace fogsim::test;

namespace {

int failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail = "") {
    std::printf("[%s] criterion %d: %s%s%s\n", pass ? "PASS" : "FAIL", number, name.c_str(),
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// random connected topology with 3..8 nodes
Topology random_topology(std::mt19937_64& rng) {
    std::size_t n = 3 + rng() % 6;
    std::vector<FogNode> nodes;
    std::uniform_real_distribution<double> coord(0, 1000);
    for (NodeId i = 0; i < n; ++i)
        nodes.push_back({i, {coord(rng), coord(rng)}, "EU", 1u << 30, 1.0});
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId i = 1; i < n; ++i) edges.emplace_back(static_cast<NodeId>(rng() % i), i);
    for (std::size_t extra = rng() % n; extra > 0; --extra) {
        NodeId a = static_cast<NodeId>(rng() % n);
        NodeId b = static_cast<NodeId>(rng() % n);
        if (a != b) edges.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::vector<std::vector<double>> lat(n, std::vector<double>(n, 25.0));
    for (std::size_t i = 0; i < n; ++i) lat[i][i] = 1.0;
    return Topology(std::move(nodes), both_ways(edges), std::move(lat));
}

bool in_candidates(const Topology& topo, NodeId current, NodeId n) {
    auto c = topo.candidate_set(current);
    return std::find(c.begin(), c.end(), n) != c.end();
}

void criterion1_support_invariant() {
    auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2024);
    std::size_t violations = 0;
    for (int iter = 0; iter < 1000; ++iter) {
        Topology topo = random_topology(rng);
        TransitionModel model(1.0);
        NodeId at = static_cast<NodeId>(rng() % topo.size());
        std::vector<GeoHint> hints;
        double t = 0;
        for (int step = 0; step < 25; ++step) {
            t += 1.0 + rng() % 10;
            if (rng() % 8 == 0) {  // teleport
                NodeId to = static_cast<NodeId>(rng() % topo.size());
                model.update({0, at, to, t, !topo.is_adjacent_move(at, to)}, topo);
                at = to;
            } else {
                const auto& nb = topo.adjacent_set(at);
                NodeId to = nb[rng() % nb.size()];
                model.update({0, at, to, t, false}, topo);
                at = to;
            }
            if (rng() % 3 == 0) model.observe_dwell(at, topo);
            if (rng() % 4 == 0)
                hints.push_back({static_cast<NodeId>(rng() % topo.size()), t, t + 50.0, 0.5});
        }
        double horizon = 10.0 + rng() % 50;
        auto markov = model.predict(at, topo);
        std::vector<VelocitySample> samples = {
            {t - 10, topo.node(at).position},
            {t, topo.node(at).position + Vec2{static_cast<double>(rng() % 200), static_cast<double>(rng() % 200)}}};
        auto direction = direction_predict(samples, at, horizon, topo);
        auto hint = hint_predict(hints, t, at, horizon, topo);
        Prediction combined = combine(markov, direction, hint, {1.0, 0.5, 2.0});
        for (const Prediction* p : {&std::as_const(markov), &std::as_const(combined)}) {
            double mass = 0;
            for (const auto& [n, v] : p->distribution) {
                if (!in_candidates(topo, at, n)) ++violations;
                mass += v;
            }
            if (std::abs(mass - 1.0) > 1e-9) ++violations;
        }
        if (direction)
            for (const auto& [n, v] : direction->distribution)
                if (!in_candidates(topo, at, n)) ++violations;
        if (hint)
            for (const auto& [n, v] : hint->distribution)
                if (!in_candidates(topo, at, n)) ++violations;
    }
    double dt = seconds_since(t0);
    report(1, "adjacency support invariant over 1000 fuzzed histories",
           violations == 0 && dt < 10.0,
           std::to_string(violations) + " violations, " + std::to_string(dt) + " s");
}

// topology whose node 0 has a candidate set of size m (star with m-1 leaves)
Topology star(std::size_t leaves) {
    std::vector<FogNode> nodes;
    nodes.push_back({0, {0, 0}, "EU", 1u << 30, 1.0});
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId i = 1; i <= leaves; ++i) {
        double ang = 2 * 3.14159265358979 * i / leaves;
        nodes.push_back({i, {100 * std::cos(ang), 100 * std::sin(ang)}, "EU", 1u << 30, 1.0});
        edges.emplace_back(0, i);
    }
    std::size_t n = nodes.size();
    std::vector<std::vector<double>> lat(n, std::vector<double>(n, 20.0));
    for (std::size_t i = 0; i < n; ++i) lat[i][i] = 1.0;
    return Topology(std::move(nodes), both_ways(edges), std::move(lat));
}

void criterion2_markov_closed_form() {
    bool ok = true;
    std::ostringstream detail;
    for (int m : {2, 3, 5}) {
        Topology topo = star(m - 1);  // node 0: m-1 neighbors + itself
        for (int n : {1, 5, 50}) {
            TransitionModel model(1.0);
            for (int i = 0; i < n; ++i) model.update({0, 0, 1, 1.0 * i, false}, topo);
            double got = model.predict(0, topo).distribution.at(1);
            double want = (n + 1.0) / (n + m);
            if (std::abs(got - want) > 1e-12) {
                ok = false;
                detail << " n=" << n << " m=" << m << " got " << got << " want " << want;
            }
        }
    }
    report(2, "Markov closed form (n+1)/(n+m) at alpha=1", ok, detail.str());
}

struct CommuterSetup {
    Topology topo;
    std::vector<TraceRow> trace;
    std::vector<Keygroup> keygroups;
    CostParams costs;
    PredictorParams predictor;
    SimParams sim;
};

CommuterSetup commuter_scenario(const char* zone2 = "EU") {
    CommuterSetup s{triangle(zone2), {}, {keygroup(0, 1'000'000, 0, 0)}, {}, {}, {}};
    CommuterParams p;
    p.node_sequence = {0, 1, 2};
    p.dwell_s = 100;
    p.access_interval_s = 10;
    p.cycles = 10;
    s.trace = gen_cyclic_commuter(p, s.topo);
    s.costs.c_net = 1e-6;       // replication cost 1.0
    s.costs.c_latency = 1.0;    // strongly latency-averse
    s.costs.eviction_idle_s = 120.0;
    s.sim.bandwidth_bytes_per_s = 1e5;  // 10 s transfer
    s.sim.audit = true;
    return s;
}

void criterion3_commuter_win() {
    auto t0 = std::chrono::steady_clock::now();
    CommuterSetup s = commuter_scenario();
    s.sim.measure_from_s = 900.0;  // 3-cycle warmup
    auto predictive =
        run_simulation(s.topo, s.keygroups, s.trace, "Predictive", s.costs, s.predictor, s.sim, 1);
    auto reactive =
        run_simulation(s.topo, s.keygroups, s.trace, "ReactiveFollowMe", s.costs, s.predictor, s.sim, 1);
    double dt = seconds_since(t0);
    bool ok = predictive.metrics.hit_ratio >= 0.95 && reactive.metrics.hit_ratio <= 0.92 && dt < 5.0;
    std::ostringstream detail;
    detail << "Predictive " << predictive.metrics.hit_ratio << " (>= 0.95), ReactiveFollowMe "
           << reactive.metrics.hit_ratio << " (<= 0.92), " << dt << " s";
    report(3, "cyclic-commuter win after warmup", ok, detail.str());
}

void criterion4_baseline_extremes() {
    CommuterSetup s = commuter_scenario();
    auto full = run_simulation(s.topo, s.keygroups, s.trace, "FullReplication", s.costs, s.predictor, s.sim, 1);
    auto none = run_simulation(s.topo, s.keygroups, s.trace, "NoReplication", s.costs, s.predictor, s.sim, 1);
    // exact expected hit fraction for NoReplication, counted from the trace
    std::uint64_t at_home = 0;
    for (const auto& row : s.trace)
        if (s.topo.closest_node({row.x, row.y}) == 0) ++at_home;
    double want_none = static_cast<double>(at_home) / s.trace.size();
    bool ok = full.metrics.hit_ratio == 1.0 && full.metrics.bytes_transferred == 2'000'000 &&
              none.metrics.hit_ratio == want_none && none.metrics.bytes_transferred == 0;
    std::ostringstream detail;
    detail << "Full hit " << full.metrics.hit_ratio << ", bytes " << full.metrics.bytes_transferred
           << " (want 2000000); None hit " << none.metrics.hit_ratio << " (want " << want_none << ")";
    report(4, "baseline extremes (FullReplication / NoReplication)", ok, detail.str());
}

void criterion5_zone_safety() {
    bool ok = true;
    std::ostringstream detail;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        CommuterSetup s = commuter_scenario("US");  // node 2 outside allowed zones
        for (const char* strategy : {"Predictive", "FullReplication", "ReactiveFollowMe", "NoReplication"}) {
            auto r = run_simulation(s.topo, s.keygroups, s.trace, strategy, s.costs, s.predictor, s.sim, seed);
            bool would_replicate = std::string(strategy) != "NoReplication";
            if (r.audit_violations != 0) {
                ok = false;
                detail << " audit violation under " << strategy << " seed " << seed;
            }
            if (would_replicate && r.metrics.restriction_denials == 0) {
                ok = false;
                detail << " no denial under " << strategy << " seed " << seed;
            }
        }
    }
    report(5, "zone safety: denials recorded, disallowed node never used", ok, detail.str());
}

void criterion6_decision_oracle() {
    auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> coef(0.0, 1.0);
    int matches = 0, total = 0;
    std::ostringstream detail;
    while (total < 100) {
        Topology topo = (rng() % 2) ? triangle() : line3();
        Store store(topo);
        NodeId home = static_cast<NodeId>(rng() % topo.size());
        store.add_keygroup(keygroup(0, 1 + rng() % 1'000'000, 0, home));
        RateEstimator rates(0.5);
        rates.update(0, 0, 0.2 + coef(rng) * 10);
        CostParams params;
        params.c_net = coef(rng) * 1e-6;
        params.c_store = coef(rng) * 1e-7;
        params.c_consistency = coef(rng);
        params.c_latency = coef(rng);
        params.sla_threshold_ms = coef(rng) * 30;
        params.c_sla = coef(rng);
        params.horizon_s = 1.0;
        params.replicate_margin = 1.0;
        params.eviction_idle_s = 1e9;
        NodeId current = static_cast<NodeId>(rng() % topo.size());
        Prediction pred;
        pred.horizon_s = 1.0;
        double mass = 0;
        for (NodeId c : topo.candidate_set(current)) {
            double m = coef(rng);
            pred.distribution[c] = m;
            mass += m;
        }
        if (mass <= 0) continue;
        for (auto& [n, m] : pred.distribution) m /= mass;
        ++total;
        std::map<ClientId, ClientView> views{{0, ClientView{0, current, pred}}};
        auto ds = decide(store, views, rates, topo, params, 0.0);
        std::set<NodeId> chosen;
        for (const auto& d : ds)
            if (d.action == Action::Replicate) chosen.insert(d.node);
        double ea = rates.expected_accesses(0, 0, 1.0).count;
        auto want = oracle_best_additions(store, store.keygroup(0), pred, ea, topo, params);
        if (chosen == want) {
            ++matches;
        } else if (detail.str().empty()) {
            detail << "first mismatch at instance " << total;
        }
    }
    double dt = seconds_since(t0);
    report(6, "decision engine matches enumeration oracle",
           matches == 100 && dt < 5.0,
           std::to_string(matches) + "/100 matches, " + std::to_string(dt) + " s" + detail.str());
}

void criterion7_determinism() {
    CommuterSetup s = commuter_scenario();
    bool ok = true;
    std::ostringstream detail;
    for (const char* strategy : {"Predictive", "ReactiveFollowMe", "FullReplication", "NoReplication"}) {
        auto a = run_simulation(s.topo, s.keygroups, s.trace, strategy, s.costs, s.predictor, s.sim, 42);
        auto b = run_simulation(s.topo, s.keygroups, s.trace, strategy, s.costs, s.predictor, s.sim, 42);
        std::string row_a = metrics_csv_row("accept", strategy, 42, a.metrics);
        std::string row_b = metrics_csv_row("accept", strategy, 42, b.metrics);
        std::hash<std::string> h;
        if (h(row_a) != h(row_b) || h(a.decisions_log) != h(b.decisions_log) || row_a != row_b ||
            a.decisions_log != b.decisions_log) {
            ok = false;
            detail << " mismatch under " << strategy;
        }
    }
    report(7, "same seed gives byte-identical CSV rows and decision logs", ok, detail.str());
}

void criterion8_rate_estimator() {
    bool ok = true;
    std::ostringstream detail;
    for (double beta : {0.05, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
        RateEstimator r(beta);
        for (int i = 0; i < 50; ++i) r.update(0, 0, 10.0);
        double lambda = *r.rate(0, 0);
        if (std::abs(lambda - 0.1) > 0.001) {  // within 1%
            ok = false;
            detail << " beta=" << beta << " lambda=" << lambda;
        }
    }
    report(8, "rate estimator converges to 0.100/s on constant 10 s intervals", ok, detail.str());
}

void criterion9_teleport_reset() {
    Topology topo = line3();
    TeleporterParams tp;
    tp.base.client = 0;
    tp.base.start_node = 0;
    tp.base.duration_s = 1000;
    tp.jump_times = {500.0};
    auto trace = gen_teleporter(tp, topo, 4);

    CostParams costs;
    costs.c_net = 1e-6;
    costs.c_latency = 1.0;
    SimParams sp;
    sp.bandwidth_bytes_per_s = 1e5;
    sp.audit = true;
    PredictorParams pp;
    auto strategy = make_strategy("Predictive");
    Simulator sim(topo, {keygroup()}, trace, *strategy, costs, pp, sp, 1);

    bool prior_ok = false, saw_teleport = false;
    NodeId prev_node = 0;
    while (auto ev = sim.step()) {
        if (ev->kind != EventKind::ClientMove) continue;
        NodeId now_node = topo.closest_node(ev->position);
        if (!saw_teleport && prev_node != now_node && !topo.is_adjacent_move(prev_node, now_node)) {
            saw_teleport = true;
            const TransitionModel* model = sim.transition_model(0);
            auto p = model->predict(now_node, topo);
            auto cand = topo.candidate_set(now_node);
            prior_ok = p.distribution.size() == cand.size();
            for (NodeId c : cand)
                if (std::abs(p.distribution.at(c) - 1.0 / cand.size()) > 1e-12) prior_ok = false;
        }
        prev_node = now_node;
    }
    RunResult r = sim.run();
    bool ok = saw_teleport && prior_ok && r.audit_violations == 0;
    std::ostringstream detail;
    detail << (saw_teleport ? "" : "no teleport observed; ")
           << (prior_ok ? "uniform prior after jump" : "prior not uniform") << ", audit violations "
           << r.audit_violations;
    report(9, "teleport resets the Markov context to the Laplace prior", ok, detail.str());
}

}  // namespace

int main() {
    criterion1_support_invariant();
    criterion2_markov_closed_form();
    criterion3_commuter_win();
    criterion4_baseline_extremes();
    criterion5_zone_safety();
    criterion6_decision_oracle();
    criterion7_determinism();
    criterion8_rate_estimator();
    criterion9_teleport_reset();
    if (failures) {
        std::printf("%d criterion(s) failed\n", failures);
        return 1;
    }
    std::printf("all acceptance criteria passed\n");
    return 0;
}
