#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fogsim/config.hpp"
#include "fogsim/sim.hpp"
#include "fogsim/trace.hpp"

namespace fogsim {

struct MatrixCell {
    std::string strategy;
    std::uint64_t seed = 0;
    MetricsReport metrics;
    RunResult result;
};

struct MatrixResult {
    std::vector<MatrixCell> cells;
    std::string csv;  // full metrics CSV including header
    std::size_t completed = 0;
    std::size_t total = 0;
    std::string error;  // non-empty if a run failed

    bool ok() const { return error.empty() && completed == total; }
};

// Runs every (strategy, seed) pair in deterministic order. A failed run
// stops the matrix; the partial CSV carries a completed-runs marker.
inline MatrixResult run_matrix(const Scenario& s) {
    // fail on unknown strategy names before any run starts
    for (const auto& name : s.strategies) make_strategy(name);
    Topology topo = load_topology_file(s.topology_path);
    std::vector<TraceRow> trace = load_trace(s.trace_path);
    MatrixResult r;
    r.total = s.strategies.size() * s.seeds.size();
    std::ostringstream csv;
    csv << kMetricsCsvHeader << "\n";
    for (const auto& strategy : s.strategies) {
        for (std::uint64_t seed : s.seeds) {
            try {
                MatrixCell cell;
                cell.strategy = strategy;
                cell.seed = seed;
                cell.result = run_simulation(topo, s.keygroups, trace, strategy, s.costs, s.predictor,
                                             s.sim, seed);
                cell.metrics = cell.result.metrics;
                csv << metrics_csv_row(s.name, strategy, seed, cell.metrics) << "\n";
                r.cells.push_back(std::move(cell));
                r.completed += 1;
            } catch (const std::exception& e) {
                r.error = strategy + "/seed " + std::to_string(seed) + ": " + e.what();
                csv << "# incomplete: " << r.completed << " of " << r.total << " runs completed\n";
                r.csv = csv.str();
                return r;
            }
        }
    }
    r.csv = csv.str();
    return r;
}

// mean +/- stddev of hit_ratio and mean_latency per strategy.
inline std::string summarize_matrix(const MatrixResult& r) {
    struct Agg {
        std::vector<double> hit, lat;
    };
    std::map<std::string, Agg> by_strategy;
    std::vector<std::string> order;
    for (const auto& c : r.cells) {
        if (!by_strategy.count(c.strategy)) order.push_back(c.strategy);
        by_strategy[c.strategy].hit.push_back(c.metrics.hit_ratio);
        by_strategy[c.strategy].lat.push_back(c.metrics.mean_latency_ms);
    }
    auto mean_sd = [](const std::vector<double>& v) {
        double m = 0;
        for (double x : v) m += x;
        m /= v.empty() ? 1 : v.size();
        double var = 0;
        for (double x : v) var += (x - m) * (x - m);
        double sd = v.size() > 1 ? std::sqrt(var / (v.size() - 1)) : 0.0;
        return std::make_pair(m, sd);
    };
    std::ostringstream os;
    os << std::left << std::setw(18) << "strategy" << std::setw(22) << "hit_ratio"
       << "mean_latency_ms\n";
    os << std::fixed << std::setprecision(4);
    for (const auto& name : order) {
        const Agg& a = by_strategy.at(name);
        auto [hm, hs] = mean_sd(a.hit);
        auto [lm, ls] = mean_sd(a.lat);
        std::ostringstream hit, lat;
        hit << std::fixed << std::setprecision(4) << hm << " +/- " << hs;
        lat << std::fixed << std::setprecision(3) << lm << " +/- " << ls;
        os << std::left << std::setw(18) << name << std::setw(22) << hit.str() << lat.str() << "\n";
    }
    if (!r.error.empty()) os << "FAILED: " << r.error << "\n";
    return os.str();
}

// Writes metrics.csv and one decisions log per (strategy, seed) cell.
inline void write_matrix_outputs(const Scenario& s, const MatrixResult& r) {
    std::filesystem::create_directories(s.out_dir);
    {
        std::ofstream csv(std::filesystem::path(s.out_dir) / "metrics.csv", std::ios::trunc);
        csv << r.csv;
    }
    for (const auto& c : r.cells) {
        std::string name = "decisions_" + c.strategy + "_" + std::to_string(c.seed) + ".log";
        std::ofstream log(std::filesystem::path(s.out_dir) / name, std::ios::trunc);
        log << c.result.decisions_log;
    }
}

}  // namespace fogsim
