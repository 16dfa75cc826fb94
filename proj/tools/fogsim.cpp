// Experiment runner for the fog replica-placement simulator.
//
//   fogsim simulate <scenario-file> [--seed N] [--out-dir DIR] [--strategy NAME]
//   fogsim compare  <scenario-file>             (simulate + per-strategy summary)
//   fogsim gen-trace <kind> --topology FILE -o FILE [params]
//
// Kinds: cyclic_commuter | random_adjacent_waypoint | teleporter

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fogsim/config.hpp"
#include "fogsim/runner.hpp"
#include "fogsim/sim.hpp"
#include "fogsim/trace.hpp"

namespace {

int run_scenario_command(const std::string& scenario_path, const std::string& out_dir,
                         const std::string& strategy, std::int64_t seed, bool summary) {
    fogsim::Scenario s = fogsim::load_scenario(scenario_path);
    if (!out_dir.empty()) s.out_dir = out_dir;
    if (!strategy.empty()) s.strategies = {strategy};
    if (seed >= 0) s.seeds = {static_cast<std::uint64_t>(seed)};
    fogsim::MatrixResult r = fogsim::run_matrix(s);
    fogsim::write_matrix_outputs(s, r);
    std::cout << "wrote " << s.out_dir << "/metrics.csv (" << r.completed << "/" << r.total
              << " runs)\n";
    if (summary || s.strategies.size() > 1) std::cout << fogsim::summarize_matrix(r);
    if (!r.ok()) {
        std::cerr << "error: " << r.error << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fog replica-placement simulator"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir, strategy;
    std::int64_t seed = -1;

    auto add_run_flags = [&](CLI::App* cmd) {
        cmd->add_option("scenario", scenario_path, "scenario config file")->required();
        cmd->add_option("--out-dir", out_dir, "override output directory");
        cmd->add_option("--strategy", strategy, "run only this strategy");
        cmd->add_option("--seed", seed, "run only this seed");
    };
    CLI::App* simulate = app.add_subcommand("simulate", "run a scenario's strategy x seed matrix");
    add_run_flags(simulate);
    CLI::App* compare = app.add_subcommand("compare", "simulate with a multi-strategy summary");
    add_run_flags(compare);

    CLI::App* gen = app.add_subcommand("gen-trace", "generate a synthetic mobility trace");
    std::string kind, topology_path, out_file;
    std::uint64_t gen_seed = 1;
    std::vector<std::uint32_t> nodes;
    double dwell = 100.0, dwell_min = 50.0, dwell_max = 150.0, access_interval = 10.0, duration = 1000.0;
    std::uint32_t cycles = 10, client = 0, keygroup = 0, start_node = 0;
    std::vector<double> jump_times;
    gen->add_option("kind", kind, "cyclic_commuter | random_adjacent_waypoint | teleporter")->required();
    gen->add_option("--topology", topology_path, "topology config file")->required();
    gen->add_option("-o,--out", out_file, "output trace file")->required();
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--nodes", nodes, "node sequence (cyclic_commuter)");
    gen->add_option("--dwell", dwell, "dwell seconds per node (cyclic_commuter)");
    gen->add_option("--dwell-min", dwell_min, "min dwell seconds (waypoint kinds)");
    gen->add_option("--dwell-max", dwell_max, "max dwell seconds (waypoint kinds)");
    gen->add_option("--access-interval", access_interval, "seconds between accesses");
    gen->add_option("--duration", duration, "trace duration seconds (waypoint kinds)");
    gen->add_option("--cycles", cycles, "number of cycles (cyclic_commuter)");
    gen->add_option("--client", client, "client id");
    gen->add_option("--keygroup", keygroup, "keygroup id accessed");
    gen->add_option("--start-node", start_node, "start node (waypoint kinds)");
    gen->add_option("--jump-at", jump_times, "teleport times (teleporter)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return run_scenario_command(scenario_path, out_dir, strategy, seed, false);
        if (compare->parsed()) return run_scenario_command(scenario_path, out_dir, strategy, seed, true);

        fogsim::Topology topo = fogsim::load_topology_file(topology_path);
        std::vector<fogsim::TraceRow> rows;
        if (kind == "cyclic_commuter") {
            fogsim::CommuterParams p;
            p.client = client;
            p.node_sequence.assign(nodes.begin(), nodes.end());
            p.dwell_s = dwell;
            p.access_interval_s = access_interval;
            p.cycles = cycles;
            p.keygroup = keygroup;
            rows = fogsim::gen_cyclic_commuter(p, topo);
        } else if (kind == "random_adjacent_waypoint" || kind == "teleporter") {
            fogsim::WaypointParams p;
            p.client = client;
            p.start_node = start_node;
            p.duration_s = duration;
            p.dwell_min_s = dwell_min;
            p.dwell_max_s = dwell_max;
            p.access_interval_s = access_interval;
            p.keygroup = keygroup;
            if (kind == "teleporter") {
                rows = fogsim::gen_teleporter({p, jump_times}, topo, gen_seed);
            } else {
                rows = fogsim::gen_random_adjacent_waypoint(p, topo, gen_seed);
            }
        } else {
            std::cerr << "unknown trace kind: " << kind << "\n";
            return 2;
        }
        std::ofstream out(out_file, std::ios::trunc);
        if (!out) {
            std::cerr << "cannot write " << out_file << "\n";
            return 1;
        }
        out << fogsim::emit_trace(rows);
        std::cout << "wrote " << rows.size() << " rows to " << out_file << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
