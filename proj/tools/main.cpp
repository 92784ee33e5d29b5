// Command-line driver: run scenarios, sweep arrival rates, map feasible
// capacity regions, solve placements, demo replacement, and validate runs.
#include <cstdio>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dicnc/harness.hpp"

using namespace dicnc;

namespace {

Scenario resolve(const std::string& path) {
    if (path.empty() || path == "edge_grid") return edge_grid();
    return load_scenario(path);
}

// Quick oracle suite for `validate`: checks the optimizing components against
// independent exhaustive searches stated directly from their definitions.
// Returns the number of failed checks.
int run_oracle_suite() {
    int failures = 0;
    std::mt19937_64 rng(97);
    std::uniform_real_distribution<double> cap(0.5, 5.0);
    std::uniform_real_distribution<double> backlog(0.0, 50.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    // Route weight vs exhaustive enumeration of processing locations and
    // static sources over Bellman-Ford distances.
    int route_bad = 0;
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 3 + trial % 2;
        std::vector<Edge> edges;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) edges.push_back({i, j, cap(rng)});
        std::vector<double> proc(n);
        for (double& p : proc) p = cap(rng);
        NetworkGraph g(n, edges, proc, std::vector<double>(n, 2.0));
        CachingVector x(n, {1.0});
        x.set(static_cast<int>(rng() % n), 0, true);
        ServiceSpec spec;
        spec.functions = {{0.5 + 1.5 * u01(rng), 0.5 + 2.5 * u01(rng), 0, 2.0 * u01(rng)}};
        ServiceContext ctx(spec, x, g);
        Client client{0, static_cast<int>(rng() % n), static_cast<int>(rng() % n), 0, 1.0};
        VirtualQueues q(g);
        for (double& v : q.raw_node()) v = backlog(rng);
        for (double& v : q.raw_link()) v = backlog(rng);
        RouteEngine engine(g);
        engine.prepare(q);
        MinErResult r = engine.min_er(client, ctx);

        // Exhaustive: all-pairs shortest paths, then every processing node.
        const int E = g.edge_count();
        std::vector<std::vector<double>> d(n, std::vector<double>(n, kInf));
        for (int s0 = 0; s0 < n; ++s0) {
            d[s0][s0] = 0;
            for (int round = 0; round < n; ++round)
                for (int e = 0; e < E; ++e) {
                    const Edge& ed = g.edge(e);
                    double w = q.link_backlog(e) / (ed.capacity * ed.capacity);
                    if (d[s0][ed.from] < kInf)
                        d[s0][ed.to] = std::min(d[s0][ed.to], d[s0][ed.from] + w);
                }
        }
        const auto cum = cumulative_scaling(spec);
        double best = kInf;
        for (int at = 0; at < n; ++at) {
            double dv = kInf;
            for (int v : ctx.stage_sources[0]) dv = std::min(dv, d[v][at]);
            double w = cum[0] * d[client.source][at] + cum[0] * spec.functions[0].merging * dv +
                       cum[0] * spec.functions[0].workload * q.node_backlog(at) /
                           (g.proc_capacity(at) * g.proc_capacity(at)) +
                       cum[1] * d[at][client.destination];
            best = std::min(best, w);
        }
        const bool agree = (best == kInf) ? !r.feasible
                                          : r.feasible && std::abs(r.weight - best) <=
                                                              1e-9 * std::max(1.0, best);
        if (!agree) ++route_bad;
    }
    std::printf("oracle: route weight vs exhaustive enumeration  %s\n",
                route_bad == 0 ? "ok" : "FAIL");
    failures += route_bad != 0;

    // Knapsack DP vs exhaustive subset search.
    int ks_bad = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const int K = 10;
        std::vector<double> v(K), f(K);
        for (int k = 0; k < K; ++k) {
            v[k] = static_cast<double>(rng() % 40) / 4.0;
            f[k] = 1.0 + static_cast<double>(rng() % 6) / 2.0;
        }
        const double S = 3.0 + static_cast<double>(rng() % 11) / 2.0;
        double best = 0;
        for (unsigned mask = 0; mask < (1u << K); ++mask) {
            double tv = 0, tw = 0;
            for (int k = 0; k < K; ++k)
                if (mask & (1u << k)) tv += v[k], tw += f[k];
            if (tw <= S) best = std::max(best, tv);
        }
        if (knapsack_select(v, f, S).value != best) ++ks_bad;
    }
    std::printf("oracle: knapsack vs exhaustive subset search    %s\n",
                ks_bad == 0 ? "ok" : "FAIL");
    failures += ks_bad != 0;

    // Relaxed vs strict static-flow placement LP.
    int lp_bad = 0;
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 3 + trial % 2;
        std::vector<Edge> edges;
        for (int i = 0; i < n; ++i) {
            edges.push_back({i, (i + 1) % n, cap(rng) + 1});
            edges.push_back({(i + 1) % n, i, cap(rng) + 1});
        }
        std::vector<double> proc(n);
        for (double& p : proc) p = cap(rng) + 2;
        NetworkGraph g(n, edges, proc, std::vector<double>(n, 1.0));
        CachingVector x = random_placement(g, {1.0}, rng);
        ServiceSpec spec;
        spec.functions = {{1.0, 0.5 + u01(rng), 0, u01(rng)}};
        std::vector<Client> clients = {{0, 0, n - 1, 0, 1.0}};
        std::vector<ServiceSpec> services = {spec};
        double lin = eval_placement_lp(g, clients, services, x, StaticModel::Linearized).lambda;
        double strict =
            eval_placement_lp(g, clients, services, x, StaticModel::StrictEquality).lambda;
        if (std::abs(lin - strict) > 1e-6 * std::max(1.0, strict)) ++lp_bad;
    }
    std::printf("oracle: relaxed vs strict static-flow LP        %s\n",
                lp_bad == 0 ? "ok" : "FAIL");
    failures += lp_bad != 0;
    return failures;
}

struct Overrides {
    CLI::Option* seed = nullptr;
    CLI::Option* horizon = nullptr;
    CLI::Option* frame = nullptr;
    uint64_t seed_v = 0;
    long horizon_v = 0;
    long frame_v = 0;

    void attach(CLI::App* cmd) {
        seed = cmd->add_option("--seed", seed_v, "override the scenario RNG seed");
        horizon = cmd->add_option("--horizon", horizon_v, "override the run length in slots");
        frame = cmd->add_option("--frame", frame_v, "override the replacement frame length");
    }
    void apply(Scenario& s) const {
        if (seed->count()) s.seed = seed_v;
        if (horizon->count()) s.horizon = horizon_v;
        if (frame->count()) s.frame_length = frame_v;
    }
};

void print_summary(const Scenario& s, const RunResult& r) {
    std::printf("scenario %s hash %016llx\n", s.name.c_str(),
                static_cast<unsigned long long>(r.hash));
    std::printf("slots %ld delivered %ld dropped %ld\n", s.horizon, r.delivered, r.dropped);
    std::printf("mean_delay %.6g slots, backlog slope %.6g units/slot -> %s\n", r.mean_delay,
                r.backlog_slope, r.stable ? "stable" : "unstable");
    if (r.bytes_moved > 0)
        std::printf("replacement: %.6g units moved over %zu frame decisions\n", r.bytes_moved,
                    r.frames.size());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"slotted-time simulator and optimizer for joint compute/caching/"
                 "communication network control"};
    app.require_subcommand(1);
    int exit_code = 0;

    // simulate ---------------------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "run one scenario; write metrics + frame CSVs");
    std::string sim_scn = "edge_grid", sim_out = "run", sim_dump;
    sim->add_option("--scenario", sim_scn, "scenario JSON path or 'edge_grid'");
    sim->add_option("--out", sim_out, "output file prefix");
    sim->add_option("--dump-scenario", sim_dump, "write the resolved scenario JSON here");
    Overrides sim_ov;
    sim_ov.attach(sim);
    sim->callback([&] {
        Scenario s = resolve(sim_scn);
        sim_ov.apply(s);
        if (!sim_dump.empty()) write_file(sim_dump, scenario_to_json(s) + "\n");
        RunResult r = run_scenario(s);
        write_file(sim_out + "_metrics.csv", metrics_csv(s, r));
        write_file(sim_out + "_frames.csv", frame_log_csv(s, r));
        print_summary(s, r);
    });

    // sweep ------------------------------------------------------------------
    auto* swp = app.add_subcommand("sweep", "stability sweep over an arrival-rate grid");
    std::string swp_scn = "edge_grid", swp_out = "sweep.csv";
    std::vector<double> swp_grid;
    int swp_bisect = 0;
    swp->add_option("--scenario", swp_scn, "scenario JSON path or 'edge_grid'");
    swp->add_option("--out", swp_out, "output CSV path");
    swp->add_option("--lambda-grid", swp_grid, "arrival rates to test (units/slot)")
        ->required()
        ->delimiter(',');
    swp->add_option("--bisect", swp_bisect, "refinement iterations around the boundary");
    Overrides swp_ov;
    swp_ov.attach(swp);
    swp->callback([&] {
        Scenario s = resolve(swp_scn);
        swp_ov.apply(s);
        SweepResult r = stability_sweep(s, swp_grid);
        double boundary = r.boundary;
        if (swp_bisect > 0 && boundary > 0) {
            double hi = 0;
            for (const SweepPoint& p : r.points)
                if (!p.stable && p.lambda > boundary) {
                    hi = p.lambda;
                    break;
                }
            if (hi > 0) boundary = bisect_boundary(s, boundary, hi, swp_bisect);
        }
        write_file(swp_out, sweep_csv(s, r));
        std::printf("boundary %.6g units/slot (%zu grid points)\n", boundary, r.points.size());
    });

    // region -----------------------------------------------------------------
    auto* reg = app.add_subcommand("region", "feasible capacity-scaling region");
    std::string reg_scn = "edge_grid", reg_out = "region.csv";
    std::vector<double> reg_grid;
    double reg_delay = 30.0;
    reg->add_option("--scenario", reg_scn, "scenario JSON path or 'edge_grid'");
    reg->add_option("--out", reg_out, "output CSV path");
    reg->add_option("--alpha-grid", reg_grid, "capacity scalings, applied to both axes")
        ->required()
        ->delimiter(',');
    reg->add_option("--delay-requirement", reg_delay, "mean-delay requirement in slots");
    Overrides reg_ov;
    reg_ov.attach(reg);
    reg->callback([&] {
        Scenario s = resolve(reg_scn);
        reg_ov.apply(s);
        RegionResult r = feasible_region(s, reg_grid, reg_grid, reg_delay);
        write_file(reg_out, region_csv(s, r));
        int feasible = 0;
        for (const RegionPoint& p : r.points) feasible += p.feasible;
        std::printf("%d of %zu scaling pairs feasible at delay <= %.6g slots\n", feasible,
                    r.points.size(), reg_delay);
    });

    // place ------------------------------------------------------------------
    auto* plc = app.add_subcommand("place", "max-throughput database placement");
    std::string plc_scn = "edge_grid", plc_out;
    plc->add_option("--scenario", plc_scn, "scenario JSON path or 'edge_grid'");
    plc->add_option("--out", plc_out, "write the chosen (node,db) pairs as CSV");
    Overrides plc_ov;
    plc_ov.attach(plc);
    plc->callback([&] {
        Scenario s = resolve(plc_scn);
        plc_ov.apply(s);
        NetworkGraph g = s.build_graph();
        MilpResult r = solve_milp_placement(g, s.clients, s.services, s.db_sizes, s.milp);
        if (!r.feasible) {
            std::printf("no feasible placement found\n");
            exit_code = 1;
            return;
        }
        std::printf("lambda* %.6g units/slot (%ld search nodes, %s)\n", r.lambda,
                    r.nodes_explored, r.optimal ? "proven optimal" : "budget incumbent");
        std::string csv = "node,db\n";
        for (int i = 0; i < g.node_count(); ++i)
            for (int k = 0; k < r.x.db_count(); ++k)
                if (r.x.cached(i, k)) {
                    std::printf("cache db %d at node %d\n", k, i);
                    csv += std::to_string(i) + "," + std::to_string(k) + "\n";
                }
        if (!plc_out.empty()) write_file(plc_out, csv);
    });

    // replace-demo -------------------------------------------------------------
    auto* rep = app.add_subcommand("replace-demo", "run a scenario with online replacement");
    std::string rep_scn = "edge_grid", rep_out = "replace", rep_policy = "score";
    rep->add_option("--scenario", rep_scn, "scenario JSON path or 'edge_grid'");
    rep->add_option("--out", rep_out, "output file prefix");
    rep->add_option("--policy", rep_policy, "replacement policy: rate | score")
        ->check(CLI::IsMember({"rate", "score"}));
    Overrides rep_ov;
    rep_ov.attach(rep);
    rep->callback([&] {
        Scenario s = resolve(rep_scn);
        rep_ov.apply(s);
        s.replacement = rep_policy == "rate" ? ReplacePolicy::RateBased : ReplacePolicy::ScoreBased;
        RunResult r = run_scenario(s);
        write_file(rep_out + "_metrics.csv", metrics_csv(s, r));
        write_file(rep_out + "_frames.csv", frame_log_csv(s, r));
        print_summary(s, r);
        std::printf("replacement rate %.6g units/slot\n",
                    s.horizon > 0 ? r.bytes_moved / static_cast<double>(s.horizon) : 0.0);
    });

    // validate -----------------------------------------------------------------
    auto* val = app.add_subcommand(
        "validate",
        "run the oracle suites, then parse a scenario and soak it with the runtime "
        "invariant monitor");
    std::string val_scn = "edge_grid";
    val->add_option("--scenario", val_scn, "scenario JSON path or 'edge_grid'");
    Overrides val_ov;
    val_ov.attach(val);
    val->callback([&] {
        if (run_oracle_suite() != 0) exit_code = 1;
        Scenario s = resolve(val_scn);
        val_ov.apply(s);
        s.monitor = true;
        std::printf("scenario %s hash %016llx parses cleanly\n", s.name.c_str(),
                    static_cast<unsigned long long>(scenario_hash(s)));
        RunResult r = run_scenario(s);
        if (r.invariants.violations == 0) {
            std::printf("invariant monitor: 0 violations over %ld slots\n", s.horizon);
        } else {
            std::printf("invariant monitor: %ld violations; first: %s\n",
                        r.invariants.violations, r.invariants.first.c_str());
            exit_code = 1;
        }
    });

    CLI11_PARSE(app, argc, argv);
    return exit_code;
}
