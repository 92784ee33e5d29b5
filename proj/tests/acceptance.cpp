// Acceptance suite: end-to-end checks of the routing controller, simulator,
// placement solvers, and cache replacement policies. Each criterion prints a
// single PASS/FAIL line; the binary exits nonzero if any criterion fails.
//
// Criteria that compare against independent oracles (exhaustive route
// enumeration, exhaustive placement/knapsack search, hand-derived throughput
// bounds) restate the expected quantity from its definition rather than
// calling library code.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdlib>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "dicnc/harness.hpp"

using namespace dicnc;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int criterion, bool ok, const std::string& detail) {
    std::printf("criterion %2d: %s  %s\n", criterion, ok ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// ---------------------------------------------------------------------------
// Criterion 1: min-ER route weight equals exhaustive route enumeration.
// ---------------------------------------------------------------------------

// Independent all-pairs shortest paths (Bellman-Ford) over the queue-weighted
// actual graph.
std::vector<std::vector<double>> oracle_sp0(const NetworkGraph& g,
                                            const VirtualQueues& q) {
    const int n = g.node_count();
    std::vector<std::vector<double>> d(n, std::vector<double>(n, kInf));
    for (int s = 0; s < n; ++s) {
        d[s][s] = 0.0;
        for (int round = 0; round < n; ++round) {
            for (int e = 0; e < g.edge_count(); ++e) {
                const Edge& ed = g.edge(e);
                if (ed.capacity <= 0 || d[s][ed.from] == kInf) continue;
                double w = q.link_backlog(e) / (ed.capacity * ed.capacity);
                d[s][ed.to] = std::min(d[s][ed.to], d[s][ed.from] + w);
            }
        }
    }
    return d;
}

// Exhaustive minimum route weight: enumerate every processing-location tuple
// and, per stage, the cheapest static source; weight stated directly from its
// definition.
double oracle_min_weight(const NetworkGraph& g, const VirtualQueues& q,
                         const Client& client, const ServiceSpec& spec,
                         const std::vector<std::vector<int>>& sources) {
    const int n = g.node_count();
    const auto d = oracle_sp0(g, q);
    const auto cum = cumulative_scaling(spec);
    const int funcs = spec.stages() - 1;
    std::vector<int> theta(funcs, 0);
    double best = kInf;
    auto term = [](double load, double dist) { return load == 0 ? 0.0 : load * dist; };
    while (true) {
        double w = 0;
        int prev = client.source;
        for (int m = 1; m <= funcs; ++m) {
            const FunctionSpec& f = spec.functions[m - 1];
            const int at = theta[m - 1];
            w += term(cum[m - 1], d[prev][at]);
            double dv = kInf;
            for (int v : sources[m - 1]) dv = std::min(dv, d[v][at]);
            w += term(cum[m - 1] * f.merging, dv);
            const double cap = g.proc_capacity(at);
            w += term(cum[m - 1] * f.workload,
                      cap > 0 ? q.node_backlog(at) / (cap * cap) : kInf);
            prev = at;
        }
        w += term(cum[funcs], d[prev][client.destination]);
        best = std::min(best, w);
        int m = funcs - 1;
        while (m >= 0 && ++theta[m] == n) theta[m--] = 0;
        if (m < 0) break;
    }
    return best;
}

void criterion_1() {
    auto t0 = Clock::now();
    std::mt19937_64 rng(20260826);
    std::uniform_real_distribution<double> cap(0.5, 5.0);
    std::uniform_real_distribution<double> backlog(0.0, 50.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    long checked = 0, infeasible_agreed = 0;
    double worst = 0;
    bool ok = true;
    std::string why;
    for (int trial = 0; trial < 320 && ok; ++trial) {
        const int n = 2 + trial % 3;  // 2..4 nodes
        std::vector<Edge> edges;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j && u01(rng) < 0.85) edges.push_back({i, j, cap(rng)});
        std::vector<double> proc(n), storage(n, 2.0);
        for (double& p : proc) p = u01(rng) < 0.2 ? 0.0 : cap(rng);
        const int K = 2;
        NetworkGraph g(n, edges, proc, storage);
        CachingVector x(n, std::vector<double>(K, 1.0));
        for (int k = 0; k < K; ++k)
            for (int i = 0; i < n; ++i)
                if (u01(rng) < 0.55) x.set(i, k, true);

        ServiceSpec spec;
        const int funcs = 1 + trial % 3;  // chain length M <= 3 functions
        for (int m = 0; m < funcs; ++m)
            spec.functions.push_back({0.5 + 1.5 * u01(rng), 0.5 + 2.5 * u01(rng),
                                      static_cast<int>(rng() % K), 2.0 * u01(rng)});
        ServiceContext ctx(spec, x, g);
        Client client{0, static_cast<int>(rng() % n), static_cast<int>(rng() % n), 0, 1.0};

        VirtualQueues q(g);
        for (double& v : q.raw_node()) v = backlog(rng);
        for (double& v : q.raw_link()) v = backlog(rng);
        RouteEngine engine(g);
        engine.prepare(q);

        MinErResult r = engine.min_er(client, ctx);
        const double expect = oracle_min_weight(g, q, client, spec, ctx.stage_sources);
        if (expect == kInf) {
            if (r.feasible) { ok = false; why = fmt("trial %d: engine feasible, oracle not", trial); }
            ++infeasible_agreed;
            continue;
        }
        if (!r.feasible) { ok = false; why = fmt("trial %d: engine infeasible, oracle not", trial); continue; }
        const double err = std::abs(r.weight - expect) / std::max(1.0, std::abs(expect));
        worst = std::max(worst, err);
        if (err > 1e-9) { ok = false; why = fmt("trial %d: weight error %.3g", trial, err); }
        ++checked;
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    if (ok && checked < 200) { ok = false; why = fmt("only %ld feasible instances", checked); }
    if (ok && secs >= 60) { ok = false; why = fmt("took %.1f s", secs); }
    report(1, ok,
           ok ? fmt("route weight vs exhaustive enumeration: %ld instances, worst error %.2g, "
                    "%ld infeasible agreed, %.1f s", checked, worst, infeasible_agreed, secs)
              : why);
}

// ---------------------------------------------------------------------------
// Criterion 2: the two route-weight forms agree on every selected route.
// ---------------------------------------------------------------------------

void criterion_2() {
    Scenario s = edge_grid();
    s.arrivals.total_rate = 3000;
    s.horizon = 10000;
    NetworkGraph g = s.build_graph();
    CachingVector x = s.build_placement(g);
    Simulator sim(g, s.services, s.clients, x, s.arrivals, s.seed);
    sim.run(s.horizon);
    const double err = sim.max_weight_identity_error();
    report(2, err <= 1e-9,
           fmt("resource-load form vs edge-sum form over %ld slots: max relative error %.2g",
               s.horizon, err));
}

// ---------------------------------------------------------------------------
// Criterion 3: stability ordering of the three routing policies on the grid.
// ---------------------------------------------------------------------------

double grid_boundary(RoutePolicy pol, const std::vector<double>& grid) {
    Scenario s = edge_grid();
    s.policy = pol;
    s.horizon = 200000;
    s.warmup = 20000;
    return stability_sweep(s, grid).boundary;
}

double refine_boundary(RoutePolicy pol, double stable, double step) {
    Scenario s = edge_grid();
    s.policy = pol;
    s.horizon = 200000;
    s.warmup = 20000;
    return bisect_boundary(s, stable, stable + step, 3);
}

void criterion_3() {
    const double step = 200;
    std::vector<double> grid;
    for (double l = 2200; l <= 4200; l += step) grid.push_back(l);
    double di = grid_boundary(RoutePolicy::DiDcnc, grid);
    double l2s = grid_boundary(RoutePolicy::L2S, grid);
    double s2l = grid_boundary(RoutePolicy::S2L, grid);
    // Grid resolution can tie two policies; refine ties by bisection.
    if (di == l2s && di > 0) {
        di = refine_boundary(RoutePolicy::DiDcnc, di, step);
        l2s = refine_boundary(RoutePolicy::L2S, l2s, step);
    }
    if (l2s == s2l && l2s > 0) {
        l2s = refine_boundary(RoutePolicy::L2S, l2s, step);
        s2l = refine_boundary(RoutePolicy::S2L, s2l, step);
    }
    const bool ok = s2l > 0 && di > l2s && l2s > s2l;
    std::printf("              advisory: L2S/full = %.3f (expect ~0.88 +/- 15%%), "
                "S2L/full = %.3f (expect ~0.63 +/- 15%%)\n",
                l2s / di, s2l / di);
    report(3, ok,
           fmt("policy stability boundaries (units/slot): full %.0f > latest-split %.0f > "
               "earliest-split %.0f", di, l2s, s2l));
}

// ---------------------------------------------------------------------------
// Criterion 4: fluid LP throughput matches the simulated stability boundary.
// ---------------------------------------------------------------------------

Scenario small_base(const char* name) {
    Scenario s;
    s.name = name;
    s.arrivals.kind = ArrivalKind::Poisson;
    s.horizon = 200000;
    s.warmup = 20000;
    s.sample_interval = 100;
    s.seed = 11;
    // Stationary backlog at stable rates is tens of units here; a tight
    // divergence threshold aborts unstable bisection points before their
    // backlog-proportional per-slot cost explodes.
    s.divergence_backlog = 5000;
    return s;
}

void criterion_4() {
    std::vector<Scenario> cases;
    {
        // Line 0-1-2, throughput limited by the links (4 units/slot).
        Scenario s = small_base("line-links");
        s.nodes = 3;
        s.links = {{0, 1, 4.0}, {1, 0, 4.0}, {1, 2, 4.0}, {2, 1, 4.0}};
        s.proc_capacity = {0.0, 100.0, 0.0};
        s.storage_capacity = {1.0, 1.0, 1.0};
        ServiceSpec sv;
        sv.functions = {{1.0, 2.0, 0, 1.0}};
        s.services = {sv};
        s.clients = {{0, 0, 2, 0, 1.0}};
        s.db_sizes = {1.0};
        s.cached = {{1, 0}};
        cases.push_back(s);
    }
    {
        // Same line, throughput limited by compute (6 / workload 2 = 3).
        Scenario s = cases[0];
        s.name = "line-compute";
        s.proc_capacity = {0.0, 6.0, 0.0};
        cases.push_back(s);
    }
    {
        // Diamond 0-{1,2}-3: two disjoint 2-unit paths; the boundary needs
        // time-sharing across both.
        Scenario s = small_base("diamond");
        s.nodes = 4;
        s.links = {{0, 1, 2.0}, {1, 0, 2.0}, {1, 3, 2.0}, {3, 1, 2.0},
                   {0, 2, 2.0}, {2, 0, 2.0}, {2, 3, 2.0}, {3, 2, 2.0}};
        s.proc_capacity = {0.0, 4.0, 4.0, 0.0};
        s.storage_capacity = {0.0, 1.0, 1.0, 0.0};
        ServiceSpec sv;
        sv.functions = {{1.0, 1.0, 0, 1.0}};
        s.services = {sv};
        s.clients = {{0, 0, 3, 0, 1.0}};
        s.db_sizes = {1.0};
        s.cached = {{1, 0}, {2, 0}};
        cases.push_back(s);
    }

    bool ok = true;
    std::string detail;
    for (Scenario& s : cases) {
        NetworkGraph g = s.build_graph();
        CachingVector x = s.build_placement(g);
        const double lp = eval_placement_lp(g, s.clients, s.services, x).lambda;
        const double sim = bisect_boundary(s, 0.5 * lp, 1.5 * lp, 8);
        const double rel = std::abs(sim - lp) / lp;
        detail += fmt("%s LP %.3f sim %.3f (%.1f%%)  ", s.name.c_str(), lp, sim, 100 * rel);
        if (rel > 0.05) ok = false;
    }
    report(4, ok, "fluid LP vs simulated boundary: " + detail);
}

// ---------------------------------------------------------------------------
// Criterion 5: linearized static model equals the strict-conservation model.
// ---------------------------------------------------------------------------

void criterion_5() {
    std::mt19937_64 rng(515);
    std::uniform_real_distribution<double> cap(1.0, 6.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    bool ok = true;
    std::string why;
    long checked = 0;
    double worst = 0;
    for (int trial = 0; trial < 50 && ok; ++trial) {
        const int n = 3 + trial % 3;  // 3..5 nodes
        std::vector<Edge> edges;
        for (int i = 0; i < n; ++i) {  // ring, always connected
            edges.push_back({i, (i + 1) % n, cap(rng)});
            edges.push_back({(i + 1) % n, i, cap(rng)});
        }
        for (int i = 0; i < n; ++i)  // random chords
            for (int j = 0; j < n; ++j)
                if (j != i && j != (i + 1) % n && i != (j + 1) % n && u01(rng) < 0.3)
                    edges.push_back({i, j, cap(rng)});
        std::vector<double> proc(n), storage(n, 1.0 + (trial % 2));
        for (double& p : proc) p = cap(rng) + 2.0;
        NetworkGraph g(n, edges, proc, storage);

        const int K = 1 + trial % 2;
        std::vector<double> sizes(K, 1.0);
        CachingVector x = random_placement(g, sizes, rng);

        std::vector<ServiceSpec> services;
        const int S = 1 + trial % 2;
        for (int sv = 0; sv < S; ++sv) {
            ServiceSpec spec;
            spec.id = sv;
            const int funcs = 1 + static_cast<int>(rng() % 2);
            for (int m = 0; m < funcs; ++m)
                spec.functions.push_back({0.5 + 1.5 * u01(rng), 0.5 + 2.0 * u01(rng),
                                          static_cast<int>(rng() % K), 1.5 * u01(rng)});
            services.push_back(spec);
        }
        std::vector<Client> clients;
        for (int c = 0; c < S; ++c) {
            int src = static_cast<int>(rng() % n);
            int dst = (src + 1 + static_cast<int>(rng() % (n - 1))) % n;
            clients.push_back({c, src, dst, c, 1.0 / S});
        }

        PlacementResult lin = eval_placement_lp(g, clients, services, x, StaticModel::Linearized);
        PlacementResult strict =
            eval_placement_lp(g, clients, services, x, StaticModel::StrictEquality);
        if (!lin.feasible || !strict.feasible) {
            ok = false;
            why = fmt("trial %d: LP infeasible (lin %d strict %d)", trial, lin.feasible,
                      strict.feasible);
            continue;
        }
        const double err = std::abs(lin.lambda - strict.lambda) / std::max(1.0, strict.lambda);
        worst = std::max(worst, err);
        if (err > 1e-6) { ok = false; why = fmt("trial %d: gap %.3g", trial, err); }
        ++checked;
    }
    report(5, ok,
           ok ? fmt("relaxed vs strict static-flow model: %ld instances, worst gap %.2g",
                    checked, worst)
              : why);
}

// ---------------------------------------------------------------------------
// Criterion 6: branch-and-bound equals exhaustive placement enumeration.
// ---------------------------------------------------------------------------

void criterion_6() {
    std::mt19937_64 rng(66);
    std::uniform_real_distribution<double> cap(1.0, 6.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    bool ok = true;
    std::string why;
    long bits_max = 0;
    for (int trial = 0; trial < 10 && ok; ++trial) {
        const int n = 3 + trial % 2;
        const int K = (trial % 2 == 0) ? 4 - trial % 3 : 3;  // up to n*K = 13 bits
        std::vector<Edge> edges;
        for (int i = 0; i < n; ++i) {
            edges.push_back({i, (i + 1) % n, cap(rng)});
            edges.push_back({(i + 1) % n, i, cap(rng)});
        }
        std::vector<double> proc(n), storage(n, 1.0 + (trial % 2));
        for (double& p : proc) p = cap(rng) + 2.0;
        NetworkGraph g(n, edges, proc, storage);
        std::vector<double> sizes(K, 1.0);

        // One service per database so every caching bit matters; unused
        // databases would make distinct placements exactly tie.
        std::vector<ServiceSpec> services;
        std::vector<Client> clients;
        for (int c = 0; c < K; ++c) {
            ServiceSpec spec;
            spec.id = c;
            spec.functions.push_back({0.5 + 1.5 * u01(rng), 0.5 + 2.0 * u01(rng), c,
                                      0.3 + 1.2 * u01(rng)});
            services.push_back(spec);
            int src = static_cast<int>(rng() % n);
            clients.push_back({c, src, (src + 1) % n, c, 1.0 / K});
        }
        bits_max = std::max(bits_max, static_cast<long>(n) * K);

        MilpOptions enumerate;
        enumerate.force_enumeration = true;
        enumerate.gap_tol = 0.0;  // take the strict maximum, no update slack
        MilpResult truth = solve_milp_placement(g, clients, services, sizes, enumerate);

        MilpOptions bnb;
        bnb.enumerate_max_bits = 0;  // force the branch-and-bound path
        bnb.gap_tol = -1e-9;         // explore ties: exact optimum, no slack
        bnb.node_budget = 400000;
        MilpResult found = solve_milp_placement(g, clients, services, sizes, bnb);

        if (truth.feasible != found.feasible) {
            ok = false;
            why = fmt("trial %d: feasibility mismatch", trial);
        } else if (truth.feasible && truth.lambda != found.lambda) {
            ok = false;
            why = fmt("trial %d: enumeration %.17g vs branch-and-bound %.17g", trial,
                      truth.lambda, found.lambda);
        } else if (truth.feasible && !found.optimal) {
            ok = false;
            why = fmt("trial %d: branch-and-bound did not prove optimality", trial);
        }
    }
    report(6, ok,
           ok ? fmt("branch-and-bound == exhaustive enumeration on 10 instances "
                    "(up to %ld caching bits), exact equality", bits_max)
              : why);
}

// ---------------------------------------------------------------------------
// Criterion 7: optimized placement beats the mean random placement by >= 25%.
// ---------------------------------------------------------------------------

void criterion_7() {
    Scenario s = edge_grid();
    NetworkGraph g = s.build_graph();
    MilpResult proposed = solve_milp_placement(g, s.clients, s.services, s.db_sizes, s.milp);
    std::mt19937_64 rng(4);
    double sum = 0;
    for (int t = 0; t < 20; ++t) {
        CachingVector x = random_placement(g, s.db_sizes, rng);
        sum += eval_placement_lp(g, s.clients, s.services, x).lambda;
    }
    const double mean = sum / 20;
    const double gain = proposed.lambda / mean;
    report(7, proposed.feasible && gain >= 1.25,
           fmt("optimized placement %.0f vs mean of 20 random placements %.0f: %.0f%% gain",
               proposed.lambda, mean, 100 * (gain - 1)));
}

// ---------------------------------------------------------------------------
// Criterion 8: knapsack DP equals exhaustive subset search, exactly.
// ---------------------------------------------------------------------------

void criterion_8() {
    std::mt19937_64 rng(88);
    bool ok = true;
    std::string why;
    for (int trial = 0; trial < 60 && ok; ++trial) {
        const int K = 12;
        std::vector<double> v(K), f(K);
        for (int k = 0; k < K; ++k) {
            // Quarter-integer grids are exact in binary floating point, so
            // exhaustive and DP sums are bit-identical.
            v[k] = static_cast<double>(rng() % 41) / 4.0;
            f[k] = 0.5 + static_cast<double>(rng() % 8) / 2.0;
        }
        const double S = 2.0 + static_cast<double>(rng() % 17) / 2.0;
        double best = 0;
        for (unsigned mask = 0; mask < (1u << K); ++mask) {
            double tv = 0, tw = 0;
            for (int k = 0; k < K; ++k)
                if (mask & (1u << k)) tv += v[k], tw += f[k];
            if (tw <= S) best = std::max(best, tv);
        }
        KnapsackResult r = knapsack_select(v, f, S);
        double tw = 0;
        for (int k : r.chosen) tw += f[k];
        if (r.value != best) {
            ok = false;
            why = fmt("trial %d: DP %.17g vs exhaustive %.17g", trial, r.value, best);
        } else if (tw > S) {
            ok = false;
            why = fmt("trial %d: selection overflows capacity", trial);
        }
    }
    report(8, ok, ok ? "knapsack DP == exhaustive search, 60 instances of 12 items, exact" : why);
}

// ---------------------------------------------------------------------------
// Criterion 9: cache replacement extends the stable region after a
// popularity swap, with bounded per-frame traffic and a replacement rate
// that falls as frames get longer.
// ---------------------------------------------------------------------------

Scenario swap_world() {
    Scenario s;
    s.name = "popularity-swap";
    s.nodes = 3;
    s.links = {{0, 1, 10.0}, {1, 0, 10.0}, {1, 2, 0.5}, {2, 1, 0.5}};
    s.proc_capacity = {0.0, 10.0, 0.0};
    s.storage_capacity = {0.0, 1.0, 0.0};
    s.cloud = 2;
    ServiceSpec s0, s1;
    s0.functions = {{1.0, 1.0, 0, 1.0}};
    s1.id = 1;
    s1.functions = {{1.0, 1.0, 1, 1.0}};
    s.services = {s0, s1};
    s.clients = {{0, 0, 1, 0, 0.5}, {1, 0, 1, 1, 0.5}};
    s.db_sizes = {1.0, 1.0};
    s.cached = {{1, 0}};  // the edge node caches database 0
    s.arrivals.kind = ArrivalKind::MarkovZipf;
    s.arrivals.zipf_gamma = 1.0;
    // Popularity has already swapped: client 1 (database 1) is the hot one,
    // so the fixed placement serves the hot database over the thin backhaul.
    s.arrivals.initial_order = {1, 0};
    s.arrivals.swap_prob = 0.0;
    s.frame_length = 1000;
    s.horizon = 200000;
    s.warmup = 20000;
    s.sample_interval = 100;
    s.seed = 3;
    s.divergence_backlog = 5000;
    return s;
}

void criterion_9() {
    std::vector<double> grid;
    for (double l = 0.25; l <= 2.01; l += 0.25) grid.push_back(l);

    auto boundary_of = [&](ReplacePolicy rp, double* max_frame_bytes) {
        Scenario s = swap_world();
        s.replacement = rp;
        double b = 0;
        for (double lam : grid) {
            Scenario p = s;
            p.arrivals.total_rate = lam;
            RunResult r = run_scenario(p);
            if (r.stable) b = lam;
            if (max_frame_bytes)
                for (const FrameLogEntry& e : r.frames)
                    *max_frame_bytes = std::max(*max_frame_bytes, e.bytes_moved);
        }
        return b;
    };

    double frame_bytes = 0;
    const double fixed = boundary_of(ReplacePolicy::None, nullptr);
    const double rate = boundary_of(ReplacePolicy::RateBased, &frame_bytes);
    const double score = boundary_of(ReplacePolicy::ScoreBased, &frame_bytes);
    // |V| * total database size: 3 nodes * 2 unit databases.
    const double bytes_cap = 3.0 * 2.0;

    // Replacement rate vs frame length under ongoing random popularity swaps.
    // The rate sits below every regime's boundary so even the longest frame
    // stays stable while it catches up; replacements remain beneficial (they
    // pull the hot database out of the backhaul) without being forced.
    std::vector<double> rates;
    for (long T : {1000L, 10000L, 100000L}) {
        Scenario s = swap_world();
        s.replacement = ReplacePolicy::ScoreBased;
        s.frame_length = T;
        s.arrivals.total_rate = 0.6;
        s.arrivals.swap_prob = 2e-4;
        RunResult r = run_scenario(s);
        rates.push_back(r.bytes_moved / static_cast<double>(r.slots_run));
    }
    const bool monotone = rates[0] > rates[1] && rates[1] > rates[2];

    const bool ok = fixed > 0 && rate >= 1.5 * fixed && score >= 1.5 * fixed &&
                    frame_bytes <= bytes_cap && monotone;
    std::printf("              boundaries: fixed %.2f, rate-based %.2f, score-based %.2f; "
                "max bytes/frame %.1f (cap %.1f)\n",
                fixed, rate, score, frame_bytes, bytes_cap);
    std::printf("              replacement rate by frame length: T=1e3 %.3g, T=1e4 %.3g, "
                "T=1e5 %.3g units/slot\n", rates[0], rates[1], rates[2]);
    report(9, ok,
           fmt("replacement sustains %.2f/%.2f vs fixed %.2f (>= 1.5x), frame traffic bounded, "
               "rate monotone in frame length", rate, score, fixed));
}

// ---------------------------------------------------------------------------
// Criterion 10: zero invariant violations over monitored soak runs.
// ---------------------------------------------------------------------------

void criterion_10() {
    long violations = 0;
    std::string first;

    Scenario a = edge_grid();
    a.arrivals.total_rate = 2800;
    a.horizon = 100000;
    a.monitor = true;
    a.seed = 1010;
    RunResult ra = run_scenario(a);
    violations += ra.invariants.violations;
    if (!ra.invariants.first.empty()) first = ra.invariants.first;

    Scenario b = swap_world();
    b.replacement = ReplacePolicy::ScoreBased;
    b.arrivals.total_rate = 1.0;
    b.arrivals.swap_prob = 2e-4;
    b.horizon = 100000;
    b.monitor = true;
    b.seed = 2020;
    RunResult rb = run_scenario(b);
    violations += rb.invariants.violations;
    if (first.empty() && !rb.invariants.first.empty()) first = rb.invariants.first;

    report(10, violations == 0,
           violations == 0
               ? fmt("queue bounds, capacity compliance, pairing, route conservation, storage: "
                     "0 violations over 2x100000 monitored slots")
               : fmt("%ld violations; first: %s", violations, first.c_str()));
}

// ---------------------------------------------------------------------------
// Criterion 11: identical scenario + seed gives byte-identical outputs.
// ---------------------------------------------------------------------------

void criterion_11() {
    Scenario a = edge_grid();
    a.arrivals.total_rate = 3000;
    a.horizon = 10000;
    RunResult r1 = run_scenario(a);
    RunResult r2 = run_scenario(a);
    const bool grid_same = metrics_csv(a, r1) == metrics_csv(a, r2);

    Scenario b = swap_world();
    b.replacement = ReplacePolicy::ScoreBased;
    b.arrivals.total_rate = 1.0;
    b.arrivals.swap_prob = 2e-4;
    b.horizon = 50000;
    RunResult r3 = run_scenario(b);
    RunResult r4 = run_scenario(b);
    const bool frames_same = metrics_csv(b, r3) == metrics_csv(b, r4) &&
                             frame_log_csv(b, r3) == frame_log_csv(b, r4);

    report(11, grid_same && frames_same,
           fmt("repeated runs byte-identical: metrics %s, frame log %s",
               grid_same ? "yes" : "NO", frames_same ? "yes" : "NO"));
}

}  // namespace

int main(int argc, char** argv) {
    auto t0 = Clock::now();
    // With arguments, run only the listed criteria (debugging aid).
    auto wanted = [&](int n) {
        if (argc < 2) return true;
        for (int a = 1; a < argc; ++a)
            if (std::atoi(argv[a]) == n) return true;
        return false;
    };
    void (*criteria[])() = {criterion_1, criterion_2, criterion_3, criterion_4,
                            criterion_5, criterion_6, criterion_7, criterion_8,
                            criterion_9, criterion_10, criterion_11};
    for (int n = 1; n <= 11; ++n)
        if (wanted(n)) criteria[n - 1]();
    std::printf("acceptance: %s (%d of 11 failed, %.0f s)\n",
                g_failures == 0 ? "ALL PASS" : "FAILURES", g_failures,
                std::chrono::duration<double>(Clock::now() - t0).count());
    return g_failures == 0 ? 0 : 1;
}
