#include <cmath>

#include "dicnc/replacement.hpp"
#include "doctest.h"

using namespace dicnc;

TEST_CASE("empirical popularity is the per-client arrival share") {
    CHECK(empirical_popularity({42}) == std::vector<double>{1.0});
    auto p = empirical_popularity({30, 10, 10, 0});
    CHECK(p[0] == doctest::Approx(0.6));
    CHECK(p[1] == doctest::Approx(0.2));
    CHECK(p[2] == doctest::Approx(0.2));
    CHECK(p[3] == doctest::Approx(0.0));
    auto u = empirical_popularity({0, 0});
    CHECK(u[0] == doctest::Approx(0.5));
    CHECK(u[1] == doctest::Approx(0.5));
}

TEST_CASE("knapsack: textbook instance") {
    KnapsackResult r = knapsack_select({60, 100, 120}, {1, 2, 3}, 5);
    CHECK(r.value == doctest::Approx(220));
    CHECK(r.chosen == std::vector<int>{1, 2});
}

TEST_CASE("knapsack: degenerate cases and tie-breaking") {
    CHECK(knapsack_select({0, 0, 0}, {1, 1, 1}, 10).chosen.empty());
    KnapsackResult all = knapsack_select({5, 0, 7}, {1, 2, 3}, 100);
    CHECK(all.chosen == std::vector<int>{0, 2});  // zero-score item skipped
    // Equal values, capacity one: lexicographically smallest selection.
    CHECK(knapsack_select({1, 1}, {1, 1}, 1).chosen == std::vector<int>{0});
    CHECK(knapsack_select({1, 2}, {1, 1}, 0).chosen.empty());
}

TEST_CASE("knapsack equals exhaustive subset search") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> val(0.0, 10.0);
    std::uniform_int_distribution<int> size(1, 4);
    for (int trial = 0; trial < 50; ++trial) {
        const int K = 10;
        std::vector<double> v(K), f(K);
        for (int k = 0; k < K; ++k) {
            v[k] = trial % 3 == 0 ? std::floor(val(rng)) : val(rng);
            f[k] = size(rng);
        }
        const double S = size(rng) + size(rng) + size(rng);
        double best = 0;
        for (unsigned mask = 0; mask < (1u << K); ++mask) {
            double tv = 0, tw = 0;
            for (int k = 0; k < K; ++k)
                if (mask & (1u << k)) tv += v[k], tw += f[k];
            if (tw <= S) best = std::max(best, tv);
        }
        KnapsackResult r = knapsack_select(v, f, S);
        CHECK(r.value == doctest::Approx(best).epsilon(1e-12));
        double tw = 0;
        for (int k : r.chosen) tw += f[k];
        CHECK(tw <= S + 1e-9);
    }
}

TEST_CASE("knapsack quantizes fractional sizes") {
    KnapsackResult r = knapsack_select({3, 4}, {0.5, 1.5}, 2.0);
    CHECK(r.chosen == std::vector<int>{0, 1});
    CHECK(knapsack_select({3, 4}, {0.5, 1.5}, 1.6).chosen == std::vector<int>{1});
}

namespace {

// Line 0 - 1 - 2 - 3 with unit link weights (backlog = capacity = 1) and an
// expensive compute node 0; database 0 cached at node 0 only.
struct ScoreFixture {
    NetworkGraph g{4,
                   {{0, 1, 1.0}, {1, 0, 1.0}, {1, 2, 1.0}, {2, 1, 1.0},
                    {2, 3, 1.0}, {3, 2, 1.0}},
                   {1.0, 1.0, 1.0, 1.0},
                   {5, 5, 5, 5}};
    CachingVector x{4, {1.0}};
    ServiceSpec spec;
    Client client{0, 0, 2, 0, 1.0};
    VirtualQueues q{g};
    RouteEngine engine{g};

    ScoreFixture() {
        spec.functions = {{1.0, 1.0, 0, 2.0}};
        x.set(0, 0, true);
        for (double& v : q.raw_link()) v = 1.0;  // every hop costs 1
        q.raw_node()[0] = 10.0;                  // processing at 0 costs 10
        engine.prepare(q);
    }
};

}  // namespace

TEST_CASE("cache-copy scores match hand-computed weight differences") {
    ScoreFixture fx;
    ServiceContext ctx(fx.spec, fx.x, fx.g);
    // Baseline: theta = 1 with the copy fetched from node 0 over one hop at
    // merging ratio 2: weight 1 + 2 + 0 + 1 = 4.
    CHECK(fx.engine.min_er(fx.client, ctx).weight == doctest::Approx(4.0));
    // A copy at node 2 lets theta = destination: weight 2, so the score is 2.
    CHECK(score_instance(fx.engine, fx.client, ctx, fx.x, 2, 0) == doctest::Approx(2.0));
    CHECK(score_instance(fx.engine, fx.client, ctx, fx.x, 1, 0) == doctest::Approx(2.0));
    // A copy at node 3 is never on a useful path: score 0.
    CHECK(score_instance(fx.engine, fx.client, ctx, fx.x, 3, 0) == doctest::Approx(0.0));
    // Removing the only copy without the cloud: the clamp keeps it finite.
    CHECK(score_instance(fx.engine, fx.client, ctx, fx.x, 0, 0) >= 1e8);
}

TEST_CASE("scores are zero for databases the service never fetches") {
    ScoreFixture fx;
    ServiceSpec dry = fx.spec;
    dry.functions[0].merging = 0.0;
    ServiceContext ctx(dry, fx.x, fx.g);
    for (int i = 0; i < 4; ++i)
        CHECK(score_instance(fx.engine, fx.client, ctx, fx.x, i, 0) == 0.0);
}

namespace {

// Popularity-swap scenario: one edge node (1) with room for a single
// database; cold databases stream from the cloud (2) over a thin backhaul.
struct SwapWorld {
    NetworkGraph g{3,
                   {{0, 1, 10.0}, {1, 0, 10.0}, {1, 2, 0.5}, {2, 1, 0.5}},
                   {0.0, 10.0, 0.0},
                   {0.0, 1.0, 0.0},
                   2};
    std::vector<ServiceSpec> services;
    std::vector<Client> clients{{0, 0, 1, 0, 0.5}, {1, 0, 1, 1, 0.5}};
    CachingVector x{3, {1.0, 1.0}};

    SwapWorld() {
        ServiceSpec s0, s1;
        s0.functions = {{1.0, 1.0, 0, 1.0}};
        s1.id = 1;
        s1.functions = {{1.0, 1.0, 1, 1.0}};
        services = {s0, s1};
    }

    ArrivalConfig arrivals() const {
        ArrivalConfig cfg;
        cfg.kind = ArrivalKind::MarkovZipf;
        cfg.total_rate = 2.0;
        cfg.zipf_gamma = 1.0;
        cfg.initial_order = {0, 1};  // client 0 hot (rate 4/3), client 1 cold
        cfg.swap_prob = 0.0;
        return cfg;
    }
};

}  // namespace

TEST_CASE("score-based replacement tracks the popularity swap") {
    SwapWorld w;
    Simulator sim(w.g, w.services, w.clients, w.x, w.arrivals(), 21);
    ReplacementConfig rc;
    rc.policy = ReplacePolicy::ScoreBased;
    rc.frame_length = 200;
    ReplacementManager mgr(rc, sim);
    for (int t = 0; t < 1000; ++t) {
        sim.step();
        mgr.after_slot(sim);
    }
    CHECK(sim.caching().cached(1, 0));  // hot database cached at the edge
    CHECK_FALSE(sim.caching().cached(1, 1));

    sim.arrivals().force_swap(0);  // client 1 becomes the hot one
    for (int t = 0; t < 2000; ++t) {
        sim.step();
        mgr.after_slot(sim);
    }
    CHECK(sim.caching().cached(1, 1));
    CHECK_FALSE(sim.caching().cached(1, 0));
    // Each applied replacement moves at most one database here.
    CHECK(mgr.total_bytes_moved() <= 1.0 * 15);
    CHECK(check_storage_feasible(sim.caching(), w.g).ok);
    for (const FrameLogEntry& e : mgr.log())
        CHECK(e.bits_changed <= 2);  // asynchronous: one node, one swap
}

TEST_CASE("rate-based replacement re-solves placement from measured shares") {
    SwapWorld w;
    Simulator sim(w.g, w.services, w.clients, w.x, w.arrivals(), 33);
    ReplacementConfig rc;
    rc.policy = ReplacePolicy::RateBased;
    rc.frame_length = 200;
    ReplacementManager mgr(rc, sim);
    for (int t = 0; t < 1000; ++t) {
        sim.step();
        mgr.after_slot(sim);
    }
    CHECK(sim.caching().cached(1, 0));

    sim.arrivals().force_swap(0);
    for (int t = 0; t < 2000; ++t) {
        sim.step();
        mgr.after_slot(sim);
    }
    CHECK(sim.caching().cached(1, 1));
    CHECK_FALSE(sim.caching().cached(1, 0));

    // Hysteresis: once settled, no further churn under stationary arrivals.
    const double bytes = mgr.total_bytes_moved();
    for (int t = 0; t < 1000; ++t) {
        sim.step();
        mgr.after_slot(sim);
    }
    CHECK(mgr.total_bytes_moved() == doctest::Approx(bytes));
}

TEST_CASE("replacement respects the side-channel byte cap") {
    SwapWorld w;
    NetworkGraph capped(3, {{0, 1, 10.0}, {1, 0, 10.0}, {1, 2, 0.5}, {2, 1, 0.5}},
                        {0.0, 10.0, 0.0}, {0.0, 1.0, 0.0}, 2, /*replacement cap=*/0.5);
    Simulator sim(capped, w.services, w.clients, w.x, w.arrivals(), 21);
    ReplacementConfig rc;
    rc.policy = ReplacePolicy::ScoreBased;
    rc.frame_length = 200;
    ReplacementManager mgr(rc, sim);
    for (int t = 0; t < 2000; ++t) {
        sim.step();
        mgr.after_slot(sim);
    }
    CHECK(mgr.total_bytes_moved() == doctest::Approx(0.0));  // 1 unit > 0.5 cap
    CHECK_FALSE(sim.caching().cached(1, 0));
}
