#include "dicnc/replacement.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dicnc {

namespace {

constexpr double kScoreClamp = 1e9;

// Remove/insert node i in sorted source lists for every stage using db k.
std::vector<std::vector<int>> toggled_sources(const ServiceContext& ctx, int i, int k,
                                              bool present) {
    std::vector<std::vector<int>> sources = ctx.stage_sources;
    for (size_t m = 0; m < sources.size(); ++m) {
        if (ctx.spec.functions[m].object != k) continue;
        auto& v = sources[m];
        auto at = std::lower_bound(v.begin(), v.end(), i);
        const bool found = at != v.end() && *at == i;
        if (present && !found) v.insert(at, i);
        if (!present && found) v.erase(at);
    }
    return sources;
}

}  // namespace

std::vector<double> empirical_popularity(const std::vector<long>& frame_arrivals) {
    long total = 0;
    for (long a : frame_arrivals) total += a;
    std::vector<double> p(frame_arrivals.size());
    if (total == 0) {
        std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(p.size()));
        return p;
    }
    for (size_t c = 0; c < p.size(); ++c)
        p[c] = static_cast<double>(frame_arrivals[c]) / static_cast<double>(total);
    return p;
}

double score_instance(const RouteEngine& engine, const Client& client,
                      const ServiceContext& ctx, const CachingVector& x, int i, int k) {
    bool relevant = false;
    for (const FunctionSpec& f : ctx.spec.functions)
        if (f.object == k && f.merging > 0) relevant = true;
    if (!relevant) return 0.0;
    (void)x;
    const double without = engine.min_er_weight(client, ctx, toggled_sources(ctx, i, k, false));
    const double with = engine.min_er_weight(client, ctx, toggled_sources(ctx, i, k, true));
    if (!std::isfinite(with)) return 0.0;  // unusable either way
    if (!std::isfinite(without)) return kScoreClamp;
    return std::clamp(without - with, 0.0, kScoreClamp);
}

KnapsackResult knapsack_select(const std::vector<double>& values,
                               const std::vector<double>& sizes, double capacity) {
    const int K = static_cast<int>(values.size());
    if (sizes.size() != values.size())
        throw std::invalid_argument("knapsack: size/value length mismatch");

    // Quantize sizes to an integral grid (database units).
    double scale = 1.0;
    auto integral = [&](double v) { return std::abs(v * scale - std::round(v * scale)) < 1e-9; };
    for (int tries = 0; tries < 7; ++tries) {
        bool ok = true;
        for (double f : sizes) ok = ok && integral(f);
        if (ok) break;
        scale *= 10.0;
    }
    std::vector<long> w(K);
    for (int k = 0; k < K; ++k) {
        w[k] = std::lround(sizes[k] * scale);
        if (w[k] < 0) throw std::invalid_argument("knapsack: negative size");
    }
    const long S = std::max<long>(0, static_cast<long>(std::floor(capacity * scale + 1e-9)));

    // Suffix table best[k][s]: max value using items k.. with capacity s.
    std::vector<std::vector<double>> best(K + 1, std::vector<double>(S + 1, 0.0));
    for (int k = K - 1; k >= 0; --k) {
        for (long s = 0; s <= S; ++s) {
            double v = best[k + 1][s];
            if (w[k] <= s && values[k] > 0)
                v = std::max(v, values[k] + best[k + 1][s - w[k]]);
            best[k][s] = v;
        }
    }
    // Walk forward preferring inclusion on ties: smallest selection in the
    // lexicographic order over index sets.
    KnapsackResult r;
    long s = S;
    for (int k = 0; k < K; ++k) {
        if (values[k] > 0 && w[k] <= s && values[k] + best[k + 1][s - w[k]] >= best[k + 1][s]) {
            r.chosen.push_back(k);
            r.value += values[k];
            s -= w[k];
        }
    }
    return r;
}

ReplacementManager::ReplacementManager(ReplacementConfig config, const Simulator& sim)
    : config_(std::move(config)),
      pending_x_(sim.caching()) {
    if (config_.frame_length <= 0)
        throw std::invalid_argument("frame length must be positive");
    scores_.assign(
        static_cast<size_t>(sim.graph().node_count()) * sim.caching().db_count(), 0.0);
}

void ReplacementManager::after_slot(Simulator& sim) {
    if (config_.policy == ReplacePolicy::None) return;
    const long t = sim.slot() - 1;  // the slot just executed
    if (config_.policy == ReplacePolicy::ScoreBased) sample_scores(sim);
    if ((t + 1) % config_.frame_length == 0)
        frame_boundary(sim, (t + 1) / config_.frame_length);
}

void ReplacementManager::sample_scores(const Simulator& sim) {
    const auto& arrivals = sim.last_arrivals();
    const NetworkGraph& g = sim.graph();
    const int K = sim.caching().db_count();
    for (size_t c = 0; c < arrivals.size(); ++c) {
        if (arrivals[c] <= 0) continue;
        frame_instances_ += arrivals[c];
        if (sampled_instances_ >= config_.score_sample_cap) continue;
        const long weight =
            std::min<long>(arrivals[c], config_.score_sample_cap - sampled_instances_);
        sampled_instances_ += weight;
        const Client& client = sim.clients()[c];
        const ServiceContext& ctx = sim.contexts()[client.service];
        for (int i = 0; i < g.node_count(); ++i) {
            if (g.is_cloud(i)) continue;
            for (int k = 0; k < K; ++k) {
                const double v = score_instance(sim.engine(), client, ctx, sim.caching(), i, k);
                if (v > 0) scores_[i * K + k] += v * static_cast<double>(weight);
            }
        }
    }
}

void ReplacementManager::schedule(const Simulator& sim, CachingVector x, long frame,
                                  double metric) {
    const CachingVector& cur = sim.caching();
    double bytes = 0;
    long bits = 0;
    int node = -1;
    for (int i = 0; i < x.node_count(); ++i) {
        for (int k = 0; k < x.db_count(); ++k) {
            if (x.cached(i, k) == cur.cached(i, k)) continue;
            ++bits;
            node = i;  // score-based changes one node; rate-based logs the last
            if (x.cached(i, k)) bytes += x.db_size(k);  // downloads only
        }
    }
    if (bits == 0) {
        log_.push_back({frame, config_.policy == ReplacePolicy::RateBased ? "rate" : "score",
                        -1, 0, 0.0, metric});
        return;
    }
    if (bytes > sim.graph().replacement_rate_cap()) {
        // The side channel cannot move this much in one frame: skip.
        log_.push_back({frame, "capped", -1, 0, 0.0, metric});
        return;
    }
    has_pending_ = true;
    pending_x_ = std::move(x);
    pending_bytes_ = bytes;
    pending_bits_ = bits;
    pending_node_ = node;
    pending_metric_ = metric;
}

void ReplacementManager::decide_rate_based(Simulator& sim, long frame) {
    std::vector<double> p = empirical_popularity(sim.arrivals_since_mark());
    std::vector<Client> clients = sim.clients();
    for (size_t c = 0; c < clients.size(); ++c) clients[c].popularity = p[c];

    MilpResult r = solve_milp_placement(sim.graph(), clients, sim.services(),
                                        sim.caching().db_sizes(), config_.milp);
    if (!r.feasible) {
        log_.push_back({frame, "rate", -1, 0, 0.0, 0.0});
        return;
    }
    // Hysteresis: replace only when the incumbent strictly beats the current
    // placement under the same estimated popularity.
    const double current =
        eval_placement_lp(sim.graph(), clients, sim.services(), sim.caching()).lambda;
    if (r.lambda <= current + 1e-9) {
        log_.push_back({frame, "rate", -1, 0, 0.0, current});
        return;
    }
    schedule(sim, std::move(r.x), frame, r.lambda);
}

void ReplacementManager::decide_score_based(Simulator& sim, long frame) {
    const NetworkGraph& g = sim.graph();
    const CachingVector& cur = sim.caching();
    const int K = cur.db_count();
    // The exact score sums over every request instance in the frame; we
    // sample at most score_sample_cap of them and scale the totals back up.
    const double factor = sampled_instances_ > 0
                              ? static_cast<double>(frame_instances_) /
                                    static_cast<double>(sampled_instances_)
                              : 1.0;
    double best_v = 0;
    int best_node = -1;
    KnapsackResult best_sel;
    for (int i = 0; i < g.node_count(); ++i) {
        if (g.is_cloud(i)) continue;
        std::vector<double> values(scores_.begin() + i * K, scores_.begin() + (i + 1) * K);
        for (double& v : values) v *= factor;
        KnapsackResult sel = knapsack_select(values, cur.db_sizes(), g.storage_capacity(i));
        if (sel.value > best_v + 1e-12) {
            best_v = sel.value;
            best_node = i;
            best_sel = std::move(sel);
        }
    }
    std::fill(scores_.begin(), scores_.end(), 0.0);
    sampled_instances_ = 0;
    frame_instances_ = 0;
    if (best_node < 0) {
        log_.push_back({frame, "score", -1, 0, 0.0, 0.0});
        return;
    }
    CachingVector x = cur;  // asynchronous update: only the argmax node moves
    for (int k = 0; k < K; ++k) x.set(best_node, k, false);
    for (int k : best_sel.chosen) x.set(best_node, k, true);
    schedule(sim, std::move(x), frame, best_v);
}

void ReplacementManager::frame_boundary(Simulator& sim, long frame) {
    if (has_pending_) {
        if (!check_storage_feasible(pending_x_, sim.graph()).ok)
            throw std::logic_error("replacement produced an infeasible placement");
        sim.set_caching(pending_x_);
        total_bytes_ += pending_bytes_;
        log_.push_back({frame, config_.policy == ReplacePolicy::RateBased ? "rate" : "score",
                        pending_node_, pending_bits_, pending_bytes_, pending_metric_});
        has_pending_ = false;
    }
    if (config_.policy == ReplacePolicy::RateBased)
        decide_rate_based(sim, frame);
    else
        decide_score_based(sim, frame);
    sim.reset_arrival_mark();
}

}  // namespace dicnc
