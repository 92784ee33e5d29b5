#pragma once

#include <string>
#include <vector>

#include "dicnc/placement.hpp"
#include "dicnc/simulator.hpp"

namespace dicnc {

/// p̂^(c): share of the frame's arrivals belonging to each client; uniform
/// when the frame saw no arrivals at all.
std::vector<double> empirical_popularity(const std::vector<long>& frame_arrivals);

/// Cache-copy score v_{i,k} of one request instance: the drop in the min-ER
/// weight obtained by caching database k at node i versus not caching it
/// there, everything else unchanged. Nonnegative; clamped to [0, 1e9] so an
/// instance that is only feasible thanks to (i, k) stays summable.
double score_instance(const RouteEngine& engine, const Client& client,
                      const ServiceContext& ctx, const CachingVector& x, int i, int k);

struct KnapsackResult {
    std::vector<int> chosen;  // item indices, ascending
    double value = 0;
};

/// Exact 0/1 knapsack (values >= 0). Ties resolve to the lexicographically
/// smallest selection; zero-value items are never taken. Sizes and capacity
/// are quantized to a common integral grid.
KnapsackResult knapsack_select(const std::vector<double>& values,
                               const std::vector<double>& sizes, double capacity);

enum class ReplacePolicy { None, RateBased, ScoreBased };

struct ReplacementConfig {
    ReplacePolicy policy = ReplacePolicy::None;
    long frame_length = 1000;
    long score_sample_cap = 256;  // request instances scored per frame
    MilpOptions milp;             // online budget for the rate-based policy
};

struct FrameLogEntry {
    long frame = 0;
    std::string policy;
    int changed_node = -1;  // -1 = no change
    long bits_changed = 0;
    double bytes_moved = 0;
    double metric = 0;  // V_{i*}* (score) or incumbent lambda (rate)
};

/// Frame-based database replacement driver. Call after_slot() after every
/// Simulator::step(). Estimates are collected over frame tau, the decision is
/// made at the frame boundary, and the new placement takes effect one full
/// frame later.
class ReplacementManager {
  public:
    ReplacementManager(ReplacementConfig config, const Simulator& sim);

    void after_slot(Simulator& sim);

    double total_bytes_moved() const { return total_bytes_; }
    /// Average replacement traffic in data units per slot.
    double replacement_rate(long slots) const {
        return slots > 0 ? total_bytes_ / static_cast<double>(slots) : 0.0;
    }
    const std::vector<FrameLogEntry>& log() const { return log_; }

  private:
    void sample_scores(const Simulator& sim);
    void frame_boundary(Simulator& sim, long frame);
    void decide_rate_based(Simulator& sim, long frame);
    void decide_score_based(Simulator& sim, long frame);
    void schedule(const Simulator& sim, CachingVector x, long frame, double metric);

    ReplacementConfig config_;
    std::vector<double> scores_;        // V_{i,k}, node-major
    long sampled_instances_ = 0;
    long frame_instances_ = 0;
    bool has_pending_ = false;
    CachingVector pending_x_{1, {}};
    double pending_bytes_ = 0;
    long pending_bits_ = 0;
    int pending_node_ = -1;
    double pending_metric_ = 0;
    double total_bytes_ = 0;
    std::vector<FrameLogEntry> log_;
};

}  // namespace dicnc
