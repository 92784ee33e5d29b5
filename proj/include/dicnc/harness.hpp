#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dicnc/placement.hpp"
#include "dicnc/replacement.hpp"
#include "dicnc/simulator.hpp"

namespace dicnc {

inline constexpr int kScenarioSchemaVersion = 1;

/// Backlog-regression slope threshold (data units per slot) below which a run
/// is declared stable.
inline constexpr double kStabilitySlopeEps = 1e-3;

enum class PlacementSource { Fixed, Proposed, RandomPlacement, RandomSelection };

/// A fully serializable experiment description. The hash of its canonical
/// JSON form is stamped into every output file; readers reject outputs whose
/// stamp disagrees with the scenario they hold.
struct Scenario {
    std::string name = "unnamed";

    // Network.
    int nodes = 0;
    std::vector<Edge> links;
    std::vector<double> proc_capacity;
    std::vector<double> storage_capacity;
    std::optional<int> cloud;
    double replacement_cap = kInf;  // side-channel cap, data units per frame

    // Workload.
    std::vector<ServiceSpec> services;
    std::vector<Client> clients;
    ArrivalConfig arrivals;

    // Caching.
    std::vector<double> db_sizes;
    PlacementSource placement = PlacementSource::Fixed;
    std::vector<std::pair<int, int>> cached;  // (node, db) pairs for Fixed
    int placement_copies = 1;                 // databases per node for the random sources
    MilpOptions milp;                         // budget for the Proposed source

    // Control.
    RoutePolicy policy = RoutePolicy::DiDcnc;
    ReplacePolicy replacement = ReplacePolicy::None;
    long frame_length = 1000;

    // Run.
    long horizon = 10000;
    long warmup = 1000;
    long sample_interval = 100;
    uint64_t seed = 1;
    bool monitor = false;  // enable the runtime invariant monitor
    /// Abort the run (verdict: unstable) once total actual backlog exceeds
    /// this many data units; kInf disables the check.
    double divergence_backlog = kInf;

    void validate() const;
    NetworkGraph build_graph() const;
    /// Materialize the caching vector; Proposed solves the placement MILP,
    /// the random sources derive their permutations from `seed`.
    CachingVector build_placement(const NetworkGraph& g) const;
};

std::string scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const std::string& text);  // throws on unknown schema
Scenario load_scenario(const std::string& path);
uint64_t scenario_hash(const Scenario& s);  // FNV-1a over the canonical JSON

/// Bundled 3x3 edge grid plus a thin-backhaul cloud node, four two-function
/// clients, eight unit-size databases. Units: one data unit = 1 kb = one
/// packet, one slot = 1 ms, so 1 unit/slot corresponds to 1 Mbps.
Scenario edge_grid();

struct RunResult {
    uint64_t hash = 0;
    std::vector<SlotSample> samples;
    long delivered = 0;
    long dropped = 0;
    double mean_delay = kInf;    // post-warmup; kInf when nothing delivered
    double backlog_slope = 0.0;  // final half of post-warmup samples
    bool stable = false;
    bool diverged = false;  // run aborted early at the divergence threshold
    long slots_run = 0;
    double bytes_moved = 0.0;
    std::vector<FrameLogEntry> frames;
    InvariantReport invariants;
};

RunResult run_scenario(const Scenario& s);
/// Same, with the graph and placement overridden (used by the region driver).
RunResult run_scenario_with(const Scenario& s, const NetworkGraph& g, const CachingVector& x);

/// Least-squares slope of total backlog (units/slot) over the final half of
/// the samples taken at or after `warmup`.
double backlog_slope(const std::vector<SlotSample>& samples, long warmup);

std::string metrics_csv(const Scenario& s, const RunResult& r);
std::string frame_log_csv(const Scenario& s, const RunResult& r);
/// Verifies the hash stamp on the first line of a CSV; throws on mismatch.
void check_output_hash(const std::string& csv_text, const Scenario& s);
void write_file(const std::string& path, const std::string& content);

struct SweepPoint {
    double lambda = 0;
    bool stable = false;
    double slope = 0;
    double mean_delay = kInf;
    long delivered = 0;
};
struct SweepResult {
    std::vector<SweepPoint> points;  // sorted by lambda
    double boundary = 0;             // largest stable lambda, 0 if none
};

/// Run the scenario once per arrival rate and estimate the stability
/// boundary. Points are independent runs merged in grid order.
SweepResult stability_sweep(const Scenario& base, const std::vector<double>& lambda_grid);

/// Bisection refinement of the boundary between a stable and an unstable rate.
double bisect_boundary(const Scenario& base, double lambda_stable, double lambda_unstable,
                       int iterations);

std::string sweep_csv(const Scenario& s, const SweepResult& r);

struct RegionPoint {
    double alpha_proc = 1;
    double alpha_tx = 1;
    bool feasible = false;
    bool stable = false;
    double mean_delay = kInf;
};
struct RegionResult {
    std::vector<RegionPoint> points;  // row-major over (alpha_proc, alpha_tx)
    double delay_requirement = 0;
};

/// Scale node capacities by alpha_proc and link capacities by alpha_tx and
/// mark the pairs whose runs are stable with post-warmup mean delay within
/// the requirement (in slots).
RegionResult feasible_region(const Scenario& base, const std::vector<double>& alpha_proc_grid,
                             const std::vector<double>& alpha_tx_grid,
                             double delay_requirement);

std::string region_csv(const Scenario& s, const RegionResult& r);

}  // namespace dicnc
