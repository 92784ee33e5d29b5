#pragma once

#include <random>
#include <vector>

#include "dicnc/lp.hpp"
#include "dicnc/services.hpp"
#include "dicnc/topology.hpp"

namespace dicnc {

/// How static-object availability enters the flow model.
///  - Linearized: per (node, database) supply bound C^max_{i,k} x_{i,k}, an
///    inequality that stays linear when x becomes a variable.
///  - StrictEquality: exact conservation with free injection variables at
///    caching nodes only; valid for a fixed binary x.
/// Both give the same maximum rate for fixed binary x.
enum class StaticModel { Linearized, StrictEquality };

struct PlacementResult {
    bool feasible = false;
    double lambda = 0.0;                 // max aggregate admissible rate
    std::vector<double> client_rates;    // per-client rates at the optimum
};

/// Max-throughput LP for a fixed caching vector: maximize lambda subject to
/// per-client rate splits, per-stage live flow conservation with processing
/// coupling, static supply, and link/compute capacities.
PlacementResult eval_placement_lp(const NetworkGraph& g,
                                  const std::vector<Client>& clients,
                                  const std::vector<ServiceSpec>& services,
                                  const CachingVector& x,
                                  StaticModel model = StaticModel::Linearized);

struct MilpOptions {
    long node_budget = 20000;      // total LP solves across search and heuristics
    int enumerate_max_bits = 18;   // exhaustive search cutoff
    bool force_enumeration = false;
    double int_tol = 1e-6;
    /// Branch pruning slack: a subtree is pruned when its relaxation bound is
    /// at most incumbent + gap_tol. Negative values widen the search past
    /// ties (a roundoff safety margin) for exact optima; incumbent updates
    /// always require a strict improvement.
    double gap_tol = 1e-7;
    long max_lp_iterations = 50000;  // per-relaxation simplex cap
};

struct MilpResult {
    bool feasible = false;
    bool optimal = false;  // proven within gap_tol (or exhaustive)
    double lambda = 0.0;
    CachingVector x{1, {}};
    long nodes_explored = 0;
};

/// Joint placement: choose a storage-feasible binary x maximizing the LP
/// throughput. Instances with few free bits (or force_enumeration) are solved
/// exhaustively; larger ones run branch and bound on the relaxed x in [0,1]
/// seeded by rounding and first-improvement local search, returning the best
/// incumbent when the budget runs out (optimal=false in that case).
MilpResult solve_milp_placement(const NetworkGraph& g,
                                const std::vector<Client>& clients,
                                const std::vector<ServiceSpec>& services,
                                const std::vector<double>& db_sizes,
                                const MilpOptions& options = {});

/// Storage-feasible placement drawn at random: databases are assigned in a
/// shuffled round-robin over nodes, skipping nodes without residual storage.
CachingVector random_placement(const NetworkGraph& g,
                               const std::vector<double>& db_sizes,
                               std::mt19937_64& rng);

}  // namespace dicnc
