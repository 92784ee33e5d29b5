#include "dicnc/placement.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>

namespace dicnc {

namespace {

// Largest useful supply of database k at node i: everything the node could
// push out plus everything local processing could consume per slot.
double supply_bound(const NetworkGraph& g, const std::vector<ServiceSpec>& services,
                    int i, int k) {
    double out = 0;
    for (int e : g.out_edges(i)) out += g.tx_capacity(e);
    double ratio = 0;
    for (const ServiceSpec& s : services)
        for (const FunctionSpec& f : s.functions)
            if (f.object == k && f.workload > 0)
                ratio = std::max(ratio, f.merging / f.workload);
    return out + g.proc_capacity(i) * ratio;
}

// Multi-commodity flow model of the max-throughput problem. Variables:
// aggregate rate, per-client rates, per-(client, stage) link flows, per-stage
// processing assignments, per-database static link flows, and optionally the
// relaxed caching bits.
class FlowModel {
  public:
    FlowModel(const NetworkGraph& g, const std::vector<Client>& clients,
              const std::vector<ServiceSpec>& services, int db_count,
              StaticModel model, bool x_as_vars, const CachingVector* fixed_x,
              const std::vector<double>* db_sizes = nullptr)
        : g_(g), clients_(clients), services_(services), K_(db_count) {
        if (model == StaticModel::StrictEquality && (x_as_vars || !fixed_x))
            throw std::invalid_argument("strict static model needs a fixed placement");

        const int n = g.node_count();
        const int E = g.edge_count();

        var_lambda_ = lp.add_var(1.0);
        rate_.resize(clients_.size());
        for (size_t c = 0; c < clients_.size(); ++c) {
            rate_[c] = lp.add_var(0.0);
            lp.add_row({{var_lambda_, clients_[c].popularity}, {rate_[c], -1.0}},
                       RowSense::LessEq, 0.0);
        }

        // Live flow and processing variables.
        flow_.resize(clients_.size());
        proc_.resize(clients_.size());
        for (size_t c = 0; c < clients_.size(); ++c) {
            const ServiceSpec& spec = services_[clients_[c].service];
            const int M = spec.stages();
            flow_[c].assign(M, std::vector<int>(E, -1));
            proc_[c].assign(M - 1, std::vector<int>(n, -1));
            for (int m = 1; m <= M; ++m) {
                for (int e = 0; e < E; ++e) {
                    // The delivered stage terminates at the destination.
                    if (m == M && g.edge(e).from == clients_[c].destination) continue;
                    flow_[c][m - 1][e] = lp.add_var(0.0);
                }
            }
            for (int m = 1; m < M; ++m)
                for (int i = 0; i < n; ++i) proc_[c][m - 1][i] = lp.add_var(0.0);
        }

        static_flow_.assign(K_, std::vector<int>(E, -1));
        for (int k = 0; k < K_; ++k)
            for (int e = 0; e < E; ++e) static_flow_[k][e] = lp.add_var(0.0);

        if (x_as_vars) {
            x_var_.assign(static_cast<size_t>(n) * K_, -1);
            for (int i = 0; i < n; ++i) {
                if (g.is_cloud(i)) continue;
                for (int k = 0; k < K_; ++k) {
                    int v = lp.add_var(0.0);
                    x_var_[i * K_ + k] = v;
                    lp.add_row({{v, 1.0}}, RowSense::LessEq, 1.0);
                }
            }
            for (int i = 0; i < n; ++i) {
                if (g.is_cloud(i)) continue;
                std::vector<std::pair<int, double>> row;
                for (int k = 0; k < K_; ++k)
                    row.push_back({x_var_[i * K_ + k], db_sizes->at(k)});
                lp.add_row(std::move(row), RowSense::LessEq, g.storage_capacity(i));
            }
        }

        build_live_conservation();
        build_static_rows(model, x_as_vars, fixed_x);
        build_capacity_rows();
    }

    static FlowModel with_x_vars(const NetworkGraph& g, const std::vector<Client>& clients,
                                 const std::vector<ServiceSpec>& services,
                                 const std::vector<double>& db_sizes) {
        return FlowModel(g, clients, services, static_cast<int>(db_sizes.size()),
                         StaticModel::Linearized, true, nullptr, &db_sizes);
    }

    LinearProgram lp;

    int x_var(int i, int k) const { return x_var_[i * K_ + k]; }
    const std::vector<int>& x_vars() const { return x_var_; }
    int lambda_var() const { return var_lambda_; }

    PlacementResult extract(const LpSolution& s) const {
        PlacementResult r;
        r.feasible = s.status == LpStatus::Optimal;
        if (!r.feasible) return r;
        r.lambda = s.x[var_lambda_];
        for (int v : rate_) r.client_rates.push_back(s.x[v]);
        return r;
    }

  private:
    void build_live_conservation() {
        const int n = g_.node_count();
        for (size_t c = 0; c < clients_.size(); ++c) {
            const Client& client = clients_[c];
            const ServiceSpec& spec = services_[client.service];
            const int M = spec.stages();
            for (int m = 1; m <= M; ++m) {
                for (int i = 0; i < n; ++i) {
                    if (m == M && i == client.destination) continue;  // sink
                    std::vector<std::pair<int, double>> row;
                    for (int e : g_.in_edges(i))
                        if (flow_[c][m - 1][e] >= 0) row.push_back({flow_[c][m - 1][e], 1.0});
                    for (int e : g_.out_edges(i))
                        if (flow_[c][m - 1][e] >= 0) row.push_back({flow_[c][m - 1][e], -1.0});
                    if (m == 1 && i == client.source) row.push_back({rate_[c], 1.0});
                    if (m > 1)
                        row.push_back({proc_[c][m - 2][i], spec.functions[m - 2].scaling});
                    if (m < M) row.push_back({proc_[c][m - 1][i], -1.0});
                    lp.add_row(std::move(row), RowSense::Equal, 0.0);
                }
            }
        }
    }

    void build_static_rows(StaticModel model, bool x_as_vars, const CachingVector* fixed_x) {
        const int n = g_.node_count();
        for (int k = 0; k < K_; ++k) {
            for (int i = 0; i < n; ++i) {
                // outflow + local demand - inflow <= supply at (i, k)
                std::vector<std::pair<int, double>> row;
                for (int e : g_.out_edges(i)) row.push_back({static_flow_[k][e], 1.0});
                for (int e : g_.in_edges(i)) row.push_back({static_flow_[k][e], -1.0});
                for (size_t c = 0; c < clients_.size(); ++c) {
                    const ServiceSpec& spec = services_[clients_[c].service];
                    for (int m = 1; m < spec.stages(); ++m) {
                        const FunctionSpec& f = spec.functions[m - 1];
                        if (f.object == k && f.merging > 0)
                            row.push_back({proc_[c][m - 1][i], f.merging});
                    }
                }
                const double bound = supply_bound(g_, services_, i, k);
                if (model == StaticModel::StrictEquality) {
                    // Exact conservation; only caching nodes (and the cloud)
                    // get an injection variable.
                    const bool holds = g_.is_cloud(i) || fixed_x->cached(i, k);
                    if (holds) row.push_back({lp.add_var(0.0), -1.0});
                    lp.add_row(std::move(row), RowSense::Equal, 0.0);
                } else if (x_as_vars && !g_.is_cloud(i)) {
                    row.push_back({x_var_[i * K_ + k], -bound});
                    lp.add_row(std::move(row), RowSense::LessEq, 0.0);
                } else {
                    const bool holds = g_.is_cloud(i) || (fixed_x && fixed_x->cached(i, k));
                    lp.add_row(std::move(row), RowSense::LessEq, holds ? bound : 0.0);
                }
            }
        }
    }

    void build_capacity_rows() {
        const int n = g_.node_count();
        const int E = g_.edge_count();
        for (int e = 0; e < E; ++e) {
            std::vector<std::pair<int, double>> row;
            for (size_t c = 0; c < clients_.size(); ++c)
                for (const auto& stage : flow_[c])
                    if (stage[e] >= 0) row.push_back({stage[e], 1.0});
            for (int k = 0; k < K_; ++k) row.push_back({static_flow_[k][e], 1.0});
            lp.add_row(std::move(row), RowSense::LessEq, g_.tx_capacity(e));
        }
        for (int i = 0; i < n; ++i) {
            std::vector<std::pair<int, double>> row;
            for (size_t c = 0; c < clients_.size(); ++c) {
                const ServiceSpec& spec = services_[clients_[c].service];
                for (int m = 1; m < spec.stages(); ++m)
                    row.push_back({proc_[c][m - 1][i], spec.functions[m - 1].workload});
            }
            if (!row.empty())
                lp.add_row(std::move(row), RowSense::LessEq, g_.proc_capacity(i));
        }
    }

    const NetworkGraph& g_;
    const std::vector<Client>& clients_;
    const std::vector<ServiceSpec>& services_;
    int K_;
    int var_lambda_ = -1;
    std::vector<int> rate_;
    std::vector<std::vector<std::vector<int>>> flow_;  // [client][stage-1][edge]
    std::vector<std::vector<std::vector<int>>> proc_;  // [client][stage-1][node]
    std::vector<std::vector<int>> static_flow_;        // [db][edge]
    std::vector<int> x_var_;                           // [node*K + db], -1 = none
};

}  // namespace

PlacementResult eval_placement_lp(const NetworkGraph& g,
                                  const std::vector<Client>& clients,
                                  const std::vector<ServiceSpec>& services,
                                  const CachingVector& x, StaticModel model) {
    FlowModel fm(g, clients, services, x.db_count(), model, false, &x);
    return fm.extract(solve_lp(fm.lp));
}

MilpResult solve_milp_placement(const NetworkGraph& g,
                                const std::vector<Client>& clients,
                                const std::vector<ServiceSpec>& services,
                                const std::vector<double>& db_sizes,
                                const MilpOptions& options) {
    const int n = g.node_count();
    const int K = static_cast<int>(db_sizes.size());
    std::vector<int> free_nodes;
    for (int i = 0; i < n; ++i)
        if (!g.is_cloud(i)) free_nodes.push_back(i);
    const long bits = static_cast<long>(free_nodes.size()) * K;

    MilpResult best;
    best.x = CachingVector(n, db_sizes);

    if (options.force_enumeration || bits <= options.enumerate_max_bits) {
        for (unsigned long code = 0; code < (1ul << bits); ++code) {
            CachingVector x(n, db_sizes);
            for (long b = 0; b < bits; ++b)
                if (code & (1ul << b))
                    x.set(free_nodes[b / K], static_cast<int>(b % K), true);
            if (!check_storage_feasible(x, g).ok) continue;
            ++best.nodes_explored;
            PlacementResult r = eval_placement_lp(g, clients, services, x);
            if (r.feasible &&
                (!best.feasible || r.lambda > best.lambda + std::max(0.0, options.gap_tol))) {
                best.feasible = true;
                best.lambda = r.lambda;
                best.x = x;
            }
        }
        best.optimal = best.feasible;
        return best;
    }

    FlowModel fm = FlowModel::with_x_vars(g, clients, services, db_sizes);
    const size_t base_rows = fm.lp.rows.size();

    // Integral placements already priced by a heuristic; every fresh pricing
    // counts one LP solve against the node budget.
    std::set<std::vector<uint8_t>> seen;
    auto bits_of = [&](const CachingVector& x) {
        std::vector<uint8_t> b;
        b.reserve(bits);
        for (int i : free_nodes)
            for (int k = 0; k < K; ++k) b.push_back(x.cached(i, k) ? 1 : 0);
        return b;
    };
    auto offer = [&](const CachingVector& x) -> bool {
        if (!seen.insert(bits_of(x)).second) return false;
        ++best.nodes_explored;
        PlacementResult r = eval_placement_lp(g, clients, services, x);
        if (r.feasible &&
            (!best.feasible || r.lambda > best.lambda + std::max(0.0, options.gap_tol))) {
            best.feasible = true;
            best.lambda = r.lambda;
            best.x = x;
            return true;
        }
        return false;
    };

    struct Node {
        std::vector<std::pair<int, double>> fixes;  // (variable, 0 or 1)
        double bound = kInf;
    };
    // Greedy rounding of a relaxed solution: cache by descending fractional
    // value at each node while storage allows.
    auto rounded = [&](const LpSolution& s) {
        CachingVector rx(n, db_sizes);
        std::vector<std::pair<double, int>> order;
        for (int i : free_nodes) {
            order.clear();
            for (int k = 0; k < K; ++k)
                if (s.x[fm.x_var(i, k)] > options.int_tol)
                    order.push_back({-s.x[fm.x_var(i, k)], k});
            std::sort(order.begin(), order.end());
            for (auto [neg, k] : order)
                if (rx.used_storage(i) + db_sizes[k] <= g.storage_capacity(i))
                    rx.set(i, k, true);
        }
        return rx;
    };

    bool clean = true;  // no relaxation hit the iteration cap

    // Root relaxation + rounding for a first incumbent.
    {
        ++best.nodes_explored;
        LpSolution root = solve_lp(fm.lp, options.max_lp_iterations);
        if (root.status == LpStatus::Optimal) offer(rounded(root));
        if (root.status == LpStatus::IterLimit) clean = false;
    }

    // First-improvement local search over single-bit flips and per-node
    // swaps, run to convergence within the node budget. Integral pricing is
    // far cheaper than a branch-and-bound relaxation, so spending budget here
    // first yields better incumbents per LP solve.
    if (best.feasible) {
        const long search_budget = options.node_budget;
        bool improved = true;
        while (improved && best.nodes_explored < search_budget) {
            improved = false;
            for (int i : free_nodes) {
                for (int k = 0; k < K && !improved; ++k) {
                    if (best.nodes_explored >= search_budget) break;
                    CachingVector cand = best.x;
                    cand.set(i, k, !cand.cached(i, k));
                    if (cand.used_storage(i) <= g.storage_capacity(i)) {
                        improved = offer(cand);
                        continue;
                    }
                    // Adding k overflows node i: try swapping it in for each
                    // currently cached database instead.
                    for (int k2 = 0; k2 < K && !improved; ++k2) {
                        if (k2 == k || !best.x.cached(i, k2)) continue;
                        if (best.nodes_explored >= search_budget) break;
                        CachingVector swap = best.x;
                        swap.set(i, k2, false);
                        swap.set(i, k, true);
                        if (swap.used_storage(i) <= g.storage_capacity(i))
                            improved = offer(swap);
                    }
                }
                if (improved) break;
            }
        }
    }

    std::vector<Node> stack{Node{}};
    while (!stack.empty() && best.nodes_explored < options.node_budget) {
        Node node = std::move(stack.back());
        stack.pop_back();
        if (best.feasible && node.bound <= best.lambda + options.gap_tol) continue;
        ++best.nodes_explored;

        fm.lp.rows.resize(base_rows);
        for (auto [v, val] : node.fixes)
            fm.lp.add_row({{v, 1.0}}, RowSense::Equal, val);
        LpSolution s = solve_lp(fm.lp, options.max_lp_iterations);
        fm.lp.rows.resize(base_rows);
        if (s.status == LpStatus::IterLimit) {
            clean = false;
            continue;
        }
        if (s.status != LpStatus::Optimal) continue;
        if (best.feasible && s.x[fm.lambda_var()] <= best.lambda + options.gap_tol)
            continue;

        offer(rounded(s));

        // Most fractional caching bit.
        int branch_var = -1;
        double worst = options.int_tol;
        for (int i : free_nodes) {
            for (int k = 0; k < K; ++k) {
                const int v = fm.x_var(i, k);
                const double f = std::abs(s.x[v] - std::round(s.x[v]));
                if (f > worst) {
                    worst = f;
                    branch_var = v;
                }
            }
        }
        if (branch_var < 0) {
            // Integral relaxation: the rounding offer above already priced
            // this exact placement. In exact mode (negative gap_tol) a tied
            // completion of the still-unfixed bits may beat the incumbent by
            // roundoff, so keep branching on the first unfixed bit; otherwise
            // the relaxation value dominates the subtree and we are done.
            if (options.gap_tol >= 0) continue;
            for (int i : free_nodes) {
                for (int k = 0; k < K && branch_var < 0; ++k) {
                    const int v = fm.x_var(i, k);
                    bool fixed = false;
                    for (auto [fv, val] : node.fixes) fixed = fixed || fv == v;
                    if (!fixed) branch_var = v;
                }
                if (branch_var >= 0) break;
            }
            if (branch_var < 0) continue;  // every bit fixed: a true leaf
        }
        const double frac = s.x[branch_var];
        Node down = node, up = node;
        down.fixes.push_back({branch_var, 0.0});
        up.fixes.push_back({branch_var, 1.0});
        down.bound = up.bound = s.x[fm.lambda_var()];
        // Explore the rounding-suggested side first (it is pushed last).
        if (frac >= 0.5) {
            stack.push_back(std::move(down));
            stack.push_back(std::move(up));
        } else {
            stack.push_back(std::move(up));
            stack.push_back(std::move(down));
        }
    }
    best.optimal = best.feasible && stack.empty() && clean;
    return best;
}

CachingVector random_placement(const NetworkGraph& g, const std::vector<double>& db_sizes,
                               std::mt19937_64& rng) {
    const int n = g.node_count();
    const int K = static_cast<int>(db_sizes.size());
    CachingVector x(n, db_sizes);
    std::vector<double> residual(n);
    std::vector<int> nodes;
    for (int i = 0; i < n; ++i) {
        residual[i] = g.storage_capacity(i);
        if (!g.is_cloud(i)) nodes.push_back(i);
    }
    std::vector<int> order(K);
    for (int k = 0; k < K; ++k) order[k] = k;
    std::shuffle(order.begin(), order.end(), rng);
    for (int k : order) {
        std::shuffle(nodes.begin(), nodes.end(), rng);
        for (int i : nodes) {
            if (residual[i] + 1e-12 >= db_sizes[k]) {
                x.set(i, k, true);
                residual[i] -= db_sizes[k];
                break;
            }
        }
    }
    return x;
}

}  // namespace dicnc
