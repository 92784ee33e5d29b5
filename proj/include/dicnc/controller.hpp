#pragma once

#include <vector>

#include "dicnc/alg.hpp"
#include "dicnc/services.hpp"
#include "dicnc/topology.hpp"

namespace dicnc {

/// Virtual resource-load backlogs Q~_i / Q~_ij with the update law
/// Q~(t+1) = [Q~(t) - C + a~(t)]+. Normalized views Q = Q~/C read as queuing
/// delays; a zero-capacity resource normalizes to +inf (excluded from routes).
class VirtualQueues {
public:
    explicit VirtualQueues(const NetworkGraph& g)
        : node_(g.node_count(), 0.0), link_(g.edge_count(), 0.0) {}

    void update(const NetworkGraph& g, const ResourceLoads& arrivals);

    double node_backlog(int i) const { return node_[i]; }
    double link_backlog(int e) const { return link_[e]; }

    double node_delay(const NetworkGraph& g, int i) const {
        return g.proc_capacity(i) > 0 ? node_[i] / g.proc_capacity(i) : kInf;
    }
    double link_delay(const NetworkGraph& g, int e) const {
        return g.tx_capacity(e) > 0 ? link_[e] / g.tx_capacity(e) : kInf;
    }

    double total_backlog() const;

    std::vector<double>& raw_node() { return node_; }
    std::vector<double>& raw_link() { return link_; }

private:
    std::vector<double> node_;
    std::vector<double> link_;
};

enum class RoutePolicy { DiDcnc, S2L, L2S };

struct MinErResult {
    bool feasible = false;
    double weight = kInf;  // ER weight of the returned route (edge-sum form)
    EfficientRoute route;
};

struct SelectedRoute {
    int client;
    long count;  // a^(c)(t), all assigned to the min-ER
    EfficientRoute route;
    ResourceLoads loads;  // per-request rho
    double weight;
};

/// Immutable per-service data shared by the controller and simulator.
/// Rebuilt whenever the caching vector changes.
struct ServiceContext {
    ServiceSpec spec;
    std::vector<double> cumulative;              // Xi
    std::vector<std::vector<int>> stage_sources; // V(k_m) per function stage

    ServiceContext() = default;
    ServiceContext(const ServiceSpec& s, const CachingVector& x, const NetworkGraph& g);
};

/// Min-ER search over the weighted ALG. One prepare() per slot computes
/// all-pairs SP0 over the actual graph (Floyd-Warshall, edge weight Q_ij/C_ij);
/// each min_er() call then runs the layer-by-layer DP plus back-tracing.
/// Ties break toward the lowest node index.
class RouteEngine {
public:
    explicit RouteEngine(const NetworkGraph& g);

    /// Recompute SP0 and node costs from the queue snapshot.
    void prepare(const VirtualQueues& queues);

    MinErResult min_er(const Client& client, const ServiceContext& ctx,
                       RoutePolicy policy = RoutePolicy::DiDcnc) const;

    /// Min-ER weight only, with stage m's source set overridden (used by the
    /// score-based replacement policy to toggle one cache entry).
    double min_er_weight(const Client& client, const ServiceContext& ctx,
                         const std::vector<std::vector<int>>& sources) const;

    double sp0(int i, int j) const { return dist_[idx(i, j)]; }
    std::vector<int> sp0_path(int i, int j) const;
    double node_cost(int i) const { return node_cost_[i]; }
    const NetworkGraph& graph() const { return g_; }

private:
    struct DpTables {
        std::vector<double> weight;  // W, stages x V, row-major
        std::vector<int> location;   // P, (stages-1) x V
        double final_weight = kInf;
    };
    DpTables run_dp(const Client& client, const ServiceContext& ctx,
                    const std::vector<std::vector<int>>& sources, RoutePolicy policy) const;

    int idx(int i, int j) const { return i * n_ + j; }

    const NetworkGraph& g_;
    int n_;
    std::vector<double> dist_;      // SP0
    std::vector<int> next_hop_;     // path reconstruction, -1 = unreachable
    std::vector<double> node_cost_; // Q_i / C_i
};

/// ER weight in the rho-sum form (Eq. (17) route weight): sum over resources
/// of (Q/C) * rho. Must match the DP's edge-sum weight for every route.
double route_weight(const ResourceLoads& loads, const VirtualQueues& queues,
                    const NetworkGraph& g);

/// Route all of each client's arrivals onto its min-ER. Clients with zero
/// arrivals are skipped; infeasible clients are reported via `infeasible`.
std::vector<SelectedRoute> select_routes(const std::vector<long>& arrivals,
                                         const std::vector<Client>& clients,
                                         const std::vector<ServiceContext>& services,
                                         const RouteEngine& engine, RoutePolicy policy,
                                         std::vector<int>* infeasible = nullptr);

/// Aggregate virtual arrivals a~ = sum_c rho^(c,sigma) a^(c,sigma).
ResourceLoads virtual_arrivals(const std::vector<SelectedRoute>& routes,
                               const NetworkGraph& g);

}  // namespace dicnc
