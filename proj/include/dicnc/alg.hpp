#pragma once

#include <string>
#include <vector>

#include "dicnc/services.hpp"
#include "dicnc/topology.hpp"

namespace dicnc {

enum class AlgEdgeKind {
    LiveTransmit,    // (i_m, j_m)        -> link (i, j)
    StaticTransmit,  // (i'_m, j'_m)      -> link (i, j)
    Replication,     // (o'_m, v'_m)      -> no resource
    LiveProcess,     // (i_m, i_{m+1})    -> node i
    StaticProcess,   // (i'_m, i_{m+1})   -> node i
};

struct AlgEdge {
    AlgEdgeKind kind;
    int stage;          // m, 1-based
    int tail;           // actual node id; -1 for the super static source o'_m
    int head;           // actual node id
    int resource_edge;  // actual edge index for transmit kinds, else -1
    int resource_node;  // actual node for process kinds, else -1
};

/// Layered routing graph of one (service, caching vector) pair. Live
/// pipelines copy the actual topology per stage; static pipelines add a super
/// static source o'_m wired to the current V(k_m). Read-only after build.
class AugmentedLayeredGraph {
public:
    AugmentedLayeredGraph(const ServiceSpec& spec, const CachingVector& x,
                          const NetworkGraph& g);

    int stages() const { return stages_; }
    int node_count() const;
    const std::vector<AlgEdge>& edges() const { return edges_; }
    const std::vector<int>& edges_of_kind(AlgEdgeKind kind) const;

    /// V(k_m) per function stage m = 1..M-1 (0-indexed by m-1), sorted.
    const std::vector<std::vector<int>>& stage_sources() const { return stage_sources_; }

    /// Function stages whose static source set is empty while zeta_m > 0.
    /// The graph is still built; routes through these stages are infeasible.
    const std::vector<int>& infeasible_stages() const { return infeasible_stages_; }

    /// Plain-text edge list for golden-file tests.
    std::string export_edge_list() const;

private:
    int actual_nodes_;
    int stages_;
    std::vector<AlgEdge> edges_;
    std::vector<std::vector<int>> by_kind_;
    std::vector<std::vector<int>> stage_sources_;
    std::vector<int> infeasible_stages_;
};

/// Per-request load w of an ALG edge (the four-case table): Xi_m r_m on
/// live-process, 0 on static-process and replication, Xi_m on live-transmit,
/// Xi_m zeta_m on static-transmit.
double edge_load(const ServiceSpec& spec, const std::vector<double>& cumulative,
                 const AlgEdge& edge);

/// One acyclic delivery plan: processing locations theta^(m) plus per-stage
/// live and static transmission paths (node sequences in the actual network).
struct EfficientRoute {
    int client = -1;
    int service = 0;
    std::vector<int> theta;                       // size M-1
    std::vector<std::vector<int>> live_paths;     // size M; live_paths[m] runs
                                                  // theta^(m) .. theta^(m+1)
    std::vector<int> static_sources;              // size M-1; -1 when zeta_m = 0
    std::vector<std::vector<int>> static_paths;   // size M-1; v .. theta^(m)
};

struct ResourceLoads {
    std::vector<double> node;  // rho_i, compute units per request
    std::vector<double> link;  // rho_ij by edge index, data units per request

    ResourceLoads() = default;
    explicit ResourceLoads(const NetworkGraph& g)
        : node(g.node_count(), 0.0), link(g.edge_count(), 0.0) {}
    void accumulate(const ResourceLoads& other, double count);
};

/// Resource loads rho induced by pushing one request along the route; ALG
/// edges sharing an actual node/link accumulate.
ResourceLoads route_loads(const EfficientRoute& route, const ServiceSpec& spec,
                          const NetworkGraph& g);

}  // namespace dicnc
