#include "dicnc/alg.hpp"

#include <sstream>
#include <stdexcept>

namespace dicnc {

AugmentedLayeredGraph::AugmentedLayeredGraph(const ServiceSpec& spec,
                                             const CachingVector& x,
                                             const NetworkGraph& g)
    : actual_nodes_(g.node_count()), stages_(spec.stages()) {
    spec.validate();
    by_kind_.resize(5);
    auto add = [&](AlgEdgeKind kind, int stage, int tail, int head, int re, int rn) {
        by_kind_[static_cast<int>(kind)].push_back(static_cast<int>(edges_.size()));
        edges_.push_back(AlgEdge{kind, stage, tail, head, re, rn});
    };

    for (int m = 1; m <= stages_; ++m) {
        for (int e = 0; e < g.edge_count(); ++e) {
            const Edge& ed = g.edge(e);
            add(AlgEdgeKind::LiveTransmit, m, ed.from, ed.to, e, -1);
        }
    }
    for (int m = 1; m < stages_; ++m) {
        const FunctionSpec& f = spec.functions[m - 1];
        for (int e = 0; e < g.edge_count(); ++e) {
            const Edge& ed = g.edge(e);
            add(AlgEdgeKind::StaticTransmit, m, ed.from, ed.to, e, -1);
        }
        std::vector<int> sources = static_sources(x, f.object, g);
        for (int v : sources) add(AlgEdgeKind::Replication, m, -1, v, -1, -1);
        stage_sources_.push_back(std::move(sources));
        if (stage_sources_.back().empty() && f.merging > 0) infeasible_stages_.push_back(m);
        for (int i = 0; i < actual_nodes_; ++i) {
            add(AlgEdgeKind::LiveProcess, m, i, i, -1, i);
            add(AlgEdgeKind::StaticProcess, m, i, i, -1, i);
        }
    }
}

int AugmentedLayeredGraph::node_count() const {
    // M live pipelines of |V| nodes, M-1 static pipelines of |V|+1 nodes.
    return stages_ * actual_nodes_ + (stages_ - 1) * (actual_nodes_ + 1);
}

const std::vector<int>& AugmentedLayeredGraph::edges_of_kind(AlgEdgeKind kind) const {
    return by_kind_[static_cast<int>(kind)];
}

std::string AugmentedLayeredGraph::export_edge_list() const {
    static const char* names[] = {"live-tx", "static-tx", "replicate", "live-proc",
                                  "static-proc"};
    std::ostringstream out;
    for (const AlgEdge& e : edges_) {
        out << names[static_cast<int>(e.kind)] << " m=" << e.stage << " ";
        if (e.tail < 0)
            out << "o'";
        else
            out << e.tail;
        out << "->" << e.head << "\n";
    }
    return out.str();
}

double edge_load(const ServiceSpec& spec, const std::vector<double>& cumulative,
                 const AlgEdge& edge) {
    const int m = edge.stage;
    switch (edge.kind) {
        case AlgEdgeKind::LiveProcess:
            return cumulative[m - 1] * spec.functions[m - 1].workload;
        case AlgEdgeKind::StaticProcess:
        case AlgEdgeKind::Replication:
            return 0.0;
        case AlgEdgeKind::LiveTransmit:
            return cumulative[m - 1];
        case AlgEdgeKind::StaticTransmit:
            return cumulative[m - 1] * spec.functions[m - 1].merging;
    }
    return 0.0;
}

void ResourceLoads::accumulate(const ResourceLoads& other, double count) {
    for (size_t i = 0; i < node.size(); ++i) node[i] += count * other.node[i];
    for (size_t e = 0; e < link.size(); ++e) link[e] += count * other.link[e];
}

ResourceLoads route_loads(const EfficientRoute& route, const ServiceSpec& spec,
                          const NetworkGraph& g) {
    const std::vector<double> cumulative = cumulative_scaling(spec);
    ResourceLoads loads(g);
    auto add_path = [&](const std::vector<int>& path, double per_hop) {
        for (size_t h = 0; h + 1 < path.size(); ++h) {
            int e = g.edge_between(path[h], path[h + 1]);
            if (e < 0) throw std::invalid_argument("route uses a nonexistent link");
            loads.link[e] += per_hop;
        }
    };
    for (int m = 1; m <= spec.stages(); ++m)
        add_path(route.live_paths[m - 1], cumulative[m - 1]);
    for (int m = 1; m < spec.stages(); ++m) {
        const FunctionSpec& f = spec.functions[m - 1];
        if (f.merging > 0) add_path(route.static_paths[m - 1], cumulative[m - 1] * f.merging);
        loads.node[route.theta[m - 1]] += cumulative[m - 1] * f.workload;
    }
    return loads;
}

}  // namespace dicnc
