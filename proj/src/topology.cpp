#include "dicnc/topology.hpp"

#include <algorithm>
#include <stdexcept>

namespace dicnc {

NetworkGraph::NetworkGraph(int node_count,
                           std::vector<Edge> edges,
                           std::vector<double> proc_capacity,
                           std::vector<double> storage_capacity,
                           std::optional<int> cloud_node,
                           double replacement_rate_cap)
    : node_count_(node_count),
      edges_(std::move(edges)),
      proc_capacity_(std::move(proc_capacity)),
      storage_capacity_(std::move(storage_capacity)),
      cloud_node_(cloud_node),
      replacement_rate_cap_(replacement_rate_cap) {
    if (node_count_ <= 0) throw std::invalid_argument("node count must be positive");
    if (static_cast<int>(proc_capacity_.size()) != node_count_ ||
        static_cast<int>(storage_capacity_.size()) != node_count_)
        throw std::invalid_argument("capacity vector size mismatch");
    for (double c : proc_capacity_)
        if (c < 0) throw std::invalid_argument("negative processing capacity");
    for (double s : storage_capacity_)
        if (s < 0) throw std::invalid_argument("negative storage capacity");
    if (cloud_node_ && (*cloud_node_ < 0 || *cloud_node_ >= node_count_))
        throw std::invalid_argument("cloud node out of range");
    if (replacement_rate_cap_ < 0)
        throw std::invalid_argument("negative replacement rate cap");

    out_.resize(node_count_);
    in_.resize(node_count_);
    for (int e = 0; e < edge_count(); ++e) {
        const Edge& ed = edges_[e];
        if (ed.from < 0 || ed.from >= node_count_ || ed.to < 0 || ed.to >= node_count_)
            throw std::invalid_argument("edge references unknown node");
        if (ed.from == ed.to) throw std::invalid_argument("self-loop edge");
        if (ed.capacity < 0) throw std::invalid_argument("negative link capacity");
        for (int other : out_[ed.from])
            if (edges_[other].to == ed.to)
                throw std::invalid_argument("parallel edge");
        out_[ed.from].push_back(e);
        in_[ed.to].push_back(e);
    }
}

int NetworkGraph::edge_between(int i, int j) const {
    for (int e : out_[i])
        if (edges_[e].to == j) return e;
    return -1;
}

NetworkGraph NetworkGraph::scaled(double alpha_proc, double alpha_tx) const {
    std::vector<Edge> edges = edges_;
    for (Edge& e : edges) e.capacity *= alpha_tx;
    std::vector<double> proc = proc_capacity_;
    for (double& c : proc) c *= alpha_proc;
    return NetworkGraph(node_count_, std::move(edges), std::move(proc),
                        storage_capacity_, cloud_node_, replacement_rate_cap_);
}

CachingVector::CachingVector(int node_count, std::vector<double> db_sizes)
    : node_count_(node_count), db_sizes_(std::move(db_sizes)) {
    if (node_count_ <= 0) throw std::invalid_argument("node count must be positive");
    for (double f : db_sizes_)
        if (f < 0) throw std::invalid_argument("negative database size");
    bits_.assign(static_cast<size_t>(node_count_) * db_sizes_.size(), 0);
}

double CachingVector::used_storage(int i) const {
    double used = 0;
    for (int k = 0; k < db_count(); ++k)
        if (cached(i, k)) used += db_sizes_[k];
    return used;
}

bool CachingVector::dominates(const CachingVector& other) const {
    if (node_count_ != other.node_count_ || db_count() != other.db_count()) return false;
    for (size_t b = 0; b < bits_.size(); ++b)
        if (other.bits_[b] && !bits_[b]) return false;
    return true;
}

std::vector<int> static_sources(const CachingVector& x, int k, const NetworkGraph& g) {
    if (k < 0 || k >= x.db_count()) throw std::out_of_range("unknown database id");
    std::vector<int> sources;
    for (int i = 0; i < x.node_count(); ++i) {
        if (g.is_cloud(i) || x.cached(i, k)) sources.push_back(i);
    }
    return sources;
}

StorageCheck check_storage_feasible(const CachingVector& x, const NetworkGraph& g) {
    StorageCheck result;
    for (int i = 0; i < x.node_count(); ++i) {
        if (g.is_cloud(i)) continue;
        if (x.used_storage(i) > g.storage_capacity(i) + 1e-12) {
            result.ok = false;
            result.violating_nodes.push_back(i);
        }
    }
    return result;
}

}  // namespace dicnc
