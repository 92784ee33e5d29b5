#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace dicnc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Edge {
    int from = 0;
    int to = 0;
    double capacity = 0.0;  // data units per slot
};

/// Directed network of edge servers with per-node compute/storage capacity
/// and per-link transmission capacity. Immutable after construction.
class NetworkGraph {
public:
    NetworkGraph(int node_count,
                 std::vector<Edge> edges,
                 std::vector<double> proc_capacity,
                 std::vector<double> storage_capacity,
                 std::optional<int> cloud_node = std::nullopt,
                 double replacement_rate_cap = kInf);

    int node_count() const { return node_count_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(int e) const { return edges_[e]; }

    const std::vector<int>& out_edges(int i) const { return out_[i]; }
    const std::vector<int>& in_edges(int i) const { return in_[i]; }

    /// Edge index of (i, j), or -1 if the link does not exist.
    int edge_between(int i, int j) const;

    double proc_capacity(int i) const { return proc_capacity_[i]; }
    double tx_capacity(int e) const { return edges_[e].capacity; }
    double storage_capacity(int i) const { return storage_capacity_[i]; }

    std::optional<int> cloud_node() const { return cloud_node_; }
    bool is_cloud(int i) const { return cloud_node_ && *cloud_node_ == i; }

    /// Metering cap for database replacement traffic (units per frame).
    /// Replacement uses a side channel and never competes with service links.
    double replacement_rate_cap() const { return replacement_rate_cap_; }

    /// Copy with all node capacities scaled by alpha_proc and all link
    /// capacities scaled by alpha_tx.
    NetworkGraph scaled(double alpha_proc, double alpha_tx) const;

private:
    int node_count_;
    std::vector<Edge> edges_;
    std::vector<double> proc_capacity_;
    std::vector<double> storage_capacity_;
    std::optional<int> cloud_node_;
    double replacement_rate_cap_;
    std::vector<std::vector<int>> out_;
    std::vector<std::vector<int>> in_;
};

/// Binary caching state x_{i,k} plus database sizes F_k. The cloud node, if
/// any, stores every database implicitly and is never counted against S_i.
class CachingVector {
public:
    CachingVector(int node_count, std::vector<double> db_sizes);

    int node_count() const { return node_count_; }
    int db_count() const { return static_cast<int>(db_sizes_.size()); }
    double db_size(int k) const { return db_sizes_[k]; }
    const std::vector<double>& db_sizes() const { return db_sizes_; }

    bool cached(int i, int k) const { return bits_[idx(i, k)] != 0; }
    void set(int i, int k, bool v) { bits_[idx(i, k)] = v ? 1 : 0; }

    /// Storage used at node i (sum of F_k over cached databases).
    double used_storage(int i) const;

    /// Componentwise x >= other.
    bool dominates(const CachingVector& other) const;

    bool operator==(const CachingVector& other) const = default;

private:
    int idx(int i, int k) const { return i * db_count() + k; }
    int node_count_;
    std::vector<double> db_sizes_;
    std::vector<uint8_t> bits_;
};

/// Static source set V(k): nodes caching database k, plus the cloud node.
/// Throws std::out_of_range on an unknown database id. An empty result means
/// any service stage needing k is infeasible.
std::vector<int> static_sources(const CachingVector& x, int k, const NetworkGraph& g);

struct StorageCheck {
    bool ok = true;
    std::vector<int> violating_nodes;
};

/// Verifies sum_k F_k x_{i,k} <= S_i at every node. Reports, never throws.
StorageCheck check_storage_feasible(const CachingVector& x, const NetworkGraph& g);

}  // namespace dicnc
