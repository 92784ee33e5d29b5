#pragma once

#include <random>
#include <string>
#include <vector>

namespace dicnc {

/// One service function: (scaling xi, workload r, object name k, merging
/// ratio zeta). Workload is compute units per input live data unit; merging
/// ratio is static data units per input live data unit.
struct FunctionSpec {
    double scaling = 1.0;
    double workload = 1.0;
    int object = 0;
    double merging = 0.0;
};

/// A chain service: M = functions + 1 live stages, one static input per
/// function.
struct ServiceSpec {
    int id = 0;
    std::vector<FunctionSpec> functions;
    double packet_size = 1.0;  // data units per initial live packet

    int stages() const { return static_cast<int>(functions.size()) + 1; }
    void validate() const;
};

/// Cumulative scaling Xi_1..Xi_M: stage-m live data units per initial packet.
std::vector<double> cumulative_scaling(const ServiceSpec& spec);

struct Client {
    int id = 0;
    int source = 0;
    int destination = 0;
    int service = 0;        // index into the service list
    double popularity = 0;  // p^(c); used by placement and Poisson splitting
};

/// Zipf weights p_i proportional to rank^-gamma, permuted so that
/// order[r] receives the weight of rank r (0-based, rank 0 most popular).
std::vector<double> zipf_popularity(int n, double gamma, const std::vector<int>& order);

enum class ArrivalKind { Poisson, MarkovZipf, Deterministic };

struct ArrivalConfig {
    ArrivalKind kind = ArrivalKind::Poisson;
    double total_rate = 0.0;          // aggregate mean arrivals per slot
    std::vector<double> popularity;   // Poisson mode split; empty = uniform
    double zipf_gamma = 1.0;          // MarkovZipf mode
    std::vector<int> initial_order;   // MarkovZipf rank -> client; empty = identity
    double swap_prob = 1e-6;          // per-slot probability of one rank swap
    double max_burst_factor = 10.0;   // A_max = factor * mean (0 disables clipping)
};

/// Per-run arrival process. Owns its RNG; draws are bit-reproducible under a
/// fixed seed. In MarkovZipf mode the per-client rates follow a
/// popularity-permutation Markov chain: with probability swap_prob per slot a
/// uniformly chosen adjacent pair of popularity ranks is exchanged.
class ArrivalModel {
public:
    ArrivalModel(ArrivalConfig config, int client_count, uint64_t seed);

    /// Arrival counts a^(c)(t) for one slot. Advances the RNG and, in
    /// MarkovZipf mode, the modulating chain.
    std::vector<long> draw();

    const std::vector<double>& current_rates() const { return rates_; }
    long clipped_arrivals() const { return clipped_; }
    const std::vector<int>& current_order() const { return order_; }

    /// Force an adjacent-rank swap (rank, rank+1); used by scripted scenarios.
    void force_swap(int rank);

private:
    void refresh_rates();

    ArrivalConfig config_;
    int clients_;
    std::mt19937_64 rng_;
    std::vector<int> order_;
    std::vector<double> rates_;
    std::vector<long> max_burst_;
    long clipped_ = 0;
};

}  // namespace dicnc
