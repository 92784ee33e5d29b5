#include "dicnc/services.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace dicnc {

void ServiceSpec::validate() const {
    if (packet_size <= 0) throw std::invalid_argument("packet size must be positive");
    for (const FunctionSpec& f : functions) {
        if (f.scaling <= 0) throw std::invalid_argument("scaling factor must be positive");
        if (f.workload <= 0) throw std::invalid_argument("workload must be positive");
        if (f.merging < 0) throw std::invalid_argument("merging ratio must be nonnegative");
        if (f.object < 0) throw std::invalid_argument("object name must be a database id");
    }
}

std::vector<double> cumulative_scaling(const ServiceSpec& spec) {
    std::vector<double> xi(spec.stages());
    xi[0] = 1.0;
    for (int m = 1; m < spec.stages(); ++m)
        xi[m] = spec.functions[m - 1].scaling * xi[m - 1];
    return xi;
}

std::vector<double> zipf_popularity(int n, double gamma, const std::vector<int>& order) {
    if (n < 1) throw std::invalid_argument("need at least one entry");
    if (gamma < 0) throw std::invalid_argument("negative Zipf exponent");
    if (!order.empty() && static_cast<int>(order.size()) != n)
        throw std::invalid_argument("order size mismatch");
    std::vector<double> p(n);
    double total = 0;
    for (int r = 0; r < n; ++r) total += std::pow(r + 1, -gamma);
    for (int r = 0; r < n; ++r) {
        int who = order.empty() ? r : order[r];
        if (who < 0 || who >= n) throw std::invalid_argument("order is not a permutation");
        p[who] = std::pow(r + 1, -gamma) / total;
    }
    return p;
}

ArrivalModel::ArrivalModel(ArrivalConfig config, int client_count, uint64_t seed)
    : config_(std::move(config)), clients_(client_count), rng_(seed) {
    if (clients_ < 1) throw std::invalid_argument("need at least one client");
    if (config_.total_rate < 0) throw std::invalid_argument("negative arrival rate");
    order_ = config_.initial_order;
    if (order_.empty()) {
        order_.resize(clients_);
        std::iota(order_.begin(), order_.end(), 0);
    }
    if (static_cast<int>(order_.size()) != clients_)
        throw std::invalid_argument("initial order size mismatch");
    refresh_rates();
}

void ArrivalModel::refresh_rates() {
    switch (config_.kind) {
        case ArrivalKind::Poisson:
        case ArrivalKind::Deterministic: {
            std::vector<double> p = config_.popularity;
            if (p.empty()) p.assign(clients_, 1.0 / clients_);
            if (static_cast<int>(p.size()) != clients_)
                throw std::invalid_argument("popularity size mismatch");
            rates_.resize(clients_);
            for (int c = 0; c < clients_; ++c) rates_[c] = config_.total_rate * p[c];
            break;
        }
        case ArrivalKind::MarkovZipf: {
            std::vector<double> p = zipf_popularity(clients_, config_.zipf_gamma, order_);
            rates_.resize(clients_);
            for (int c = 0; c < clients_; ++c) rates_[c] = config_.total_rate * p[c];
            break;
        }
    }
    max_burst_.resize(clients_);
    for (int c = 0; c < clients_; ++c) {
        max_burst_[c] = config_.max_burst_factor > 0
                            ? static_cast<long>(std::ceil(config_.max_burst_factor *
                                                          std::max(rates_[c], 1.0)))
                            : std::numeric_limits<long>::max();
    }
}

void ArrivalModel::force_swap(int rank) {
    if (rank < 0 || rank + 1 >= clients_) throw std::out_of_range("bad swap rank");
    std::swap(order_[rank], order_[rank + 1]);
    refresh_rates();
}

std::vector<long> ArrivalModel::draw() {
    if (config_.kind == ArrivalKind::MarkovZipf && clients_ > 1) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        if (u(rng_) < config_.swap_prob) {
            std::uniform_int_distribution<int> pick(0, clients_ - 2);
            force_swap(pick(rng_));
        }
    }
    std::vector<long> a(clients_, 0);
    if (config_.kind == ArrivalKind::Deterministic) {
        // Fixed schedule for hand-traced scenarios: round(rate) every slot.
        for (int c = 0; c < clients_; ++c) a[c] = std::lround(rates_[c]);
        return a;
    }
    for (int c = 0; c < clients_; ++c) {
        if (rates_[c] <= 0) continue;
        std::poisson_distribution<long> pois(rates_[c]);
        long n = pois(rng_);
        if (n > max_burst_[c]) {
            clipped_ += n - max_burst_[c];
            n = max_burst_[c];
        }
        a[c] = n;
    }
    return a;
}

}  // namespace dicnc
