#include "dicnc/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dicnc {

namespace {

constexpr double kEps = 1e-12;
constexpr double kSnap = 1e-9;  // residue below this is rounding debris

}  // namespace

Simulator::Simulator(const NetworkGraph& g, std::vector<ServiceSpec> services,
                     std::vector<Client> clients, CachingVector x,
                     ArrivalConfig arrivals, uint64_t seed, SimConfig config)
    : g_(g),
      services_(std::move(services)),
      clients_(std::move(clients)),
      x_(std::move(x)),
      queues_(g_),
      engine_(g_),
      arrivals_(std::move(arrivals), static_cast<int>(clients_.size()), seed),
      config_(config) {
    for (size_t c = 0; c < clients_.size(); ++c)
        if (clients_[c].id != static_cast<int>(c))
            throw std::invalid_argument("client ids must equal their index");
    for (const ServiceSpec& s : services_) {
        s.validate();
        cumulative_.push_back(cumulative_scaling(s));
        m_max_ = std::max(m_max_, static_cast<double>(s.stages()));
        const auto& cum = cumulative_.back();
        for (int m = 1; m <= s.stages(); ++m) {
            z_max_ = std::max(z_max_, cum[m - 1]);
            if (m < s.stages())
                z_max_ = std::max(z_max_, cum[m - 1] * s.functions[m - 1].merging);
        }
    }
    z_max_ = std::max(z_max_, 1.0);
    set_caching(x_);
    link_q_.resize(g_.edge_count());
    pairing_.resize(g_.node_count());
    last_arrivals_.assign(clients_.size(), 0);
    frame_arrivals_.assign(clients_.size(), 0);
    delivered_per_client_.assign(clients_.size(), 0.0);
}

void Simulator::set_caching(const CachingVector& x) {
    x_ = x;
    contexts_.clear();
    for (const ServiceSpec& s : services_) contexts_.emplace_back(s, x_, g_);
}

void Simulator::reset_arrival_mark() {
    std::fill(frame_arrivals_.begin(), frame_arrivals_.end(), 0);
}

double Simulator::mean_delay() const {
    return delivered_units_ > 0 ? delay_unit_sum_ / delivered_units_ : 0.0;
}

const std::vector<int>& Simulator::path_of(const Batch& b, const Chunk& c) const {
    return c.live ? b.route.live_paths[c.stage - 1] : b.route.static_paths[c.stage - 1];
}

void Simulator::violation(const std::string& what) {
    if (invariants_.violations == 0) invariants_.first = what;
    ++invariants_.violations;
}

void Simulator::deliver(const Chunk& c) {
    Batch& b = batches_.at(c.batch);
    const double delay = static_cast<double>(slot_ - b.birth + 1);
    delivered_units_ += c.units;
    delay_unit_sum_ += c.units * delay;
    const double final_scale = cumulative_[clients_[b.client].service].back();
    delivered_requests_ += c.units / final_scale;
    delivered_per_client_[b.client] += c.units / final_scale;
    b.delivered += c.units;
    backlog_total_ -= c.units;
    b.items -= 1;
    release_if_done(c.batch);
}

void Simulator::release_if_done(int64_t batch_id) {
    auto it = batches_.find(batch_id);
    if (it == batches_.end() || it->second.items > 0) return;
    const Batch& b = it->second;
    if (config_.monitor_invariants) {
        const double expect =
            static_cast<double>(b.count) * cumulative_[clients_[b.client].service].back();
        if (std::abs(b.delivered - expect) > 1e-6 * std::max(1.0, expect))
            violation("request conservation: delivered units mismatch");
    }
    alive_requests_ -= b.count;
    batches_.erase(it);
}

void Simulator::enter_pairing(int node, Chunk&& c) {
    auto [it, is_new] = pairing_[node].try_emplace(PairKey{c.batch, c.stage});
    if (!is_new) {
        batches_.at(c.batch).items -= 1;  // token merges into the entry
    }
    if (c.live) {
        it->second.live += c.units;
        it->second.hops = c.hops;
    } else {
        it->second.stat += c.units;
    }
}

// Move a chunk one step along its itinerary. `immediate` holds only at
// admission: a freshly admitted chunk may be transmitted or paired in the
// same slot, while anything that crossed a link waits for the slot boundary.
void Simulator::chunk_arrived(Chunk c) {
    const Batch& b = batches_.at(c.batch);
    const auto& path = path_of(b, c);
    const ServiceSpec& spec = services_[clients_[b.client].service];
    if (c.pos == static_cast<int>(path.size()) - 1) {
        if (c.live && c.stage == spec.stages()) {
            deliver(c);
        } else {
            pending_pair_.push_back({path.back(), std::move(c)});
        }
        return;
    }
    const int e = g_.edge_between(path[c.pos], path[c.pos + 1]);
    pending_link_.push_back({e, std::move(c)});
}

void Simulator::admit(const std::vector<SelectedRoute>& routes) {
    for (const SelectedRoute& sel : routes) {
        const Client& client = clients_[sel.client];
        const ServiceSpec& spec = services_[client.service];
        const auto& cum = cumulative_[client.service];
        const int64_t id = next_batch_++;
        Batch& b = batches_[id];
        b.client = sel.client;
        b.count = sel.count;
        b.birth = slot_;
        b.route = sel.route;
        alive_requests_ += sel.count;

        auto place = [&](Chunk c) {
            b.items += 1;
            backlog_total_ += c.units;
            const auto& path = path_of(b, c);
            if (c.pos == static_cast<int>(path.size()) - 1) {
                if (c.live && c.stage == spec.stages()) {
                    deliver(c);  // source = processing = destination collapse
                } else {
                    enter_pairing(path.back(), std::move(c));
                }
            } else {
                const int e = g_.edge_between(path[c.pos], path[c.pos + 1]);
                backlog_link_ += c.units;
                link_q_[e].push_back(std::move(c));
            }
        };
        place(Chunk{id, static_cast<double>(sel.count), 0, 1, true, 0});
        for (int m = 1; m < spec.stages(); ++m) {
            const FunctionSpec& f = spec.functions[m - 1];
            if (f.merging <= 0) continue;
            place(Chunk{id, f.merging * cum[m - 1] * sel.count, 0, m, false, 0});
        }
    }
}

void Simulator::serve_links() {
    auto before = [](const Chunk& a, const Chunk& b) {
        if (a.hops != b.hops) return a.hops < b.hops;
        if (a.batch != b.batch) return a.batch < b.batch;
        if (a.stage != b.stage) return a.stage < b.stage;
        return a.live && !b.live;
    };
    for (int e = 0; e < g_.edge_count(); ++e) {
        auto& q = link_q_[e];
        if (q.empty()) continue;
        double cap = g_.tx_capacity(e);
        if (cap <= 0) continue;
        std::sort(q.begin(), q.end(), before);
        size_t i = 0;
        while (i < q.size() && cap > kEps) {
            Chunk& c = q[i];
            if (c.units <= cap + kSnap) {
                cap -= c.units;
                backlog_link_ -= c.units;
                Chunk moved = c;
                ++moved.hops;
                ++moved.pos;
                chunk_arrived(std::move(moved));
                ++i;
            } else {
                Chunk moved = c;
                moved.units = cap;
                ++moved.hops;
                ++moved.pos;
                c.units -= cap;
                batches_.at(c.batch).items += 1;  // the split creates a piece
                backlog_link_ -= cap;
                chunk_arrived(std::move(moved));
                cap = 0;
            }
        }
        q.erase(q.begin(), q.begin() + i);
    }
}

void Simulator::serve_nodes() {
    struct Candidate {
        int hops;
        PairKey key;
    };
    for (int i = 0; i < g_.node_count(); ++i) {
        auto& pairs = pairing_[i];
        if (pairs.empty()) continue;
        double budget = g_.proc_capacity(i);
        if (budget <= 0) continue;
        std::vector<Candidate> order;
        order.reserve(pairs.size());
        for (const auto& [key, entry] : pairs) order.push_back({entry.hops, key});
        std::sort(order.begin(), order.end(), [](const Candidate& a, const Candidate& b) {
            if (a.hops != b.hops) return a.hops < b.hops;
            if (a.key.batch != b.key.batch) return a.key.batch < b.key.batch;
            return a.key.stage < b.key.stage;
        });
        for (const Candidate& cand : order) {
            if (budget <= kEps) break;
            auto it = pairs.find(cand.key);
            PairEntry& entry = it->second;
            Batch& b = batches_.at(cand.key.batch);
            const ServiceSpec& spec = services_[clients_[b.client].service];
            const FunctionSpec& f = spec.functions[cand.key.stage - 1];
            double ready = f.merging > 0 ? std::min(entry.live, entry.stat / f.merging)
                                         : entry.live;
            if (ready <= kEps) continue;
            const double l = std::min(ready, budget / f.workload);
            if (l <= kEps) continue;
            entry.live -= l;
            entry.stat -= f.merging * l;
            budget -= f.workload * l;
            if (entry.live < kSnap) entry.live = 0;
            if (entry.stat < kSnap) entry.stat = 0;
            backlog_total_ -= l * (1.0 + f.merging);
            const double out_units = f.scaling * l;
            backlog_total_ += out_units;
            Chunk out{cand.key.batch, out_units, entry.hops + 1, cand.key.stage + 1,
                      true, 0};
            b.items += 1;
            if (entry.live <= 0 && entry.stat <= 0) {
                b.items -= 1;
                pairs.erase(it);
            }
            chunk_arrived(std::move(out));
            release_if_done(cand.key.batch);
        }
    }
}

void Simulator::apply_buffers() {
    for (auto& [e, c] : pending_link_) {
        backlog_link_ += c.units;
        link_q_[e].push_back(std::move(c));
    }
    pending_link_.clear();
    for (auto& [node, c] : pending_pair_) {
        const int64_t id = c.batch;
        enter_pairing(node, std::move(c));
        release_if_done(id);
    }
    pending_pair_.clear();
}

void Simulator::sample() {
    SlotSample s;
    s.slot = slot_;
    s.backlog_total = backlog_total_;
    s.backlog_link = backlog_link_;
    for (int i = 0; i < g_.node_count(); ++i) {
        for (const auto& [key, entry] : pairing_[i]) {
            const Batch& b = batches_.at(key.batch);
            const FunctionSpec& f =
                services_[clients_[b.client].service].functions[key.stage - 1];
            const double ready = f.merging > 0
                                     ? std::min(entry.live, entry.stat / f.merging)
                                     : entry.live;
            s.backlog_processing += ready * (1.0 + f.merging);
            s.backlog_waiting += (entry.live - ready) + (entry.stat - f.merging * ready);
        }
    }
    s.virtual_backlog = queues_.total_backlog();
    s.delivered_requests = delivered_requests_;
    s.mean_delay = mean_delay();
    for (double r : arrivals_.current_rates()) s.lambda += r;
    if (config_.monitor_invariants) {
        const double bound = m_max_ * z_max_ * static_cast<double>(alive_requests_);
        if (s.backlog_waiting > bound + 1e-6) violation("waiting-queue bound exceeded");
        const double accounted = s.backlog_link + s.backlog_processing + s.backlog_waiting;
        if (std::abs(accounted - s.backlog_total) > 1e-6 * std::max(1.0, s.backlog_total))
            violation("backlog accounting mismatch");
    }
    samples_.push_back(s);
}

void Simulator::step() {
    last_arrivals_ = arrivals_.draw();
    for (size_t c = 0; c < clients_.size(); ++c) frame_arrivals_[c] += last_arrivals_[c];

    engine_.prepare(queues_);
    std::vector<int> infeasible;
    auto routes = select_routes(last_arrivals_, clients_, contexts_, engine_,
                                config_.policy, &infeasible);
    for (int id : infeasible) dropped_requests_ += last_arrivals_[id];

    for (const SelectedRoute& r : routes) {
        const double w2 = route_weight(r.loads, queues_, g_);
        const double err =
            std::abs(w2 - r.weight) / std::max({1.0, std::abs(w2), std::abs(r.weight)});
        max_weight_err_ = std::max(max_weight_err_, err);
        if (config_.monitor_invariants) {
            // Sampled-route flow conservation: every function stage has a
            // processing location and contiguous stage paths.
            const ServiceSpec& spec = services_[clients_[r.client].service];
            int prev = clients_[r.client].source;
            for (int m = 1; m <= spec.stages(); ++m) {
                const auto& path = r.route.live_paths[m - 1];
                const int to =
                    m == spec.stages() ? clients_[r.client].destination : r.route.theta[m - 1];
                if (path.empty() || path.front() != prev || path.back() != to)
                    violation("route stage path endpoints mismatch");
                prev = to;
            }
        }
    }

    admit(routes);
    serve_links();
    serve_nodes();
    apply_buffers();
    queues_.update(g_, virtual_arrivals(routes, g_));
    if (config_.sample_interval > 0 && slot_ % config_.sample_interval == 0) sample();
    ++slot_;
}

void Simulator::run(long slots) {
    for (long t = 0; t < slots; ++t) step();
}

}  // namespace dicnc
