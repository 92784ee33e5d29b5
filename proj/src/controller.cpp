#include "dicnc/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dicnc {

namespace {

// 0 * inf = 0 here: a zero load never pays for an unreachable path.
double weighted(double load, double distance) {
    if (load == 0.0) return 0.0;
    return load * distance;
}

}  // namespace

void VirtualQueues::update(const NetworkGraph& g, const ResourceLoads& arrivals) {
    for (size_t i = 0; i < node_.size(); ++i)
        node_[i] = std::max(0.0, node_[i] - g.proc_capacity(static_cast<int>(i)) +
                                     arrivals.node[i]);
    for (size_t e = 0; e < link_.size(); ++e)
        link_[e] = std::max(0.0, link_[e] - g.tx_capacity(static_cast<int>(e)) +
                                     arrivals.link[e]);
}

double VirtualQueues::total_backlog() const {
    double total = 0;
    for (double q : node_) total += q;
    for (double q : link_) total += q;
    return total;
}

ServiceContext::ServiceContext(const ServiceSpec& s, const CachingVector& x,
                               const NetworkGraph& g)
    : spec(s), cumulative(cumulative_scaling(s)) {
    for (int m = 1; m < s.stages(); ++m)
        stage_sources.push_back(static_sources(x, s.functions[m - 1].object, g));
}

RouteEngine::RouteEngine(const NetworkGraph& g) : g_(g), n_(g.node_count()) {
    dist_.assign(static_cast<size_t>(n_) * n_, kInf);
    next_hop_.assign(static_cast<size_t>(n_) * n_, -1);
    node_cost_.assign(n_, kInf);
}

void RouteEngine::prepare(const VirtualQueues& queues) {
    std::fill(dist_.begin(), dist_.end(), kInf);
    std::fill(next_hop_.begin(), next_hop_.end(), -1);
    for (int i = 0; i < n_; ++i) {
        dist_[idx(i, i)] = 0.0;
        next_hop_[idx(i, i)] = i;
        double c = g_.proc_capacity(i);
        node_cost_[i] = c > 0 ? queues.node_delay(g_, i) / c : kInf;
    }
    for (int e = 0; e < g_.edge_count(); ++e) {
        const Edge& ed = g_.edge(e);
        if (ed.capacity <= 0) continue;
        double w = queues.link_delay(g_, e) / ed.capacity;
        if (w < dist_[idx(ed.from, ed.to)]) {
            dist_[idx(ed.from, ed.to)] = w;
            next_hop_[idx(ed.from, ed.to)] = ed.to;
        }
    }
    for (int k = 0; k < n_; ++k) {
        for (int i = 0; i < n_; ++i) {
            const double dik = dist_[idx(i, k)];
            if (dik == kInf) continue;
            for (int j = 0; j < n_; ++j) {
                const double through = dik + dist_[idx(k, j)];
                if (through < dist_[idx(i, j)]) {
                    dist_[idx(i, j)] = through;
                    next_hop_[idx(i, j)] = next_hop_[idx(i, k)];
                }
            }
        }
    }
}

std::vector<int> RouteEngine::sp0_path(int i, int j) const {
    if (dist_[idx(i, j)] == kInf) return {};
    std::vector<int> path{i};
    int at = i;
    while (at != j) {
        at = next_hop_[idx(at, j)];
        path.push_back(at);
    }
    return path;
}

RouteEngine::DpTables RouteEngine::run_dp(const Client& client, const ServiceContext& ctx,
                                          const std::vector<std::vector<int>>& sources,
                                          RoutePolicy policy) const {
    const ServiceSpec& spec = ctx.spec;
    const std::vector<double>& cum = ctx.cumulative;
    const int stages = spec.stages();

    DpTables t;
    t.weight.assign(static_cast<size_t>(stages) * n_, kInf);
    t.location.assign(static_cast<size_t>(std::max(stages - 1, 0)) * n_, -1);

    for (int i = 0; i < n_; ++i)
        t.weight[i] = weighted(cum[0], sp0(client.source, i));

    std::vector<double> base(n_);
    for (int m = 1; m < stages; ++m) {
        const FunctionSpec& f = spec.functions[m - 1];
        const double live_load = cum[m - 1];
        const double static_load = live_load * f.merging;
        const double proc_load = live_load * f.workload;
        const double next_load = cum[m];
        for (int j = 0; j < n_; ++j) {
            double b = t.weight[(m - 1) * n_ + j];
            if (policy == RoutePolicy::L2S &&
                std::find(sources[m - 1].begin(), sources[m - 1].end(), j) ==
                    sources[m - 1].end()) {
                base[j] = kInf;
                continue;
            }
            if (static_load > 0) {
                double best = kInf;
                for (int v : sources[m - 1]) best = std::min(best, sp0(v, j));
                // S2L optimizes the live pipeline alone; the static detour is
                // attached afterwards and still charged to the route's loads.
                if (policy != RoutePolicy::S2L) b += weighted(static_load, best);
                else if (best == kInf) b = kInf;
            }
            b += weighted(proc_load, node_cost_[j]);
            base[j] = b;
        }
        for (int i = 0; i < n_; ++i) {
            double best = kInf;
            int arg = -1;
            for (int j = 0; j < n_; ++j) {
                const double w = base[j] + weighted(next_load, sp0(j, i));
                if (w < best) {
                    best = w;
                    arg = j;
                }
            }
            t.weight[m * n_ + i] = best;
            t.location[(m - 1) * n_ + i] = arg;
        }
    }
    t.final_weight = t.weight[(stages - 1) * n_ + client.destination];
    return t;
}

MinErResult RouteEngine::min_er(const Client& client, const ServiceContext& ctx,
                                RoutePolicy policy) const {
    const ServiceSpec& spec = ctx.spec;
    const int stages = spec.stages();
    DpTables t = run_dp(client, ctx, ctx.stage_sources, policy);

    MinErResult result;
    if (!(t.final_weight < kInf)) return result;

    EfficientRoute& route = result.route;
    route.client = client.id;
    route.service = spec.id;
    route.theta.assign(std::max(stages - 1, 0), -1);
    route.live_paths.resize(stages);
    route.static_sources.assign(std::max(stages - 1, 0), -1);
    route.static_paths.resize(std::max(stages - 1, 0));

    // Back-tracing: theta^(m) = P(m, theta^(m+1)), theta^(M) = d.
    int after = client.destination;
    for (int m = stages - 1; m >= 1; --m) {
        route.theta[m - 1] = t.location[(m - 1) * n_ + after];
        after = route.theta[m - 1];
    }
    double weight = t.final_weight;
    int prev = client.source;
    for (int m = 1; m <= stages; ++m) {
        const int to = m == stages ? client.destination : route.theta[m - 1];
        route.live_paths[m - 1] = sp0_path(prev, to);
        prev = to;
    }
    for (int m = 1; m < stages; ++m) {
        const FunctionSpec& f = spec.functions[m - 1];
        if (f.merging <= 0) continue;
        const int at = route.theta[m - 1];
        double best = kInf;
        int arg = -1;
        for (int v : ctx.stage_sources[m - 1]) {
            const double d = sp0(v, at);
            if (d < best) {
                best = d;
                arg = v;
            }
        }
        route.static_sources[m - 1] = arg;
        route.static_paths[m - 1] = sp0_path(arg, at);
        if (policy == RoutePolicy::S2L)
            weight += weighted(ctx.cumulative[m - 1] * f.merging, best);
    }
    result.feasible = true;
    result.weight = weight;
    return result;
}

double RouteEngine::min_er_weight(const Client& client, const ServiceContext& ctx,
                                  const std::vector<std::vector<int>>& sources) const {
    return run_dp(client, ctx, sources, RoutePolicy::DiDcnc).final_weight;
}

double route_weight(const ResourceLoads& loads, const VirtualQueues& queues,
                    const NetworkGraph& g) {
    double total = 0;
    for (int i = 0; i < g.node_count(); ++i) {
        if (loads.node[i] == 0) continue;
        total += loads.node[i] * queues.node_delay(g, i) / g.proc_capacity(i);
    }
    for (int e = 0; e < g.edge_count(); ++e) {
        if (loads.link[e] == 0) continue;
        total += loads.link[e] * queues.link_delay(g, e) / g.tx_capacity(e);
    }
    return total;
}

std::vector<SelectedRoute> select_routes(const std::vector<long>& arrivals,
                                         const std::vector<Client>& clients,
                                         const std::vector<ServiceContext>& services,
                                         const RouteEngine& engine, RoutePolicy policy,
                                         std::vector<int>* infeasible) {
    std::vector<SelectedRoute> selected;
    for (size_t c = 0; c < clients.size(); ++c) {
        if (arrivals[c] <= 0) continue;
        const Client& client = clients[c];
        MinErResult r = engine.min_er(client, services[client.service], policy);
        if (!r.feasible) {
            if (infeasible) infeasible->push_back(client.id);
            continue;
        }
        SelectedRoute sel;
        sel.client = client.id;
        sel.count = arrivals[c];
        sel.weight = r.weight;
        sel.loads = route_loads(r.route, services[client.service].spec, engine.graph());
        sel.route = std::move(r.route);
        selected.push_back(std::move(sel));
    }
    return selected;
}

ResourceLoads virtual_arrivals(const std::vector<SelectedRoute>& routes,
                               const NetworkGraph& g) {
    ResourceLoads total(g);
    for (const SelectedRoute& r : routes)
        total.accumulate(r.loads, static_cast<double>(r.count));
    return total;
}

}  // namespace dicnc
