#include "dicnc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace dicnc {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string policy_name(RoutePolicy p) {
    switch (p) {
        case RoutePolicy::DiDcnc: return "di-dcnc";
        case RoutePolicy::S2L: return "s2l";
        case RoutePolicy::L2S: return "l2s";
    }
    throw std::logic_error("bad policy");
}

RoutePolicy policy_from(const std::string& s) {
    if (s == "di-dcnc") return RoutePolicy::DiDcnc;
    if (s == "s2l") return RoutePolicy::S2L;
    if (s == "l2s") return RoutePolicy::L2S;
    throw std::runtime_error("unknown routing policy: " + s);
}

std::string arrival_name(ArrivalKind k) {
    switch (k) {
        case ArrivalKind::Poisson: return "poisson";
        case ArrivalKind::MarkovZipf: return "markov-zipf";
        case ArrivalKind::Deterministic: return "deterministic";
    }
    throw std::logic_error("bad arrival kind");
}

ArrivalKind arrival_from(const std::string& s) {
    if (s == "poisson") return ArrivalKind::Poisson;
    if (s == "markov-zipf") return ArrivalKind::MarkovZipf;
    if (s == "deterministic") return ArrivalKind::Deterministic;
    throw std::runtime_error("unknown arrival kind: " + s);
}

std::string source_name(PlacementSource p) {
    switch (p) {
        case PlacementSource::Fixed: return "fixed";
        case PlacementSource::Proposed: return "proposed";
        case PlacementSource::RandomPlacement: return "random-placement";
        case PlacementSource::RandomSelection: return "random-selection";
    }
    throw std::logic_error("bad placement source");
}

PlacementSource source_from(const std::string& s) {
    if (s == "fixed") return PlacementSource::Fixed;
    if (s == "proposed") return PlacementSource::Proposed;
    if (s == "random-placement") return PlacementSource::RandomPlacement;
    if (s == "random-selection") return PlacementSource::RandomSelection;
    throw std::runtime_error("unknown placement source: " + s);
}

std::string replace_name(ReplacePolicy p) {
    switch (p) {
        case ReplacePolicy::None: return "none";
        case ReplacePolicy::RateBased: return "rate";
        case ReplacePolicy::ScoreBased: return "score";
    }
    throw std::logic_error("bad replacement policy");
}

ReplacePolicy replace_from(const std::string& s) {
    if (s == "none") return ReplacePolicy::None;
    if (s == "rate") return ReplacePolicy::RateBased;
    if (s == "score") return ReplacePolicy::ScoreBased;
    throw std::runtime_error("unknown replacement policy: " + s);
}

std::string stamp(const Scenario& s) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "# scenario %s schema %d hash %016llx\n", s.name.c_str(),
                  kScenarioSchemaVersion, static_cast<unsigned long long>(scenario_hash(s)));
    return buf;
}

}  // namespace

void Scenario::validate() const {
    if (nodes <= 0) throw std::runtime_error("scenario: node count must be positive");
    if (services.empty()) throw std::runtime_error("scenario: no services");
    for (size_t c = 0; c < clients.size(); ++c)
        if (clients[c].id != static_cast<int>(c))
            throw std::runtime_error("scenario: client ids must be 0..n-1 in order");
    for (const ServiceSpec& s : services) s.validate();
    if (horizon < 0 || warmup < 0 || sample_interval <= 0)
        throw std::runtime_error("scenario: bad run parameters");
    if (frame_length <= 0) throw std::runtime_error("scenario: bad frame length");
}

NetworkGraph Scenario::build_graph() const {
    return NetworkGraph(nodes, links, proc_capacity, storage_capacity, cloud, replacement_cap);
}

CachingVector Scenario::build_placement(const NetworkGraph& g) const {
    CachingVector x(g.node_count(), db_sizes);
    const int K = x.db_count();
    switch (placement) {
        case PlacementSource::Fixed:
            for (auto [i, k] : cached) x.set(i, k, true);
            break;
        case PlacementSource::Proposed: {
            MilpResult r = solve_milp_placement(g, clients, services, db_sizes, milp);
            if (!r.feasible) throw std::runtime_error("placement search found no feasible placement");
            x = r.x;
            break;
        }
        case PlacementSource::RandomPlacement: {
            // Diversity-maximizing benchmark: one random permutation of the
            // databases, repeated, dealt out `placement_copies` at a time.
            std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
            std::vector<int> perm(K);
            std::iota(perm.begin(), perm.end(), 0);
            std::shuffle(perm.begin(), perm.end(), rng);
            size_t at = 0;
            for (int i = 0; i < g.node_count(); ++i) {
                if (g.is_cloud(i)) continue;
                for (int c = 0; c < placement_copies; ++c) {
                    int k = perm[at++ % K];
                    at %= K;
                    if (x.used_storage(i) + x.db_size(k) <= g.storage_capacity(i))
                        x.set(i, k, true);
                }
            }
            break;
        }
        case PlacementSource::RandomSelection: {
            std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
            std::vector<int> order(K);
            for (int i = 0; i < g.node_count(); ++i) {
                if (g.is_cloud(i)) continue;
                std::iota(order.begin(), order.end(), 0);
                std::shuffle(order.begin(), order.end(), rng);
                int taken = 0;
                for (int k : order) {
                    if (taken == placement_copies) break;
                    if (x.used_storage(i) + x.db_size(k) <= g.storage_capacity(i)) {
                        x.set(i, k, true);
                        ++taken;
                    }
                }
            }
            break;
        }
    }
    StorageCheck sc = check_storage_feasible(x, g);
    if (!sc.ok) throw std::runtime_error("scenario placement violates storage capacity");
    return x;
}

std::string scenario_to_json(const Scenario& s) {
    json j;
    j["schema"] = kScenarioSchemaVersion;
    j["name"] = s.name;
    json net;
    net["nodes"] = s.nodes;
    json links = json::array();
    for (const Edge& e : s.links) links.push_back({e.from, e.to, e.capacity});
    net["links"] = links;
    net["proc"] = s.proc_capacity;
    net["storage"] = s.storage_capacity;
    if (s.cloud) net["cloud"] = *s.cloud;
    net["replacement_cap"] = std::isfinite(s.replacement_cap) ? s.replacement_cap : -1.0;
    j["network"] = net;
    json svcs = json::array();
    for (const ServiceSpec& sp : s.services) {
        json fs = json::array();
        for (const FunctionSpec& f : sp.functions)
            fs.push_back({f.scaling, f.workload, f.object, f.merging});
        svcs.push_back({{"id", sp.id}, {"packet_size", sp.packet_size}, {"functions", fs}});
    }
    j["services"] = svcs;
    json cls = json::array();
    for (const Client& c : s.clients)
        cls.push_back({c.id, c.source, c.destination, c.service, c.popularity});
    j["clients"] = cls;
    json arr;
    arr["kind"] = arrival_name(s.arrivals.kind);
    arr["rate"] = s.arrivals.total_rate;
    arr["popularity"] = s.arrivals.popularity;
    arr["zipf_gamma"] = s.arrivals.zipf_gamma;
    arr["initial_order"] = s.arrivals.initial_order;
    arr["swap_prob"] = s.arrivals.swap_prob;
    arr["max_burst_factor"] = s.arrivals.max_burst_factor;
    j["arrivals"] = arr;
    json pl;
    pl["db_sizes"] = s.db_sizes;
    pl["source"] = source_name(s.placement);
    json bits = json::array();
    for (auto [i, k] : s.cached) bits.push_back({i, k});
    pl["cached"] = bits;
    pl["copies"] = s.placement_copies;
    pl["milp_node_budget"] = s.milp.node_budget;
    pl["milp_enumerate_max_bits"] = s.milp.enumerate_max_bits;
    j["placement"] = pl;
    j["policy"] = policy_name(s.policy);
    j["replacement"] = {{"policy", replace_name(s.replacement)}, {"frame", s.frame_length}};
    j["run"] = {{"horizon", s.horizon},
                {"warmup", s.warmup},
                {"sample_interval", s.sample_interval},
                {"seed", s.seed},
                {"monitor", s.monitor},
                {"divergence_backlog",
                 std::isfinite(s.divergence_backlog) ? s.divergence_backlog : -1.0}};
    return j.dump(2);
}

Scenario scenario_from_json(const std::string& text) {
    json j = json::parse(text);
    if (!j.contains("schema") || j.at("schema").get<int>() != kScenarioSchemaVersion)
        throw std::runtime_error("unsupported scenario schema version");
    Scenario s;
    s.name = j.at("name").get<std::string>();
    const json& net = j.at("network");
    s.nodes = net.at("nodes").get<int>();
    for (const json& e : net.at("links"))
        s.links.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
    s.proc_capacity = net.at("proc").get<std::vector<double>>();
    s.storage_capacity = net.at("storage").get<std::vector<double>>();
    if (net.contains("cloud")) s.cloud = net.at("cloud").get<int>();
    double cap = net.value("replacement_cap", -1.0);
    s.replacement_cap = cap < 0 ? kInf : cap;
    for (const json& sv : j.at("services")) {
        ServiceSpec sp;
        sp.id = sv.at("id").get<int>();
        sp.packet_size = sv.at("packet_size").get<double>();
        for (const json& f : sv.at("functions"))
            sp.functions.push_back({f.at(0).get<double>(), f.at(1).get<double>(),
                                    f.at(2).get<int>(), f.at(3).get<double>()});
        s.services.push_back(std::move(sp));
    }
    for (const json& c : j.at("clients"))
        s.clients.push_back({c.at(0).get<int>(), c.at(1).get<int>(), c.at(2).get<int>(),
                             c.at(3).get<int>(), c.at(4).get<double>()});
    const json& arr = j.at("arrivals");
    s.arrivals.kind = arrival_from(arr.at("kind").get<std::string>());
    s.arrivals.total_rate = arr.at("rate").get<double>();
    s.arrivals.popularity = arr.value("popularity", std::vector<double>{});
    s.arrivals.zipf_gamma = arr.value("zipf_gamma", 1.0);
    s.arrivals.initial_order = arr.value("initial_order", std::vector<int>{});
    s.arrivals.swap_prob = arr.value("swap_prob", 1e-6);
    s.arrivals.max_burst_factor = arr.value("max_burst_factor", 10.0);
    const json& pl = j.at("placement");
    s.db_sizes = pl.at("db_sizes").get<std::vector<double>>();
    s.placement = source_from(pl.at("source").get<std::string>());
    for (const json& b : pl.at("cached")) s.cached.emplace_back(b.at(0).get<int>(), b.at(1).get<int>());
    s.placement_copies = pl.value("copies", 1);
    s.milp.node_budget = pl.value("milp_node_budget", s.milp.node_budget);
    s.milp.enumerate_max_bits = pl.value("milp_enumerate_max_bits", s.milp.enumerate_max_bits);
    s.policy = policy_from(j.at("policy").get<std::string>());
    s.replacement = replace_from(j.at("replacement").at("policy").get<std::string>());
    s.frame_length = j.at("replacement").at("frame").get<long>();
    const json& run = j.at("run");
    s.horizon = run.at("horizon").get<long>();
    s.warmup = run.at("warmup").get<long>();
    s.sample_interval = run.at("sample_interval").get<long>();
    s.seed = run.at("seed").get<uint64_t>();
    s.monitor = run.value("monitor", false);
    double div = run.value("divergence_backlog", -1.0);
    s.divergence_backlog = div < 0 ? kInf : div;
    s.validate();
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scenario file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return scenario_from_json(ss.str());
}

uint64_t scenario_hash(const Scenario& s) {
    const std::string text = scenario_to_json(s);
    uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

Scenario edge_grid() {
    // 3x3 grid of edge servers (1 Gbps inter-server links, 4x2.5 GHz each)
    // plus a cloud node reachable over 20 Mbps backhaul links holding every
    // database. Units: 1 data unit = 1 kb packet, 1 slot = 1 ms, compute unit
    // = 1000 cycles, so capacities are 1000 (links), 10000/20000 (compute).
    Scenario s;
    s.name = "edge_grid";
    s.nodes = 10;
    const int cloud = 9;
    s.cloud = cloud;
    auto both = [&](int a, int b, double cap) {
        s.links.push_back({a, b, cap});
        s.links.push_back({b, a, cap});
    };
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            int i = r * 3 + c;
            if (c + 1 < 3) both(i, i + 1, 1000.0);
            if (r + 1 < 3) both(i, i + 3, 1000.0);
        }
    for (int i = 0; i < 9; ++i) both(i, cloud, 20.0);
    s.proc_capacity.assign(9, 10000.0);
    s.proc_capacity.push_back(20000.0);
    s.storage_capacity.assign(9, 1.0);
    s.storage_capacity.push_back(0.0);  // cloud holds everything implicitly

    // Four two-function services; workloads are compute units per live unit.
    auto svc = [](int id, FunctionSpec f1, FunctionSpec f2) {
        ServiceSpec sp;
        sp.id = id;
        sp.functions = {f1, f2};
        return sp;
    };
    s.services = {
        svc(0, {0.83, 7.1, 0, 0.92}, {1.06, 5.8, 1, 1.06}),
        svc(1, {0.94, 10.0, 2, 0.52}, {1.22, 7.7, 3, 0.65}),
        svc(2, {0.75, 8.7, 4, 1.48}, {1.31, 9.2, 5, 1.97}),
        svc(3, {0.60, 8.4, 6, 0.91}, {1.34, 7.4, 7, 1.22}),
    };
    s.clients = {
        {0, 0, 8, 0, 0.25},
        {1, 2, 6, 1, 0.25},
        {2, 6, 2, 2, 0.25},
        {3, 8, 0, 3, 0.25},
    };
    s.arrivals.kind = ArrivalKind::Poisson;
    s.arrivals.total_rate = 500.0;  // aggregate units/slot (1 unit/slot = 1 Mbps)
    s.arrivals.popularity = {0.25, 0.25, 0.25, 0.25};

    s.db_sizes.assign(8, 1.0);
    s.placement = PlacementSource::Fixed;
    // One database per edge server, skipping the center node: databases 0..3
    // at nodes 0..3 and 4..7 at nodes 5..8.
    for (int k = 0; k < 4; ++k) s.cached.emplace_back(k, k);
    for (int k = 4; k < 8; ++k) s.cached.emplace_back(k + 1, k);

    s.horizon = 10000;
    s.warmup = 1000;
    s.sample_interval = 100;
    s.seed = 1;
    s.divergence_backlog = 1e6;  // overload runs abort instead of thrashing
    // Local search on this 72-bit instance converges well under this budget;
    // extra budget only feeds slow branch-and-bound nodes.
    s.milp.node_budget = 200;
    return s;
}

double backlog_slope(const std::vector<SlotSample>& samples, long warmup) {
    std::vector<const SlotSample*> post;
    for (const SlotSample& sm : samples)
        if (sm.slot >= warmup) post.push_back(&sm);
    const size_t n = post.size();
    if (n < 4) return 0.0;
    const size_t begin = n / 2;  // final half only
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(n - begin);
    for (size_t i = begin; i < n; ++i) {
        const double x = static_cast<double>(post[i]->slot);
        const double y = post[i]->backlog_total;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = m * sxx - sx * sx;
    return denom > 0 ? (m * sxy - sx * sy) / denom : 0.0;
}

RunResult run_scenario_with(const Scenario& s, const NetworkGraph& g, const CachingVector& x) {
    s.validate();
    SimConfig cfg;
    cfg.policy = s.policy;
    cfg.monitor_invariants = s.monitor;
    cfg.sample_interval = s.sample_interval;
    Simulator sim(g, s.services, s.clients, x, s.arrivals, s.seed, cfg);
    std::optional<ReplacementManager> mgr;
    if (s.replacement != ReplacePolicy::None) {
        ReplacementConfig rc;
        rc.policy = s.replacement;
        rc.frame_length = s.frame_length;
        rc.milp = s.milp;
        mgr.emplace(rc, sim);
    }
    RunResult r;
    for (long t = 0; t < s.horizon; ++t) {
        sim.step();
        if (mgr) mgr->after_slot(sim);
        if (t % s.sample_interval == 0 && sim.total_actual_backlog() > s.divergence_backlog) {
            r.diverged = true;
            break;
        }
    }
    r.hash = scenario_hash(s);
    r.slots_run = sim.slot();
    r.samples = sim.samples();
    r.delivered = static_cast<long>(sim.delivered_requests());
    r.dropped = sim.dropped_requests();
    r.backlog_slope = backlog_slope(r.samples, s.warmup);
    r.stable = !r.diverged && r.backlog_slope < kStabilitySlopeEps;
    if (mgr) {
        r.bytes_moved = mgr->total_bytes_moved();
        r.frames = mgr->log();
    }
    r.invariants = sim.invariants();
    // Post-warmup mean delay: difference of the cumulative delivery-weighted
    // means between the first post-warmup sample and the end of the run.
    double d0 = 0, n0 = 0;
    for (const SlotSample& sm : r.samples)
        if (sm.slot >= s.warmup) {
            d0 = sm.mean_delay * sm.delivered_requests;
            n0 = sm.delivered_requests;
            break;
        }
    const double n1 = sim.delivered_requests();
    if (n1 > n0) {
        r.mean_delay = (sim.mean_delay() * n1 - d0) / (n1 - n0);
    } else {
        r.mean_delay = kInf;
    }
    return r;
}

RunResult run_scenario(const Scenario& s) {
    NetworkGraph g = s.build_graph();
    return run_scenario_with(s, g, s.build_placement(g));
}

std::string metrics_csv(const Scenario& s, const RunResult& r) {
    std::string out = stamp(s);
    out += "slot,backlog_total,backlog_link,backlog_processing,backlog_waiting,"
           "virtual_backlog,delivered_requests,mean_delay,lambda\n";
    for (const SlotSample& sm : r.samples) {
        out += std::to_string(sm.slot);
        for (double v : {sm.backlog_total, sm.backlog_link, sm.backlog_processing,
                         sm.backlog_waiting, sm.virtual_backlog, sm.delivered_requests,
                         sm.mean_delay, sm.lambda})
            out += "," + fmt(v);
        out += "\n";
    }
    return out;
}

std::string frame_log_csv(const Scenario& s, const RunResult& r) {
    std::string out = stamp(s);
    out += "frame,policy,changed_node,bits_changed,bytes_moved,metric\n";
    for (const FrameLogEntry& e : r.frames) {
        out += std::to_string(e.frame) + "," + e.policy + "," + std::to_string(e.changed_node) +
               "," + std::to_string(e.bits_changed) + "," + fmt(e.bytes_moved) + "," +
               fmt(e.metric) + "\n";
    }
    return out;
}

void check_output_hash(const std::string& csv_text, const Scenario& s) {
    const std::string expected = stamp(s);
    const std::string head = csv_text.substr(0, std::min(csv_text.size(), expected.size()));
    if (head != expected)
        throw std::runtime_error("output file does not match scenario (hash stamp mismatch)");
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

SweepResult stability_sweep(const Scenario& base, const std::vector<double>& lambda_grid) {
    NetworkGraph g = base.build_graph();
    CachingVector x = base.build_placement(g);
    std::vector<double> grid = lambda_grid;
    std::sort(grid.begin(), grid.end());
    SweepResult r;
    for (double lambda : grid) {
        Scenario s = base;
        s.arrivals.total_rate = lambda;
        RunResult run = run_scenario_with(s, g, x);
        SweepPoint p;
        p.lambda = lambda;
        p.stable = run.stable;
        p.slope = run.backlog_slope;
        p.mean_delay = run.mean_delay;
        p.delivered = run.delivered;
        if (p.stable) r.boundary = std::max(r.boundary, lambda);
        r.points.push_back(p);
    }
    return r;
}

double bisect_boundary(const Scenario& base, double lambda_stable, double lambda_unstable,
                       int iterations) {
    NetworkGraph g = base.build_graph();
    CachingVector x = base.build_placement(g);
    for (int it = 0; it < iterations; ++it) {
        const double mid = 0.5 * (lambda_stable + lambda_unstable);
        Scenario s = base;
        s.arrivals.total_rate = mid;
        RunResult run = run_scenario_with(s, g, x);
        (run.stable ? lambda_stable : lambda_unstable) = mid;
    }
    return lambda_stable;
}

std::string sweep_csv(const Scenario& s, const SweepResult& r) {
    std::string out = stamp(s);
    out += "lambda,stable,slope,mean_delay,delivered\n";
    for (const SweepPoint& p : r.points)
        out += fmt(p.lambda) + "," + std::to_string(p.stable ? 1 : 0) + "," + fmt(p.slope) +
               "," + fmt(p.mean_delay) + "," + std::to_string(p.delivered) + "\n";
    out += "# boundary " + fmt(r.boundary) + "\n";
    return out;
}

RegionResult feasible_region(const Scenario& base, const std::vector<double>& alpha_proc_grid,
                             const std::vector<double>& alpha_tx_grid,
                             double delay_requirement) {
    NetworkGraph g = base.build_graph();
    CachingVector x = base.build_placement(g);
    std::vector<double> a1 = alpha_proc_grid, a2 = alpha_tx_grid;
    std::sort(a1.begin(), a1.end());
    std::sort(a2.begin(), a2.end());
    RegionResult r;
    r.delay_requirement = delay_requirement;
    for (double ap : a1)
        for (double at : a2) {
            NetworkGraph scaled = g.scaled(ap, at);
            RunResult run = run_scenario_with(base, scaled, x);
            RegionPoint p;
            p.alpha_proc = ap;
            p.alpha_tx = at;
            p.stable = run.stable;
            p.mean_delay = run.mean_delay;
            p.feasible = run.stable && run.dropped == 0 && run.mean_delay <= delay_requirement;
            r.points.push_back(p);
        }
    return r;
}

std::string region_csv(const Scenario& s, const RegionResult& r) {
    std::string out = stamp(s);
    out += "alpha_proc,alpha_tx,stable,mean_delay,feasible\n";
    for (const RegionPoint& p : r.points)
        out += fmt(p.alpha_proc) + "," + fmt(p.alpha_tx) + "," + std::to_string(p.stable ? 1 : 0) +
               "," + fmt(p.mean_delay) + "," + std::to_string(p.feasible ? 1 : 0) + "\n";
    return out;
}

}  // namespace dicnc
