#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "dicnc/controller.hpp"
#include "dicnc/services.hpp"
#include "dicnc/topology.hpp"

namespace dicnc {

struct SimConfig {
    RoutePolicy policy = RoutePolicy::DiDcnc;
    bool monitor_invariants = false;
    long sample_interval = 100;  // slots between metric samples
};

/// One sampled metrics row. Backlogs are data units in the actual network,
/// split by where the data sits: on links, paired and processable at a node,
/// or waiting for its associate.
struct SlotSample {
    long slot = 0;
    double backlog_total = 0;
    double backlog_link = 0;
    double backlog_processing = 0;
    double backlog_waiting = 0;
    double virtual_backlog = 0;
    double delivered_requests = 0;  // cumulative
    double mean_delay = 0;          // slots, delivery-weighted, cumulative
    double lambda = 0;              // configured aggregate rate this slot
};

struct InvariantReport {
    long violations = 0;
    std::string first;  // description of the first violation
};

/// Slotted execution of the joint control loop over the actual network.
/// Per slot: draw arrivals, pick min-ER routes on the pre-update virtual
/// queue snapshot, admit, serve every link and node with nearest-to-origin
/// priority, then apply the virtual queue update. Data moves as fluid chunks
/// batched per (request batch, stage, type); a chunk crosses at most one link
/// per slot and is never processed in the slot it arrived over a link.
class Simulator {
  public:
    Simulator(const NetworkGraph& g, std::vector<ServiceSpec> services,
              std::vector<Client> clients, CachingVector x, ArrivalConfig arrivals,
              uint64_t seed, SimConfig config = {});

    void step();
    void run(long slots);

    /// Swap the caching vector at a frame boundary; in-flight chunks keep the
    /// routes they were admitted with.
    void set_caching(const CachingVector& x);
    const CachingVector& caching() const { return x_; }

    long slot() const { return slot_; }
    const NetworkGraph& graph() const { return g_; }
    const std::vector<Client>& clients() const { return clients_; }
    const std::vector<ServiceSpec>& services() const { return services_; }
    const std::vector<ServiceContext>& contexts() const { return contexts_; }
    const RouteEngine& engine() const { return engine_; }
    const VirtualQueues& queues() const { return queues_; }
    ArrivalModel& arrivals() { return arrivals_; }

    /// Arrival counts drawn in the most recent slot.
    const std::vector<long>& last_arrivals() const { return last_arrivals_; }
    /// Arrival counts per client accumulated since the last reset (frames).
    const std::vector<long>& arrivals_since_mark() const { return frame_arrivals_; }
    void reset_arrival_mark();

    double total_actual_backlog() const { return backlog_total_; }
    double delivered_requests() const { return delivered_requests_; }
    double delivered_requests(int client) const { return delivered_per_client_[client]; }
    double mean_delay() const;
    long dropped_requests() const { return dropped_requests_; }
    double max_weight_identity_error() const { return max_weight_err_; }
    long in_flight_batches() const { return static_cast<long>(batches_.size()); }

    const std::vector<SlotSample>& samples() const { return samples_; }
    const InvariantReport& invariants() const { return invariants_; }

  private:
    struct Chunk {
        int64_t batch = 0;
        double units = 0;
        int hops = 0;      // routing-graph edges crossed (links + functions)
        int stage = 1;
        bool live = true;
        int pos = 0;       // index into the stage path; waiting to leave path[pos]
    };
    struct Batch {
        int client = 0;
        long count = 0;   // requests admitted together
        long birth = 0;
        EfficientRoute route;
        int items = 0;    // chunks + pairing entries referencing this batch
        double delivered = 0;
    };
    struct PairKey {
        int64_t batch;
        int stage;
        bool operator<(const PairKey& o) const {
            return batch != o.batch ? batch < o.batch : stage < o.stage;
        }
    };
    struct PairEntry {
        double live = 0;
        double stat = 0;
        int hops = 0;  // of the live side
    };

    void admit(const std::vector<SelectedRoute>& routes);
    void serve_links();
    void serve_nodes();
    void apply_buffers();
    void chunk_arrived(Chunk c);  // at path end or next queue (buffered)
    void enter_pairing(int node, Chunk&& c);
    void deliver(const Chunk& c);
    void release_if_done(int64_t batch_id);
    const std::vector<int>& path_of(const Batch& b, const Chunk& c) const;
    void sample();
    void violation(const std::string& what);

    NetworkGraph g_;
    std::vector<ServiceSpec> services_;
    std::vector<Client> clients_;
    CachingVector x_;
    std::vector<ServiceContext> contexts_;
    std::vector<std::vector<double>> cumulative_;  // per service
    VirtualQueues queues_;
    RouteEngine engine_;
    ArrivalModel arrivals_;
    SimConfig config_;

    long slot_ = 0;
    int64_t next_batch_ = 0;
    std::unordered_map<int64_t, Batch> batches_;
    std::vector<std::vector<Chunk>> link_q_;            // per edge
    std::vector<std::map<PairKey, PairEntry>> pairing_; // per node
    std::vector<std::pair<int, Chunk>> pending_link_;   // (edge, chunk)
    std::vector<std::pair<int, Chunk>> pending_pair_;   // (node, chunk)

    std::vector<long> last_arrivals_;
    std::vector<long> frame_arrivals_;

    double backlog_total_ = 0;
    double backlog_link_ = 0;
    double delivered_requests_ = 0;
    std::vector<double> delivered_per_client_;
    double delivered_units_ = 0;
    double delay_unit_sum_ = 0;
    long dropped_requests_ = 0;
    long alive_requests_ = 0;
    double max_weight_err_ = 0;
    double m_max_ = 0, z_max_ = 0;  // waiting-bound constants

    std::vector<SlotSample> samples_;
    InvariantReport invariants_;
};

}  // namespace dicnc
