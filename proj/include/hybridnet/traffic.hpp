#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "hybridnet/backbone.hpp"
#include "hybridnet/mobility.hpp"
#include "hybridnet/rng.hpp"

namespace hybridnet {

/// Next-hop choice among the shortest-path candidates: uniform, least loaded,
/// or most loaded (the last mostly as a baseline to compare against).
enum class Strategy { random, min_load, max_load };

/// Which queue lengths load-aware routing reads: the live lengths at decision
/// time (default) or a snapshot taken at the start of the step.
enum class LoadSnapshot { instant, step_start };

struct SimConfig {
    int edge_len = 32;
    int users = 1000;     ///< n, number of mobile users
    double speed = 0.3;   ///< v, lattice units per step
    double rho = 0.1;     ///< per-user packet generation rate per step
    int capacity = 10;    ///< C, packets a station handles per step
    double rewire_p = 0.0;  ///< P, rewiring probability
    Strategy strategy = Strategy::random;
    std::uint64_t seed = 1;
    int warmup_steps = 1000;
    int measure_steps = 5000;
    LoadSnapshot load_snapshot = LoadSnapshot::instant;
    bool delivery_consumes_capacity = true;
    BoundaryMode boundary = BoundaryMode::resample;
    bool record_deliveries = false;  ///< keep the per-packet (created, delivered) log
};

/// Throws std::invalid_argument if the configuration is unusable. rho may
/// exceed 1: each user then creates floor(rho) packets plus one more with
/// probability frac(rho), preserving the mean of n*rho insertions per step.
void validate(const SimConfig& cfg);

struct Packet {
    std::int32_t src_user;
    std::int32_t dst_user;
    std::int32_t created_at;
};

/// Per-station FIFO queues plus bookkeeping. in_flight always equals the sum
/// of queue lengths (W in the metrics).
struct TrafficState {
    explicit TrafficState(int stations) : queues(stations) {}

    std::vector<std::deque<Packet>> queues;
    std::int64_t in_flight = 0;
    int t = 0;
    bool recording = false;
    bool keep_delivered_log = false;
    double arrival_delay_sum = 0;
    std::int64_t arrivals_recorded = 0;
    std::vector<std::pair<std::int32_t, std::int32_t>> delivered_log;
};

struct StepStats {
    std::int64_t created = 0;
    std::int64_t delivered = 0;
    std::int64_t forwarded = 0;
    int max_station_processed = 0;  ///< max packets any one station handled
};

/// Called for every forwarded packet: (packet, from, to, routing target).
using HopObserver = std::function<void(const Packet&, int, int, int)>;

/// Each user independently creates packets at rate rho, addressed to a
/// uniformly random other user and appended to the tail of the user's current
/// gateway queue, stamped with st.t. Returns the number created.
std::int64_t generate_packets(TrafficState& st, std::span<const UserState> users, double rho,
                              Rng& rng);

/// Shortest-path next hop from `station` toward `target`: among neighbors q
/// with hops(q, target) + 1 == hops(station, target), picks per strategy,
/// breaking load ties uniformly. load_override, when given, replaces the live
/// queue lengths as the load measure. Requires hops(station, target) >= 1.
int next_hop(int station, int target, Strategy strategy, const Backbone& b,
             const TrafficState& st, Rng& rng,
             const std::vector<std::int64_t>* load_override = nullptr);

/// One delivery pass. Stations are served in id order; each pops packets from
/// its queue head, up to cfg.capacity and only from the eligible prefix
/// (packets forwarded into a queue during this pass wait until the next
/// step). A popped packet whose destination user is gatewayed here is
/// delivered and removed; otherwise it is appended to the next hop's tail.
/// `eligible` gives the per-station eligible counts (queue lengths at step
/// start); when null, the queue lengths at entry are used.
StepStats deliver_step(TrafficState& st, std::span<const UserState> users, const Backbone& b,
                       const SimConfig& cfg, Rng& rng,
                       const std::vector<std::int64_t>* eligible = nullptr,
                       const HopObserver* observer = nullptr);

/// Population standard deviation of per-station mean loads.
double load_variance(std::span<const double> mean_loads);

struct MetricsRecord {
    double eta = 0;            ///< order parameter
    bool eta_defined = true;   ///< false when rho == 0
    double avg_arrival_time = 0;  ///< T, NaN when nothing was delivered
    double sigma_load = 0;     ///< load variance over time-averaged queue lengths
    double w_slope = 0;        ///< least-squares slope of W(t) over the window
    double mean_w = 0;
    std::int64_t delivered_in_window = 0;
    std::int64_t created_in_window = 0;
    std::vector<std::int64_t> w_series;  ///< W at the end of each measured step
    std::vector<std::pair<std::int32_t, std::int32_t>> deliveries;  ///< optional detail
};

/// A full simulation: backbone (lattice + rewiring + distances), users, and
/// the per-step schedule move -> generate -> deliver. Packets created in a
/// step join their gateway queue immediately but first become eligible for
/// delivery in the following step. All randomness flows from one generator
/// seeded with cfg.seed; with the single-argument constructor the draw order
/// is rewiring, user init, then per-step dynamics.
class Simulation {
public:
    explicit Simulation(const SimConfig& cfg);
    Simulation(const SimConfig& cfg, std::shared_ptr<const Backbone> backbone);

    /// Advances one time step and reports what happened.
    StepStats step();

    /// warmup_steps unrecorded steps, then measure_steps recorded ones.
    MetricsRecord run();

    const Backbone& backbone() const { return *backbone_; }
    std::shared_ptr<const Backbone> backbone_ptr() const { return backbone_; }
    const std::vector<UserState>& users() const { return users_; }
    TrafficState& traffic() { return state_; }
    void set_hop_observer(HopObserver obs) { observer_ = std::move(obs); }

private:
    void init_dynamics();

    SimConfig cfg_;
    Rng rng_;
    std::shared_ptr<const Backbone> backbone_;
    std::vector<UserState> users_;
    TrafficState state_{0};
    std::vector<std::int64_t> eligible_;
    HopObserver observer_;
};

/// Builds and runs a simulation.
MetricsRecord run_sim(const SimConfig& cfg);

/// Dump rows "t,W" for the measurement window.
void write_w_series(const MetricsRecord& rec, std::ostream& os);

}  // namespace hybridnet
