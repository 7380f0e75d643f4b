#include "hybridnet/traffic.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "hybridnet/stats.hpp"

namespace hybridnet {

void validate(const SimConfig& cfg) {
    if (cfg.edge_len < 2) throw std::invalid_argument("SimConfig: edge_len must be >= 2");
    if (cfg.users < 2) throw std::invalid_argument("SimConfig: need at least two users");
    if (cfg.speed < 0) throw std::invalid_argument("SimConfig: speed must be >= 0");
    if (cfg.rho < 0) throw std::invalid_argument("SimConfig: rho must be >= 0");
    if (cfg.capacity < 1) throw std::invalid_argument("SimConfig: capacity must be >= 1");
    if (cfg.rewire_p < 0 || cfg.rewire_p > 1)
        throw std::invalid_argument("SimConfig: rewire_p must be in [0, 1]");
    if (cfg.warmup_steps < 0) throw std::invalid_argument("SimConfig: warmup_steps must be >= 0");
    if (cfg.measure_steps < 2)
        throw std::invalid_argument("SimConfig: measure_steps must be >= 2");
}

std::int64_t generate_packets(TrafficState& st, std::span<const UserState> users, double rho,
                              Rng& rng) {
    if (rho < 0) throw std::invalid_argument("generate_packets: rho must be >= 0");
    const int n = static_cast<int>(users.size());
    if (rho > 0 && n < 2)
        throw std::invalid_argument("generate_packets: need at least two users");
    const int whole = static_cast<int>(rho);
    const double frac = rho - whole;
    std::int64_t created = 0;
    for (const UserState& u : users) {
        int count = whole;
        if (frac > 0 && uniform01(rng) < frac) ++count;
        for (int c = 0; c < count; ++c) {
            std::int32_t dst = uniform_below(rng, n - 1);
            if (dst >= u.id) ++dst;
            st.queues[u.gateway].push_back({u.id, dst, st.t});
            ++st.in_flight;
            ++created;
        }
    }
    return created;
}

int next_hop(int station, int target, Strategy strategy, const Backbone& b,
             const TrafficState& st, Rng& rng,
             const std::vector<std::int64_t>* load_override) {
    const std::uint16_t h = b.hops(station, target);
    if (h == 0) throw std::logic_error("next_hop: packet already at its target station");
    const auto load = [&](int q) -> std::int64_t {
        return load_override ? (*load_override)[q]
                             : static_cast<std::int64_t>(st.queues[q].size());
    };
    const auto is_candidate = [&](int q) { return b.hops(q, target) + 1 == h; };
    const std::span<const int> nbrs = b.neighbors(station);

    if (strategy == Strategy::random) {
        int count = 0, only = -1;
        for (int q : nbrs)
            if (is_candidate(q)) {
                ++count;
                only = q;
            }
        if (count == 0) throw std::logic_error("next_hop: no shortest-path candidate");
        if (count == 1) return only;
        int pick = uniform_below(rng, count);
        for (int q : nbrs)
            if (is_candidate(q) && pick-- == 0) return q;
        throw std::logic_error("next_hop: candidate selection failed");
    }

    // min_load / max_load: find the best load, then break ties uniformly.
    const bool want_min = strategy == Strategy::min_load;
    std::int64_t best = 0;
    int ties = 0, first_best = -1;
    for (int q : nbrs) {
        if (!is_candidate(q)) continue;
        const std::int64_t l = load(q);
        if (ties == 0 || (want_min ? l < best : l > best)) {
            best = l;
            ties = 1;
            first_best = q;
        } else if (l == best) {
            ++ties;
        }
    }
    if (ties == 0) throw std::logic_error("next_hop: no shortest-path candidate");
    if (ties == 1) return first_best;
    int pick = uniform_below(rng, ties);
    for (int q : nbrs)
        if (is_candidate(q) && load(q) == best && pick-- == 0) return q;
    throw std::logic_error("next_hop: tie selection failed");
}

StepStats deliver_step(TrafficState& st, std::span<const UserState> users, const Backbone& b,
                       const SimConfig& cfg, Rng& rng,
                       const std::vector<std::int64_t>* eligible, const HopObserver* observer) {
    if (!b.has_distances()) throw std::logic_error("deliver_step: distances not computed");
    const int n_stations = b.station_count();
    std::vector<std::int64_t> entry_sizes;
    if (!eligible) {
        entry_sizes.resize(n_stations);
        for (int s = 0; s < n_stations; ++s)
            entry_sizes[s] = static_cast<std::int64_t>(st.queues[s].size());
        eligible = &entry_sizes;
    }
    const std::vector<std::int64_t>* load_override =
        cfg.load_snapshot == LoadSnapshot::step_start ? eligible : nullptr;

    StepStats out;
    for (int s = 0; s < n_stations; ++s) {
        auto& q = st.queues[s];
        std::int64_t remaining = (*eligible)[s];
        int budget = cfg.capacity;
        int processed = 0;
        while (budget > 0 && remaining > 0 && !q.empty()) {
            const Packet pkt = q.front();
            const int target = users[pkt.dst_user].gateway;
            q.pop_front();
            --remaining;
            ++processed;
            if (s == target) {
                --st.in_flight;
                ++out.delivered;
                if (cfg.delivery_consumes_capacity) --budget;
                if (st.recording) {
                    st.arrival_delay_sum += st.t - pkt.created_at;
                    ++st.arrivals_recorded;
                    if (st.keep_delivered_log)
                        st.delivered_log.emplace_back(pkt.created_at, st.t);
                }
            } else {
                const int nh = next_hop(s, target, cfg.strategy, b, st, rng, load_override);
                if (observer && *observer) (*observer)(pkt, s, nh, target);
                st.queues[nh].push_back(pkt);
                --budget;
                ++out.forwarded;
            }
        }
        out.max_station_processed = std::max(out.max_station_processed, processed);
    }
    return out;
}

double load_variance(std::span<const double> mean_loads) {
    if (mean_loads.empty()) throw std::invalid_argument("load_variance: empty input");
    const double lbar = mean(mean_loads);
    double ss = 0;
    for (double l : mean_loads) ss += (l - lbar) * (l - lbar);
    return std::sqrt(ss / static_cast<double>(mean_loads.size()));
}

Simulation::Simulation(const SimConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
    validate(cfg_);
    Backbone b = build_lattice(cfg_.edge_len);
    b = apply_dbrs(b, cfg_.rewire_p, rng_);
    compute_distances(b);
    backbone_ = std::make_shared<const Backbone>(std::move(b));
    init_dynamics();
}

Simulation::Simulation(const SimConfig& cfg, std::shared_ptr<const Backbone> backbone)
    : cfg_(cfg), rng_(cfg.seed), backbone_(std::move(backbone)) {
    validate(cfg_);
    if (!backbone_ || !backbone_->has_distances())
        throw std::invalid_argument("Simulation: backbone missing or distances not computed");
    init_dynamics();
}

void Simulation::init_dynamics() {
    users_ = init_users(cfg_.users, cfg_.edge_len, cfg_.speed, rng_);
    state_ = TrafficState(backbone_->station_count());
    state_.keep_delivered_log = cfg_.record_deliveries;
    eligible_.assign(backbone_->station_count(), 0);
}

StepStats Simulation::step() {
    for (UserState& u : users_) move_user(u, cfg_.edge_len, rng_, cfg_.boundary);

    // Eligibility snapshot before generation: this step's new packets wait
    // until the next delivery pass.
    const int n_stations = backbone_->station_count();
    for (int s = 0; s < n_stations; ++s)
        eligible_[s] = static_cast<std::int64_t>(state_.queues[s].size());

    const std::int64_t w_before = state_.in_flight;
    StepStats stats;
    stats.created = generate_packets(state_, users_, cfg_.rho, rng_);
    const StepStats dstats = deliver_step(state_, users_, *backbone_, cfg_, rng_, &eligible_,
                                          observer_ ? &observer_ : nullptr);
    stats.delivered = dstats.delivered;
    stats.forwarded = dstats.forwarded;
    stats.max_station_processed = dstats.max_station_processed;

    if (state_.in_flight != w_before + stats.created - stats.delivered)
        throw std::logic_error("Simulation: packet conservation violated");
    std::int64_t queue_sum = 0;
    for (const auto& q : state_.queues) queue_sum += static_cast<std::int64_t>(q.size());
    if (queue_sum != state_.in_flight)
        throw std::logic_error("Simulation: in-flight count out of sync with queues");

    ++state_.t;
    return stats;
}

MetricsRecord Simulation::run() {
    for (int k = 0; k < cfg_.warmup_steps; ++k) step();

    state_.recording = true;
    const int n_stations = backbone_->station_count();
    std::vector<double> load_sums(n_stations, 0.0);
    MetricsRecord rec;
    rec.w_series.reserve(cfg_.measure_steps);
    for (int k = 0; k < cfg_.measure_steps; ++k) {
        const StepStats stats = step();
        rec.created_in_window += stats.created;
        rec.w_series.push_back(state_.in_flight);
        for (int s = 0; s < n_stations; ++s)
            load_sums[s] += static_cast<double>(state_.queues[s].size());
    }
    state_.recording = false;

    rec.delivered_in_window = state_.arrivals_recorded;
    rec.w_slope = lsq_slope(std::span<const std::int64_t>(rec.w_series));
    if (cfg_.rho > 0) {
        rec.eta = cfg_.capacity / (cfg_.users * cfg_.rho) * std::max(0.0, rec.w_slope);
        rec.eta_defined = true;
    } else {
        rec.eta = 0.0;
        rec.eta_defined = false;
    }
    rec.avg_arrival_time = state_.arrivals_recorded > 0
                               ? state_.arrival_delay_sum / state_.arrivals_recorded
                               : std::numeric_limits<double>::quiet_NaN();
    std::vector<double> mean_loads(n_stations);
    for (int s = 0; s < n_stations; ++s) mean_loads[s] = load_sums[s] / cfg_.measure_steps;
    rec.sigma_load = load_variance(mean_loads);
    double wsum = 0;
    for (std::int64_t w : rec.w_series) wsum += static_cast<double>(w);
    rec.mean_w = wsum / static_cast<double>(rec.w_series.size());
    if (cfg_.record_deliveries) rec.deliveries = std::move(state_.delivered_log);
    return rec;
}

MetricsRecord run_sim(const SimConfig& cfg) { return Simulation(cfg).run(); }

void write_w_series(const MetricsRecord& rec, std::ostream& os) {
    os << "t,W\n";
    for (std::size_t i = 0; i < rec.w_series.size(); ++i)
        os << i << ',' << rec.w_series[i] << '\n';
}

}  // namespace hybridnet
