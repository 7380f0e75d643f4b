#include "hybridnet/capacity.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include "hybridnet/stats.hpp"

namespace hybridnet {

double estimate_rho_c(const Backbone& b, int capacity, int users) {
    if (b.betweenness.empty())
        throw std::logic_error("estimate_rho_c: betweenness not computed");
    if (capacity < 1) throw std::invalid_argument("estimate_rho_c: capacity must be >= 1");
    if (users < 1) throw std::invalid_argument("estimate_rho_c: users must be >= 1");
    const double b_star = *std::max_element(b.betweenness.begin(), b.betweenness.end());
    if (b_star <= 0)
        throw std::runtime_error("estimate_rho_c: degenerate topology, max betweenness is zero");
    const double n_stations = b.station_count();
    return n_stations * (n_stations - 1) * capacity / (users * b_star);
}

double critical_packets_per_step(int users, double rho_c) { return users * rho_c; }

double station_generation_rate(int users, int stations, double rho_c) {
    return users * rho_c / stations;
}

namespace {

class CongestionProbe {
public:
    CongestionProbe(const SimConfig& base, const BisectionOptions& opt)
        : base_(base), opt_(opt) {
        Rng rng(base.seed);
        Backbone b = build_lattice(base.edge_len);
        b = apply_dbrs(b, base.rewire_p, rng);
        compute_distances(b);
        backbone_ = std::make_shared<const Backbone>(std::move(b));
    }

    bool congested(double rho) {
        std::vector<double> slopes(opt_.runs_per_probe);
        for (int k = 0; k < opt_.runs_per_probe; ++k) {
            SimConfig cfg = base_;
            cfg.rho = rho;
            cfg.seed = derive_seed(base_.seed, static_cast<std::uint64_t>(probes_),
                                   static_cast<std::uint64_t>(k));
            slopes[k] = Simulation(cfg, backbone_).run().w_slope;
        }
        const double med = median(slopes);
        const bool result = med >= opt_.threshold;
        if (opt_.probe_log)
            (*opt_.probe_log) << rho << ',' << mean(slopes) << ',' << med << ','
                              << (result ? 1 : 0) << '\n';
        ++probes_;
        return result;
    }

    int probes() const { return probes_; }

private:
    SimConfig base_;
    BisectionOptions opt_;
    std::shared_ptr<const Backbone> backbone_;
    int probes_ = 0;
};

}  // namespace

CapacityResult find_rho_c(const SimConfig& base, const BisectionOptions& opt) {
    validate(base);
    if (opt.threshold <= 0) throw std::invalid_argument("find_rho_c: threshold must be > 0");
    if (opt.tol <= 0) throw std::invalid_argument("find_rho_c: tol must be > 0");
    if (opt.initial_hi <= 0 || opt.max_rho <= 0)
        throw std::invalid_argument("find_rho_c: initial_hi and max_rho must be > 0");
    if (opt.runs_per_probe < 1)
        throw std::invalid_argument("find_rho_c: runs_per_probe must be >= 1");
    if (opt.probe_log) (*opt.probe_log) << "rho,slope_mean,slope_median,congested\n";

    CongestionProbe probe(base, opt);
    CapacityResult res;
    res.method = CapacityMethod::bisection;

    // Grow the upper bracket until congested; rho = 0 inserts nothing, so the
    // lower bracket starts free-flowing by definition.
    double lo = 0.0;
    double hi = std::min(opt.initial_hi, opt.max_rho);
    while (!probe.congested(hi)) {
        lo = hi;
        if (hi >= opt.max_rho) {
            res.rho_c = opt.max_rho;
            res.saturated = true;
            res.bracket_lo = lo;
            res.bracket_hi = opt.max_rho;
            res.iterations = probe.probes();
            return res;
        }
        hi = std::min(2.0 * hi, opt.max_rho);
    }

    while (hi - lo > opt.tol) {
        const double mid = 0.5 * (lo + hi);
        if (probe.congested(mid))
            hi = mid;
        else
            lo = mid;
    }

    res.rho_c = 0.5 * (lo + hi);
    res.bracket_lo = lo;
    res.bracket_hi = hi;
    res.iterations = probe.probes();
    if (res.rho_c <= opt.tol)
        throw std::runtime_error(
            "find_rho_c: no free-flow regime, congestion persists as rho approaches 0");
    return res;
}

}  // namespace hybridnet
