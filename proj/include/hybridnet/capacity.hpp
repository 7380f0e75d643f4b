#pragma once

#include <iosfwd>

#include "hybridnet/backbone.hpp"
#include "hybridnet/traffic.hpp"

namespace hybridnet {

enum class CapacityMethod { analytic, bisection };

struct CapacityResult {
    double rho_c = 0;
    CapacityMethod method = CapacityMethod::bisection;
    int iterations = 0;     ///< probes taken (bisection only)
    double bracket_lo = 0;  ///< final bracket (bisection only)
    double bracket_hi = 0;
    bool saturated = false;  ///< never congested up to max_rho
};

/// Betweenness estimate of the critical per-user generation rate:
/// N(N-1)C / (n * B*) with B* the largest station betweenness. Requires
/// compute_betweenness to have run on b; throws std::runtime_error when the
/// largest betweenness is zero (degenerate topology).
double estimate_rho_c(const Backbone& b, int capacity, int users);

/// Packets inserted per step at the critical point: S_c = n * rho_c.
double critical_packets_per_step(int users, double rho_c);

/// Equivalent per-station generation rate: n * rho_c / N.
double station_generation_rate(int users, int stations, double rho_c);

struct BisectionOptions {
    int runs_per_probe = 10;   ///< seeds averaged per congestion probe
    double threshold = 1.0;    ///< W-slope (packets/step) that counts as congested
    double tol = 0.002;        ///< final bracket width
    double initial_hi = 0.25;  ///< first upper-bracket guess
    double max_rho = 1.0;      ///< search ceiling; saturation flag beyond it
    std::ostream* probe_log = nullptr;  ///< CSV "rho,slope_mean,slope_median,congested"
};

/// Locates the critical rate empirically. congested(rho) holds when the
/// median W-slope over runs_per_probe seeded runs of `base` (with its rho
/// replaced) reaches threshold. The upper bracket doubles from initial_hi
/// until congested, capped at max_rho (never congested there returns max_rho
/// with the saturated flag), then the bracket is bisected down to tol and the
/// midpoint returned. All probe runs share the backbone built from base
/// (edge_len, rewire_p, seed); probe seeds are derived from base.seed.
/// Throws std::runtime_error when congestion persists as rho approaches 0.
CapacityResult find_rho_c(const SimConfig& base, const BisectionOptions& opt = {});

}  // namespace hybridnet
