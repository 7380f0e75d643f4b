#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "hybridnet/capacity.hpp"
#include "hybridnet/traffic.hpp"

namespace hybridnet {

/// The experiment families the CLI exposes:
///   phase           eta(rho) and T(rho) curves
///   dbrs_sweep      rho_c(P) by bisection
///   degree_load     degree histogram and sigma_L(P) at fixed rho
///   speed_sweep     rho_c(v)
///   users_sweep     rho_c(n) and n*rho_c(n)
///   routing_compare eta(rho) for the three next-hop strategies
enum class Experiment { phase, dbrs_sweep, degree_load, speed_sweep, users_sweep, routing_compare };

const char* experiment_name(Experiment e);
Experiment experiment_from_name(const std::string& name);
const char* strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

struct SweepSpec {
    Experiment experiment = Experiment::phase;
    SimConfig base;               ///< template; the swept field is overwritten per value
    std::vector<double> values;   ///< swept parameter values, strictly increasing
    int runs = 50;                ///< simulations (or bisections) per value
    int jobs = 0;                 ///< worker threads; 0 = hardware concurrency
    std::uint64_t seed_base = 1;  ///< run r uses seed seed_base + r
    BisectionOptions bisect;      ///< used by the rho_c experiments
    bool dump_runs = false;
};

struct SweepRecord {
    double param_value = 0;
    std::string metric;  ///< eta, T, rho_c, sigma_L, n_rho_c, eta_<strategy>
    double mean = 0;
    double stderr_val = 0;
    int runs = 0;
};

struct RunDump {
    double param_value = 0;
    std::string label;  ///< strategy name for routing_compare, else empty
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, double>> fields;
};

struct SweepOutput {
    std::vector<SweepRecord> records;
    std::vector<RunDump> run_dumps;  ///< one per run when spec.dump_runs
    /// degree_load only: per swept value, the mean degree histogram.
    std::vector<std::pair<double, std::vector<double>>> degree_hist;
};

/// Runs `spec.runs` seeded simulations (or bisections) per sweep value,
/// in parallel up to spec.jobs workers, and aggregates mean and standard
/// error per metric. Results are identical whether runs execute serially or
/// concurrently.
SweepOutput run_sweep(const SweepSpec& spec);

/// Executes fn(0..tasks-1) on up to `jobs` threads (0 = hardware concurrency).
void parallel_for(int tasks, int jobs, const std::function<void(int)>& fn);

/// Parses "lo:step:hi" (inclusive) or a comma-separated list into a strictly
/// increasing value list. Throws std::invalid_argument on malformed input.
std::vector<double> parse_grid(const std::string& text);

/// Number formatting used in all CSV output ("%.12g", '.' decimal point).
std::string format_double(double v);

/// Aggregated CSV, one row per sweep value; fixed column order per
/// experiment (see the CLI reference in the README).
void write_summary_csv(const SweepSpec& spec, const SweepOutput& out, std::ostream& os);

/// Per-run CSV backing --dump-runs.
void write_runs_csv(const SweepSpec& spec, const SweepOutput& out, std::ostream& os);

/// degree_load companion CSV: "P,k,p_k".
void write_degree_csv(const SweepOutput& out, std::ostream& os);

}  // namespace hybridnet
