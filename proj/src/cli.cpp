#include "hybridnet/cli.hpp"

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hybridnet/sweep.hpp"

namespace hybridnet {

namespace {

std::string sibling_path(const std::string& out, const std::string& tag) {
    const std::size_t dot = out.rfind('.');
    const std::size_t slash = out.find_last_of("/\\");
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return out + "." + tag + ".csv";
    return out.substr(0, dot) + "." + tag + out.substr(dot);
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::ios_base::failure("cannot open output file: " + path);
    body(os);
    os.flush();
    if (!os) throw std::ios_base::failure("failed writing output file: " + path);
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{
        "hybridnet: discrete-time packet traffic on a lattice backbone with mobile users"};
    app.set_config("--config", "", "key = value file with the same keys as the long flags");

    std::string experiment_str;
    std::string strategy_str = "random";
    std::string out_path;
    std::string rho_grid, p_grid, v_grid, n_grid;
    SimConfig base;
    int runs = 50;
    int jobs = 0;
    std::uint64_t seed = 1;
    bool dump_runs = false;
    int probe_runs = 1;
    int probe_warmup = 300;
    int probe_measure = 1200;
    double threshold = 1.0;
    double tol = 0.002;
    double rho_hi = 1.0;
    double max_rho = 8.0;

    app.add_option("--experiment", experiment_str, "experiment to run")
        ->required()
        ->check(CLI::IsMember({"phase", "dbrs_sweep", "degree_load", "speed_sweep", "users_sweep",
                               "routing_compare"}));
    app.add_option("--edge", base.edge_len, "lattice side length (stations per side)")
        ->check(CLI::Range(2, 1 << 14));
    app.add_option("--users", base.users, "number of mobile users")->check(CLI::Range(2, 1 << 26));
    app.add_option("--speed", base.speed, "user speed in lattice units per step")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--capacity", base.capacity, "packets a station handles per step")
        ->check(CLI::PositiveNumber);
    auto* rho_opt = app.add_option("--rho", base.rho, "per-user packet generation rate")
                        ->check(CLI::NonNegativeNumber);
    app.add_option("--p", base.rewire_p, "rewiring probability")->check(CLI::Range(0.0, 1.0));
    app.add_option("--rho-grid", rho_grid, "rho sweep grid, lo:step:hi or comma list");
    app.add_option("--p-grid", p_grid, "P sweep grid");
    app.add_option("--v-grid", v_grid, "speed sweep grid");
    app.add_option("--n-grid", n_grid, "user-count sweep grid");
    app.add_option("--strategy", strategy_str, "next-hop strategy")
        ->check(CLI::IsMember({"random", "min_load", "max_load"}));
    app.add_option("--runs", runs, "simulations (or bisections) per sweep value")
        ->check(CLI::PositiveNumber);
    app.add_option("--jobs", jobs, "worker threads, 0 = hardware concurrency")
        ->check(CLI::Range(0, 4096));
    app.add_option("--seed", seed, "base seed; run r uses seed + r");
    app.add_option("--warmup", base.warmup_steps, "unrecorded steps per run")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--measure", base.measure_steps, "recorded steps per run")
        ->check(CLI::Range(2, 1 << 26));
    app.add_option("--threshold", threshold, "W-slope that counts as congested (bisection)")
        ->check(CLI::PositiveNumber);
    app.add_option("--tol", tol, "bisection bracket tolerance")->check(CLI::PositiveNumber);
    app.add_option("--probe-runs", probe_runs, "seeded runs per congestion probe")
        ->check(CLI::PositiveNumber);
    app.add_option("--probe-warmup", probe_warmup, "warmup steps per congestion probe")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--probe-measure", probe_measure, "measured steps per congestion probe")
        ->check(CLI::Range(2, 1 << 26));
    app.add_option("--rho-hi", rho_hi, "first upper-bracket guess for the bisection")
        ->check(CLI::PositiveNumber);
    app.add_option("--max-rho", max_rho, "bisection search ceiling")->check(CLI::PositiveNumber);
    app.add_option("--out", out_path, "output CSV path")->required();
    app.add_flag("--dump-runs", dump_runs, "also write a per-run CSV next to --out");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        SweepSpec spec;
        spec.experiment = experiment_from_name(experiment_str);
        base.strategy = strategy_from_name(strategy_str);
        spec.runs = runs;
        spec.jobs = jobs;
        spec.seed_base = seed;
        spec.dump_runs = dump_runs;

        // sigma_L curves are meant for the free-flow regime; default the rate
        // down from the phase-experiment default unless the user set one.
        if (spec.experiment == Experiment::degree_load && rho_opt->count() == 0) base.rho = 0.3;

        std::string grid;
        switch (spec.experiment) {
            case Experiment::phase:
                grid = rho_grid.empty() ? "0.02:0.02:0.4" : rho_grid;
                break;
            case Experiment::routing_compare:
                grid = rho_grid.empty() ? "2:0.25:3.5" : rho_grid;
                break;
            case Experiment::dbrs_sweep:
            case Experiment::degree_load:
                grid = p_grid.empty() ? "0:0.05:1" : p_grid;
                break;
            case Experiment::speed_sweep:
                grid = v_grid.empty() ? "0,0.1,0.3,0.7,1.5,3" : v_grid;
                break;
            case Experiment::users_sweep:
                grid = n_grid.empty() ? "50,100,200,400,800" : n_grid;
                break;
        }
        spec.values = parse_grid(grid);

        const bool bisection_experiment = spec.experiment == Experiment::dbrs_sweep ||
                                          spec.experiment == Experiment::speed_sweep ||
                                          spec.experiment == Experiment::users_sweep;
        if (bisection_experiment) {
            base.warmup_steps = probe_warmup;
            base.measure_steps = probe_measure;
            spec.bisect.runs_per_probe = probe_runs;
            spec.bisect.threshold = threshold;
            spec.bisect.tol = tol;
            spec.bisect.initial_hi = rho_hi;
            spec.bisect.max_rho = max_rho;
        }
        spec.base = base;

        const SweepOutput out = run_sweep(spec);
        write_file(out_path, [&](std::ostream& os) { write_summary_csv(spec, out, os); });
        int files = 1;
        if (dump_runs) {
            write_file(sibling_path(out_path, "runs"),
                       [&](std::ostream& os) { write_runs_csv(spec, out, os); });
            ++files;
        }
        if (spec.experiment == Experiment::degree_load) {
            write_file(sibling_path(out_path, "degree"),
                       [&](std::ostream& os) { write_degree_csv(out, os); });
            ++files;
        }
        std::cout << "wrote " << out_path << ": " << spec.values.size() << " values x "
                  << spec.runs << " runs (" << experiment_name(spec.experiment) << ", seed "
                  << seed << ", " << files << " file" << (files > 1 ? "s" : "") << ")\n";
        return 0;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "hybridnet: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "hybridnet: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "hybridnet: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace hybridnet
