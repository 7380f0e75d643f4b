#include "hybridnet/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "hybridnet/stats.hpp"

namespace hybridnet {

const char* experiment_name(Experiment e) {
    switch (e) {
        case Experiment::phase: return "phase";
        case Experiment::dbrs_sweep: return "dbrs_sweep";
        case Experiment::degree_load: return "degree_load";
        case Experiment::speed_sweep: return "speed_sweep";
        case Experiment::users_sweep: return "users_sweep";
        case Experiment::routing_compare: return "routing_compare";
    }
    throw std::logic_error("experiment_name: bad enum");
}

Experiment experiment_from_name(const std::string& name) {
    for (Experiment e : {Experiment::phase, Experiment::dbrs_sweep, Experiment::degree_load,
                         Experiment::speed_sweep, Experiment::users_sweep,
                         Experiment::routing_compare})
        if (name == experiment_name(e)) return e;
    throw std::invalid_argument("unknown experiment: " + name);
}

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::random: return "random";
        case Strategy::min_load: return "min_load";
        case Strategy::max_load: return "max_load";
    }
    throw std::logic_error("strategy_name: bad enum");
}

Strategy strategy_from_name(const std::string& name) {
    for (Strategy s : {Strategy::random, Strategy::min_load, Strategy::max_load})
        if (name == strategy_name(s)) return s;
    throw std::invalid_argument("unknown strategy: " + name);
}

void parallel_for(int tasks, int jobs, const std::function<void(int)>& fn) {
    if (tasks <= 0) return;
    if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
    jobs = std::max(1, std::min(jobs, tasks));
    if (jobs == 1) {
        for (int i = 0; i < tasks; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    workers.reserve(jobs);
    for (int w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= tasks) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : workers) t.join();
    if (error) std::rethrow_exception(error);
}

std::vector<double> parse_grid(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty grid specification");
    std::vector<double> values;
    const auto parse_num = [](const std::string& s) {
        std::size_t pos = 0;
        double v;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad number in grid: '" + s + "'");
        }
        if (pos != s.size()) throw std::invalid_argument("bad number in grid: '" + s + "'");
        return v;
    };
    const auto split = [](const std::string& s, char sep) {
        std::vector<std::string> parts;
        std::size_t start = 0;
        for (;;) {
            const std::size_t p = s.find(sep, start);
            parts.push_back(s.substr(start, p - start));
            if (p == std::string::npos) break;
            start = p + 1;
        }
        return parts;
    };

    if (text.find(':') != std::string::npos) {
        const auto parts = split(text, ':');
        if (parts.size() != 3)
            throw std::invalid_argument("grid must be lo:step:hi or a comma list: '" + text + "'");
        const double lo = parse_num(parts[0]);
        const double step = parse_num(parts[1]);
        const double hi = parse_num(parts[2]);
        if (step <= 0 || hi < lo) throw std::invalid_argument("bad grid range: '" + text + "'");
        const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
        values.reserve(count);
        for (int k = 0; k < count; ++k) values.push_back(lo + k * step);
    } else {
        for (const std::string& part : split(text, ','))
            values.push_back(parse_num(part));
    }
    if (values.empty()) throw std::invalid_argument("empty grid: '" + text + "'");
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] <= values[i - 1])
            throw std::invalid_argument("grid values must be strictly increasing: '" + text + "'");
    return values;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

namespace {

SweepRecord aggregate(double value, std::string metric, const std::vector<double>& xs) {
    SweepRecord rec;
    rec.param_value = value;
    rec.metric = std::move(metric);
    rec.runs = static_cast<int>(xs.size());
    if (xs.empty()) {
        rec.mean = std::numeric_limits<double>::quiet_NaN();
        rec.stderr_val = std::numeric_limits<double>::quiet_NaN();
    } else {
        rec.mean = mean(xs);
        rec.stderr_val = stderr_of_mean(xs);
    }
    return rec;
}

std::vector<double> finite_only(const std::vector<double>& xs) {
    std::vector<double> out;
    out.reserve(xs.size());
    for (double x : xs)
        if (std::isfinite(x)) out.push_back(x);
    return out;
}

SweepOutput sweep_simulations(const SweepSpec& spec) {
    const int v_count = static_cast<int>(spec.values.size());
    const int runs = spec.runs;
    std::vector<MetricsRecord> results(static_cast<std::size_t>(v_count) * runs);
    parallel_for(v_count * runs, spec.jobs, [&](int k) {
        const int vi = k / runs;
        const int r = k % runs;
        SimConfig cfg = spec.base;
        cfg.rho = spec.values[vi];
        cfg.seed = spec.seed_base + static_cast<std::uint64_t>(r);
        results[k] = run_sim(cfg);
    });

    SweepOutput out;
    for (int vi = 0; vi < v_count; ++vi) {
        std::vector<double> etas, arrivals;
        for (int r = 0; r < runs; ++r) {
            const MetricsRecord& m = results[static_cast<std::size_t>(vi) * runs + r];
            etas.push_back(m.eta);
            arrivals.push_back(m.avg_arrival_time);
        }
        out.records.push_back(aggregate(spec.values[vi], "eta", etas));
        out.records.push_back(aggregate(spec.values[vi], "T", finite_only(arrivals)));
    }
    if (spec.dump_runs) {
        for (int vi = 0; vi < v_count; ++vi)
            for (int r = 0; r < runs; ++r) {
                const MetricsRecord& m = results[static_cast<std::size_t>(vi) * runs + r];
                RunDump d;
                d.param_value = spec.values[vi];
                d.seed = spec.seed_base + static_cast<std::uint64_t>(r);
                d.fields = {{"eta", m.eta},
                            {"T", m.avg_arrival_time},
                            {"sigma_L", m.sigma_load},
                            {"w_slope", m.w_slope},
                            {"delivered", static_cast<double>(m.delivered_in_window)},
                            {"created", static_cast<double>(m.created_in_window)}};
                out.run_dumps.push_back(std::move(d));
            }
    }
    return out;
}

SweepOutput sweep_routing(const SweepSpec& spec) {
    constexpr Strategy kStrategies[] = {Strategy::random, Strategy::min_load, Strategy::max_load};
    const int v_count = static_cast<int>(spec.values.size());
    const int runs = spec.runs;
    const int per_value = 3 * runs;
    std::vector<MetricsRecord> results(static_cast<std::size_t>(v_count) * per_value);
    parallel_for(v_count * per_value, spec.jobs, [&](int k) {
        const int vi = k / per_value;
        const int si = (k % per_value) / runs;
        const int r = k % runs;
        SimConfig cfg = spec.base;
        cfg.rho = spec.values[vi];
        cfg.strategy = kStrategies[si];
        cfg.seed = spec.seed_base + static_cast<std::uint64_t>(r);
        results[k] = run_sim(cfg);
    });

    SweepOutput out;
    for (int vi = 0; vi < v_count; ++vi) {
        for (int si = 0; si < 3; ++si) {
            std::vector<double> etas;
            for (int r = 0; r < runs; ++r)
                etas.push_back(
                    results[static_cast<std::size_t>(vi) * per_value + si * runs + r].eta);
            out.records.push_back(aggregate(
                spec.values[vi], std::string("eta_") + strategy_name(kStrategies[si]), etas));
        }
    }
    if (spec.dump_runs) {
        for (int vi = 0; vi < v_count; ++vi)
            for (int si = 0; si < 3; ++si)
                for (int r = 0; r < runs; ++r) {
                    const MetricsRecord& m =
                        results[static_cast<std::size_t>(vi) * per_value + si * runs + r];
                    RunDump d;
                    d.param_value = spec.values[vi];
                    d.label = strategy_name(kStrategies[si]);
                    d.seed = spec.seed_base + static_cast<std::uint64_t>(r);
                    d.fields = {{"eta", m.eta}, {"T", m.avg_arrival_time}};
                    out.run_dumps.push_back(std::move(d));
                }
    }
    return out;
}

SweepOutput sweep_capacity(const SweepSpec& spec) {
    const int v_count = static_cast<int>(spec.values.size());
    const int runs = spec.runs;
    std::vector<CapacityResult> results(static_cast<std::size_t>(v_count) * runs);
    parallel_for(v_count * runs, spec.jobs, [&](int k) {
        const int vi = k / runs;
        const int r = k % runs;
        SimConfig cfg = spec.base;
        switch (spec.experiment) {
            case Experiment::dbrs_sweep: cfg.rewire_p = spec.values[vi]; break;
            case Experiment::speed_sweep: cfg.speed = spec.values[vi]; break;
            case Experiment::users_sweep: cfg.users = static_cast<int>(spec.values[vi]); break;
            default: throw std::logic_error("sweep_capacity: bad experiment");
        }
        cfg.seed = spec.seed_base + static_cast<std::uint64_t>(r);
        results[k] = find_rho_c(cfg, spec.bisect);
    });

    SweepOutput out;
    for (int vi = 0; vi < v_count; ++vi) {
        std::vector<double> rho_cs;
        for (int r = 0; r < runs; ++r)
            rho_cs.push_back(results[static_cast<std::size_t>(vi) * runs + r].rho_c);
        out.records.push_back(aggregate(spec.values[vi], "rho_c", rho_cs));
        if (spec.experiment == Experiment::users_sweep) {
            std::vector<double> totals(rho_cs);
            for (double& x : totals) x *= spec.values[vi];
            out.records.push_back(aggregate(spec.values[vi], "n_rho_c", totals));
        }
    }
    if (spec.dump_runs) {
        for (int vi = 0; vi < v_count; ++vi)
            for (int r = 0; r < runs; ++r) {
                const CapacityResult& c = results[static_cast<std::size_t>(vi) * runs + r];
                RunDump d;
                d.param_value = spec.values[vi];
                d.seed = spec.seed_base + static_cast<std::uint64_t>(r);
                d.fields = {{"rho_c", c.rho_c},
                            {"iterations", static_cast<double>(c.iterations)},
                            {"bracket_lo", c.bracket_lo},
                            {"bracket_hi", c.bracket_hi},
                            {"saturated", c.saturated ? 1.0 : 0.0}};
                out.run_dumps.push_back(std::move(d));
            }
    }
    return out;
}

SweepOutput sweep_degree_load(const SweepSpec& spec) {
    const int v_count = static_cast<int>(spec.values.size());
    const int runs = spec.runs;
    std::vector<MetricsRecord> results(static_cast<std::size_t>(v_count) * runs);
    std::vector<std::vector<double>> hists(static_cast<std::size_t>(v_count) * runs);
    parallel_for(v_count * runs, spec.jobs, [&](int k) {
        const int vi = k / runs;
        const int r = k % runs;
        SimConfig cfg = spec.base;
        cfg.rewire_p = spec.values[vi];
        cfg.seed = spec.seed_base + static_cast<std::uint64_t>(r);
        Simulation sim(cfg);
        hists[k] = degree_distribution(sim.backbone());
        results[k] = sim.run();
    });

    SweepOutput out;
    for (int vi = 0; vi < v_count; ++vi) {
        std::vector<double> sigmas;
        std::size_t max_k = 0;
        for (int r = 0; r < runs; ++r) {
            const std::size_t k = static_cast<std::size_t>(vi) * runs + r;
            sigmas.push_back(results[k].sigma_load);
            max_k = std::max(max_k, hists[k].size());
        }
        out.records.push_back(aggregate(spec.values[vi], "sigma_L", sigmas));
        std::vector<double> mean_hist(max_k, 0.0);
        for (int r = 0; r < runs; ++r) {
            const std::vector<double>& h = hists[static_cast<std::size_t>(vi) * runs + r];
            for (std::size_t d = 0; d < h.size(); ++d) mean_hist[d] += h[d] / runs;
        }
        out.degree_hist.emplace_back(spec.values[vi], std::move(mean_hist));
    }
    if (spec.dump_runs) {
        for (int vi = 0; vi < v_count; ++vi)
            for (int r = 0; r < runs; ++r) {
                const MetricsRecord& m = results[static_cast<std::size_t>(vi) * runs + r];
                RunDump d;
                d.param_value = spec.values[vi];
                d.seed = spec.seed_base + static_cast<std::uint64_t>(r);
                d.fields = {{"sigma_L", m.sigma_load}};
                out.run_dumps.push_back(std::move(d));
            }
    }
    return out;
}

void validate(const SweepSpec& spec) {
    if (spec.values.empty()) throw std::invalid_argument("sweep: no values to sweep");
    for (std::size_t i = 1; i < spec.values.size(); ++i)
        if (spec.values[i] <= spec.values[i - 1])
            throw std::invalid_argument("sweep: values must be strictly increasing");
    if (spec.runs < 1) throw std::invalid_argument("sweep: runs must be >= 1");
    if (spec.experiment == Experiment::users_sweep) {
        for (double v : spec.values)
            if (v < 2 || v != std::floor(v))
                throw std::invalid_argument("users_sweep: values must be integers >= 2");
    }
    if (spec.experiment == Experiment::dbrs_sweep ||
        spec.experiment == Experiment::degree_load) {
        if (spec.values.front() < 0 || spec.values.back() > 1)
            throw std::invalid_argument("P grid values must lie in [0, 1]");
    }
    if (spec.experiment == Experiment::speed_sweep && spec.values.front() < 0)
        throw std::invalid_argument("speed grid values must be >= 0");
}

const char* param_column(Experiment e) {
    switch (e) {
        case Experiment::phase:
        case Experiment::routing_compare: return "rho";
        case Experiment::dbrs_sweep:
        case Experiment::degree_load: return "P";
        case Experiment::speed_sweep: return "v";
        case Experiment::users_sweep: return "n";
    }
    throw std::logic_error("param_column: bad enum");
}

const SweepRecord& find_record(const SweepOutput& out, double value, const std::string& metric) {
    for (const SweepRecord& r : out.records)
        if (r.param_value == value && r.metric == metric) return r;
    throw std::logic_error("missing sweep record for metric " + metric);
}

}  // namespace

SweepOutput run_sweep(const SweepSpec& spec) {
    validate(spec);
    switch (spec.experiment) {
        case Experiment::phase: return sweep_simulations(spec);
        case Experiment::routing_compare: return sweep_routing(spec);
        case Experiment::dbrs_sweep:
        case Experiment::speed_sweep:
        case Experiment::users_sweep: return sweep_capacity(spec);
        case Experiment::degree_load: return sweep_degree_load(spec);
    }
    throw std::logic_error("run_sweep: bad experiment enum");
}

void write_summary_csv(const SweepSpec& spec, const SweepOutput& out, std::ostream& os) {
    std::vector<std::string> metrics;
    switch (spec.experiment) {
        case Experiment::phase: metrics = {"eta", "T"}; break;
        case Experiment::dbrs_sweep:
        case Experiment::speed_sweep: metrics = {"rho_c"}; break;
        case Experiment::users_sweep: metrics = {"rho_c", "n_rho_c"}; break;
        case Experiment::degree_load: metrics = {"sigma_L"}; break;
        case Experiment::routing_compare:
            metrics = {"eta_random", "eta_min_load", "eta_max_load"};
            break;
    }
    os << param_column(spec.experiment);
    for (const std::string& m : metrics) os << ',' << m << "_mean," << m << "_stderr";
    os << '\n';
    for (double v : spec.values) {
        os << format_double(v);
        for (const std::string& m : metrics) {
            const SweepRecord& r = find_record(out, v, m);
            os << ',' << format_double(r.mean) << ',' << format_double(r.stderr_val);
        }
        os << '\n';
    }
}

void write_runs_csv(const SweepSpec& spec, const SweepOutput& out, std::ostream& os) {
    if (out.run_dumps.empty()) {
        os << param_column(spec.experiment) << ",seed\n";
        return;
    }
    os << param_column(spec.experiment);
    if (spec.experiment == Experiment::routing_compare) os << ",strategy";
    os << ",seed";
    for (const auto& [name, value] : out.run_dumps.front().fields) os << ',' << name;
    os << '\n';
    for (const RunDump& d : out.run_dumps) {
        os << format_double(d.param_value);
        if (spec.experiment == Experiment::routing_compare) os << ',' << d.label;
        os << ',' << d.seed;
        for (const auto& [name, value] : d.fields) os << ',' << format_double(value);
        os << '\n';
    }
}

void write_degree_csv(const SweepOutput& out, std::ostream& os) {
    os << "P,k,p_k\n";
    for (const auto& [p, hist] : out.degree_hist)
        for (std::size_t k = 0; k < hist.size(); ++k)
            os << format_double(p) << ',' << k << ',' << format_double(hist[k]) << '\n';
}

}  // namespace hybridnet
