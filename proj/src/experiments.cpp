// SPDX-License-Identifier: Apache-2.0

#include "edc/experiments.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <stdexcept>

#include "edc/edc.hpp"

namespace edc {

namespace {

using Params = SystemParams<double>;
using Cell = io::Cell;
const Cell kEmpty{};

Params make_params(const ExperimentConfig& cfg) {
    return Params(cfg.rician_k, cfg.n_antennas, cfg.noise_var, cfg.constellation_size,
                  snr_to_pbar(cfg.snr_db, cfg.noise_var));
}

long long trials_or(const ExperimentConfig& cfg, long long fallback) {
    return cfg.trials >= 0 ? cfg.trials : fallback;
}

struct Design {
    Constellation<double> constellation;
    Boundaries<double> boundaries;
    double sep;
    long long iterations;  // -1 when the constellation was supplied directly
    bool converged;
};

// Explicit --powers win over the optimizer.
Design resolve_design(const ExperimentConfig& cfg, const Params& params) {
    if (!cfg.powers.empty()) {
        VectorX<double> p =
            Eigen::Map<const VectorX<double>>(cfg.powers.data(),
                                              static_cast<Eigen::Index>(cfg.powers.size()));
        Constellation<double> c = validate_constellation<double>(p, params);
        Boundaries<double> b = optimal_boundaries(c, params);
        const double sep = average_sep(c, b, params);
        return {std::move(c), std::move(b), sep, -1, true};
    }
    OptResult<double> r = optimize(params, cfg.epsilon, cfg.max_iter);
    return {std::move(r.constellation), std::move(r.boundaries), r.sep, r.iterations,
            r.converged};
}

io::Table allocation_table(const Design& d, const Params& params) {
    io::Table t;
    t.columns = {"symbol_index", "p_m", "alpha_m", "lambda_m", "p_e", "iterations", "converged"};
    for (int i = 0; i < d.constellation.size(); ++i) {
        Cell lambda = i < d.boundaries.size() ? Cell{d.boundaries.lambdas[i]} : kEmpty;
        t.add_row({static_cast<long long>(i + 1), d.constellation.powers[i],
                   d.constellation.alpha[i], std::move(lambda), d.sep, d.iterations,
                   d.converged});
    }
    (void)params;
    return t;
}

long long checked_integral(double v, const char* what) {
    if (!(std::abs(v - std::llround(v)) < 1e-9))
        throw ValidationError(std::string("sweep value for ") + what + " must be an integer");
    return std::llround(v);
}

}  // namespace

io::Table run_optimize(const ExperimentConfig& cfg) {
    const Params params = make_params(cfg);
    OptResult<double> r = optimize(params, cfg.epsilon, cfg.max_iter);
    return allocation_table({r.constellation, r.boundaries, r.sep, r.iterations, r.converged},
                            params);
}

io::Table run_brute_force(const ExperimentConfig& cfg) {
    const Params params = make_params(cfg);
    OptResult<double> r = brute_force(params, cfg.grid_step);
    return allocation_table({r.constellation, r.boundaries, r.sep, r.iterations, r.converged},
                            params);
}

io::Table run_sep(const ExperimentConfig& cfg) {
    const Params params = make_params(cfg);
    const Design d = resolve_design(cfg, params);
    io::Table t;
    t.columns = {"symbol_index", "p_m", "alpha_m", "lambda_m", "per_symbol_error", "p_e"};
    for (int i = 0; i < d.constellation.size(); ++i) {
        Cell lambda = i < d.boundaries.size() ? Cell{d.boundaries.lambdas[i]} : kEmpty;
        t.add_row({static_cast<long long>(i + 1), d.constellation.powers[i],
                   d.constellation.alpha[i], std::move(lambda),
                   per_symbol_error(i, d.constellation, d.boundaries, params), d.sep});
    }
    return t;
}

io::Table run_simulate(const ExperimentConfig& cfg) {
    const Params params = make_params(cfg);
    const Design d = resolve_design(cfg, params);
    const long long trials = trials_or(cfg, 100000);
    const SimResult<double> sim =
        simulate_ser(d.constellation, d.boundaries, params, trials, cfg.seed, cfg.threads);
    io::Table t;
    t.columns = {"symbol_index", "p_m",       "errors",  "trials_per_symbol",
                 "empirical_ser", "std_error", "analytic_p_e", "seed"};
    for (int i = 0; i < d.constellation.size(); ++i) {
        t.add_row({static_cast<long long>(i + 1), d.constellation.powers[i],
                   sim.errors_per_symbol[static_cast<size_t>(i)], sim.trials_per_symbol,
                   sim.empirical_ser, sim.std_error, d.sep,
                   static_cast<long long>(sim.seed)});
    }
    return t;
}

io::Table run_sweep(Scenario which, const ExperimentConfig& cfg) {
    std::vector<double> values = cfg.sweep_values;
    const char* column = nullptr;
    if (which == Scenario::SweepN) {
        column = "n";
        if (values.empty())
            for (int n = 100; n <= 1000; n += 100) values.push_back(n);
    } else if (which == Scenario::SweepM) {
        column = "m";
        if (values.empty())
            for (int m = 2; m <= 10; ++m) values.push_back(m);
    } else if (which == Scenario::SweepSnr) {
        column = "snr_db";
        if (values.empty())
            for (int s = -6; s <= 6; ++s) values.push_back(s);
    } else {
        throw std::logic_error("run_sweep: not a sweep scenario");
    }
    if (values.empty()) throw ValidationError("sweep: value list must be non-empty");

    const long long trials = trials_or(cfg, 0);
    io::Table t;
    t.columns = {column, "K", "p_e", "empirical_ser", "std_error"};
    for (const double value : values) {
        ExperimentConfig point = cfg;
        Cell value_cell;
        if (which == Scenario::SweepN) {
            point.n_antennas = static_cast<int>(checked_integral(value, "n"));
            value_cell = Cell{static_cast<long long>(point.n_antennas)};
        } else if (which == Scenario::SweepM) {
            point.constellation_size = static_cast<int>(checked_integral(value, "m"));
            value_cell = Cell{static_cast<long long>(point.constellation_size)};
        } else {
            point.snr_db = value;
            value_cell = Cell{value};
        }
        const Params params = make_params(point);
        OptResult<double> r = optimize(params, point.epsilon, point.max_iter);
        Cell emp = kEmpty, se = kEmpty;
        if (trials > 0) {
            const SimResult<double> sim = simulate_ser(r.constellation, r.boundaries, params,
                                                       trials, point.seed, point.threads);
            emp = Cell{sim.empirical_ser};
            se = Cell{sim.std_error};
        }
        t.add_row({std::move(value_cell), cfg.rician_k, r.sep, std::move(emp), std::move(se)});
    }
    return t;
}

io::Table run_gaussianity(const ExperimentConfig& cfg) {
    const Params params = make_params(cfg);
    const double p = cfg.probe_power < 0 ? params.avg_power : cfg.probe_power;
    const GaussianityReport<double> rep =
        gaussianity_report(params, p, cfg.draws, cfg.seed, cfg.threads);
    io::Table t;
    t.columns = {"p_m",           "draws",          "analytic_mean",  "analytic_variance",
                 "empirical_mean", "empirical_variance", "mean_delta_se", "variance_delta_se",
                 "q01_delta_sigma", "q99_delta_sigma", "seed"};
    t.add_row({p, rep.draws, rep.analytic_mean, rep.analytic_variance, rep.empirical_mean,
               rep.empirical_variance, rep.mean_delta_se, rep.variance_delta_se,
               rep.q01_delta_sigma, rep.q99_delta_sigma, static_cast<long long>(rep.seed)});
    return t;
}

io::Table run_convexity(const ExperimentConfig& cfg) {
    const Params params = make_params(cfg);
    const long long trials = trials_or(cfg, 10000);
    const ConvexityReport<double> rep = convexity_probe(params, trials, cfg.seed);
    io::Table t;
    t.columns = {"trials", "violations", "max_excess", "tolerance", "seed"};
    t.add_row({rep.trials, rep.violations, rep.max_excess, rep.tolerance,
               static_cast<long long>(cfg.seed)});
    return t;
}

ValidationOutcome run_validation(const ExperimentConfig& cfg) {
    const Params params = make_params(cfg);
    const Design d = resolve_design(cfg, params);
    const long long trials = trials_or(cfg, 200000);

    ValidationOutcome outcome;
    outcome.all_passed = true;
    outcome.table.columns = {"check", "measured", "tolerance", "pass"};
    auto check = [&](const std::string& name, double measured, double tolerance) {
        const bool pass = measured <= tolerance;
        outcome.table.add_row({name, measured, tolerance, pass});
        if (!pass) {
            outcome.all_passed = false;
            outcome.failures.push_back(name);
        }
    };

    // Monte Carlo agreement with the analytic SEP, tolerance from the
    // binomial standard error at the analytic rate.
    const SimResult<double> sim =
        simulate_ser(d.constellation, d.boundaries, params, trials, cfg.seed, cfg.threads);
    const double total = static_cast<double>(params.constellation_size) *
                         static_cast<double>(trials);
    const double ser_se = std::sqrt(d.sep * (1.0 - d.sep) / total);
    check("sep-monte-carlo", std::abs(sim.empirical_ser - d.sep), 5.0 * ser_se);

    // Exact-moment property of the sampled energies, in standard errors.
    double worst_mean = 0.0, worst_var = 0.0;
    for (int i = 0; i < d.constellation.size(); ++i) {
        const auto stats = energy_stats(params, d.constellation.powers[i]);
        const auto& mom = sim.moments[static_cast<size_t>(i)];
        worst_mean = std::max(worst_mean, std::abs(mom.mean - stats.mean) / mom.mean_se);
        worst_var =
            std::max(worst_var, std::abs(mom.variance - stats.variance) / mom.variance_se);
    }
    check("energy-mean-se", worst_mean, 3.0);
    check("energy-variance-se", worst_var, 3.0);

    // Normality of the averaged energy at the budget power.
    const GaussianityReport<double> rep =
        gaussianity_report(params, params.avg_power, cfg.draws, cfg.seed, cfg.threads);
    check("gaussianity-mean-se", std::abs(rep.mean_delta_se), 3.0);
    check("gaussianity-variance-se", std::abs(rep.variance_delta_se), 3.0);
    check("gaussianity-q01-sigma", std::abs(rep.q01_delta_sigma), 0.15);
    check("gaussianity-q99-sigma", std::abs(rep.q99_delta_sigma), 0.15);

    // Convexity of the objective.
    const ConvexityReport<double> conv = convexity_probe(params, 10000, cfg.seed);
    check("convexity-violations", static_cast<double>(conv.violations), 0.0);

    // Alternating algorithm against the exhaustive grid.
    const OptResult<double> opt = optimize(params, cfg.epsilon, cfg.max_iter);
    const OptResult<double> bf = brute_force(params, cfg.grid_step);
    check("brute-force-sep-gap", opt.sep - bf.sep, 1e-4);
    check("brute-force-alpha-gap",
          (opt.constellation.alpha - bf.constellation.alpha).cwiseAbs().maxCoeff(), 0.05);

    return outcome;
}

int run_scenario(Scenario scenario, const ExperimentConfig& cfg) {
    if (scenario == Scenario::Validate) {
        ValidationOutcome outcome = run_validation(cfg);
        io::write_output(outcome.table, cfg.format, cfg.out_path);
        if (!outcome.all_passed) {
            std::cerr << "validation failed:";
            for (const auto& name : outcome.failures) std::cerr << " " << name;
            std::cerr << "\n";
            return 1;
        }
        return 0;
    }
    io::Table table;
    switch (scenario) {
        case Scenario::Optimize: table = run_optimize(cfg); break;
        case Scenario::Sep: table = run_sep(cfg); break;
        case Scenario::Simulate: table = run_simulate(cfg); break;
        case Scenario::BruteForce: table = run_brute_force(cfg); break;
        case Scenario::SweepN:
        case Scenario::SweepM:
        case Scenario::SweepSnr: table = run_sweep(scenario, cfg); break;
        case Scenario::Gaussianity: table = run_gaussianity(cfg); break;
        case Scenario::Convexity: table = run_convexity(cfg); break;
        case Scenario::Validate: break;  // handled above
    }
    io::write_output(table, cfg.format, cfg.out_path);
    return 0;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> values;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        const std::string item = text.substr(pos, comma - pos);
        if (item.empty()) throw ValidationError("empty entry in numeric list '" + text + "'");
        size_t used = 0;
        double v;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw ValidationError("cannot parse '" + item + "' as a number");
        }
        if (used != item.size())
            throw ValidationError("trailing characters in numeric entry '" + item + "'");
        values.push_back(v);
        pos = comma + 1;
        if (comma == text.size()) break;
    }
    return values;
}

namespace {

void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    auto as_double = [&]() {
        auto list = parse_double_list(value);
        if (list.size() != 1) throw ValidationError("expected one number for key '" + key + "'");
        return list[0];
    };
    auto as_int = [&](long long lo, long long hi) {
        const double v = as_double();
        const long long n = std::llround(v);
        if (std::abs(v - static_cast<double>(n)) > 1e-9 || n < lo || n > hi)
            throw ValidationError("invalid integer for key '" + key + "'");
        return n;
    };
    if (key == "K") cfg.rician_k = as_double();
    else if (key == "N") cfg.n_antennas = static_cast<int>(as_int(1, 1 << 30));
    else if (key == "M") cfg.constellation_size = static_cast<int>(as_int(2, 1 << 20));
    else if (key == "snr-db") cfg.snr_db = as_double();
    else if (key == "sigma-z2") cfg.noise_var = as_double();
    else if (key == "epsilon") cfg.epsilon = as_double();
    else if (key == "max-iter") cfg.max_iter = static_cast<int>(as_int(1, 1 << 30));
    else if (key == "trials") cfg.trials = as_int(0, std::numeric_limits<long long>::max());
    else if (key == "draws") cfg.draws = as_int(1, std::numeric_limits<long long>::max());
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(as_int(0, std::numeric_limits<long long>::max()));
    else if (key == "threads") cfg.threads = static_cast<int>(as_int(0, 4096));
    else if (key == "grid-step") cfg.grid_step = as_double();
    else if (key == "pm") cfg.probe_power = as_double();
    else if (key == "values") cfg.sweep_values = parse_double_list(value);
    else if (key == "powers") cfg.powers = parse_double_list(value);
    else if (key == "out") cfg.out_path = value;
    else if (key == "format") {
        if (value == "csv") cfg.format = io::Format::Csv;
        else if (value == "json") cfg.format = io::Format::Json;
        else throw ValidationError("format must be csv or json, got '" + value + "'");
    } else {
        throw ValidationError("unknown config key '" + key + "'");
    }
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

void apply_config_file(const std::string& path, ExperimentConfig& cfg) {
    std::ifstream file(path);
    if (!file) throw ValidationError("cannot open config file: " + path);
    std::string line;
    int line_no = 0;
    while (std::getline(file, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(line_no) +
                                  " is not key=value: '" + line + "'");
        try {
            apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const ValidationError& err) {
            throw ValidationError("config line " + std::to_string(line_no) + ": " + err.what());
        }
    }
}

}  // namespace edc
