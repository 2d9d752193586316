// SPDX-License-Identifier: Apache-2.0
//
// Experiment runner behind the CLI: builds system parameters from a config,
// drives the engine and renders result tables.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edc/io.hpp"

namespace edc {

enum class Scenario {
    Optimize,
    Sep,
    Simulate,
    BruteForce,
    SweepN,
    SweepM,
    SweepSnr,
    Gaussianity,
    Convexity,
    Validate,
};

struct ExperimentConfig {
    double rician_k = 50.0;
    int n_antennas = 500;
    int constellation_size = 4;
    double snr_db = 0.0;
    double noise_var = 1.0;
    double epsilon = 1e-6;
    int max_iter = 1000;
    long long trials = -1;  // -1: per-scenario default
    long long draws = 100000;
    std::uint64_t seed = 42;
    int threads = 0;  // 0: hardware count
    double grid_step = 0.01;
    double probe_power = -1.0;          // gaussianity symbol power; <0 means p_bar
    std::vector<double> sweep_values;   // empty: per-scenario default
    std::vector<double> powers;         // explicit constellation, optional
    std::string out_path;               // empty: stdout
    io::Format format = io::Format::Csv;
};

/// Flat key=value files; '#' starts a comment. Keys use the long option
/// names (e.g. "snr-db=3"). Unknown keys are an error.
void apply_config_file(const std::string& path, ExperimentConfig& config);

io::Table run_optimize(const ExperimentConfig& config);
io::Table run_sep(const ExperimentConfig& config);
io::Table run_simulate(const ExperimentConfig& config);
io::Table run_brute_force(const ExperimentConfig& config);
io::Table run_sweep(Scenario which, const ExperimentConfig& config);
io::Table run_gaussianity(const ExperimentConfig& config);
io::Table run_convexity(const ExperimentConfig& config);

struct ValidationOutcome {
    io::Table table;
    bool all_passed;
    std::vector<std::string> failures;
};

/// Bundled cross-checks (Monte Carlo agreement, energy normality, convexity,
/// brute-force gap) at the configured operating point.
ValidationOutcome run_validation(const ExperimentConfig& config);

/// Runs one scenario end to end, writing the table to the configured output.
/// Returns the process exit code (nonzero when a validation check fails).
int run_scenario(Scenario scenario, const ExperimentConfig& config);

std::vector<double> parse_double_list(const std::string& text);

}  // namespace edc
