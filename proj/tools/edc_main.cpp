// SPDX-License-Identifier: Apache-2.0
//
// Command-line experiment runner for energy-detection constellation design.

#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "edc/experiments.hpp"

namespace {

struct CliState {
    edc::ExperimentConfig cfg;
    std::string values_text;
    std::string powers_text;
    std::string format_text;
    std::string config_path;  // applied in a pre-pass; kept for --help only
};

void add_common_options(CLI::App* sub, CliState& state) {
    auto& cfg = state.cfg;
    sub->add_option("--K", cfg.rician_k, "Rician factor K (>= 0; 0 is Rayleigh)");
    sub->add_option("--N", cfg.n_antennas, "receive antenna count")->check(CLI::PositiveNumber);
    sub->add_option("--M", cfg.constellation_size, "constellation size")
        ->check(CLI::Range(2, 1 << 20));
    sub->add_option("--snr-db", cfg.snr_db, "SNR p_bar/sigma_z^2 in dB");
    sub->add_option("--sigma-z2", cfg.noise_var, "per-antenna noise variance")
        ->check(CLI::PositiveNumber);
    sub->add_option("--epsilon", cfg.epsilon, "stopping criterion on ||p - p_prev||^2")
        ->check(CLI::PositiveNumber);
    sub->add_option("--max-iter", cfg.max_iter, "iteration cap for the alternating algorithm")
        ->check(CLI::PositiveNumber);
    sub->add_option("--trials", cfg.trials, "Monte Carlo trials per symbol");
    sub->add_option("--draws", cfg.draws, "sample count for the gaussianity report");
    sub->add_option("--seed", cfg.seed, "master RNG seed");
    sub->add_option("--threads", cfg.threads, "worker threads (0 = hardware)");
    sub->add_option("--grid-step", cfg.grid_step, "brute-force grid pitch as a fraction of p_bar")
        ->check(CLI::PositiveNumber);
    sub->add_option("--pm", cfg.probe_power, "symbol power probed by gaussianity (default p_bar)");
    sub->add_option("--values", state.values_text, "comma-separated sweep values");
    sub->add_option("--powers", state.powers_text, "comma-separated symbol powers");
    sub->add_option("--out", cfg.out_path, "output path (default stdout)");
    sub->add_option("--format", state.format_text, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--config", state.config_path,
                    "flat key=value config file; flags override its values");
}

}  // namespace

int main(int argc, char** argv) {
    CliState state;

    // Config file first so that command-line flags override its values.
    try {
        for (int i = 1; i < argc; ++i) {
            const std::string arg = argv[i];
            if (arg == "--config" && i + 1 < argc)
                edc::apply_config_file(argv[i + 1], state.cfg);
            else if (arg.rfind("--config=", 0) == 0)
                edc::apply_config_file(arg.substr(9), state.cfg);
        }
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }

    CLI::App app{
        "Energy-detection constellation designer for noncoherent massive SIMO:\n"
        "optimal decision thresholds, exact average symbol error probability,\n"
        "power allocation and Monte Carlo validation."};
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, edc::Scenario>> scenarios = {
        {"optimize", edc::Scenario::Optimize},
        {"sep", edc::Scenario::Sep},
        {"simulate", edc::Scenario::Simulate},
        {"brute-force", edc::Scenario::BruteForce},
        {"sweep-n", edc::Scenario::SweepN},
        {"sweep-m", edc::Scenario::SweepM},
        {"sweep-snr", edc::Scenario::SweepSnr},
        {"gaussianity", edc::Scenario::Gaussianity},
        {"convexity", edc::Scenario::Convexity},
        {"validate", edc::Scenario::Validate},
    };
    const std::vector<std::string> descriptions = {
        "power allocation via the alternating algorithm",
        "analytic SEP and thresholds for a constellation",
        "Monte Carlo SER against the analytic SEP",
        "exhaustive grid search over constellations",
        "SEP versus antenna count",
        "SEP versus constellation size",
        "SEP versus SNR",
        "normality report for the averaged energy",
        "convexity probe of SEP over power vectors",
        "bundled cross-checks; exit code reports failures",
    };
    for (size_t i = 0; i < scenarios.size(); ++i)
        add_common_options(app.add_subcommand(scenarios[i].first, descriptions[i]), state);

    CLI11_PARSE(app, argc, argv);

    try {
        if (!state.values_text.empty())
            state.cfg.sweep_values = edc::parse_double_list(state.values_text);
        if (!state.powers_text.empty())
            state.cfg.powers = edc::parse_double_list(state.powers_text);
        if (state.format_text == "json") state.cfg.format = edc::io::Format::Json;
        else if (state.format_text == "csv") state.cfg.format = edc::io::Format::Csv;

        for (const auto& [name, scenario] : scenarios)
            if (app.get_subcommand(name)->parsed())
                return edc::run_scenario(scenario, state.cfg);
        std::cerr << "error: no scenario selected\n";
        return 1;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
}
