// Command-line front end: run / compare / lockrange / oracle.

#include "tanlock/runner.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

using namespace tanlock;

namespace {

Scenario load_with_overrides(const std::string& path, const std::optional<std::uint64_t>& seed,
                             const std::optional<std::size_t>& samples) {
    Scenario scenario = load_scenario(path);
    if(seed) scenario.stimulus.seed = *seed;
    if(samples) scenario.run_length = *samples;
    scenario.validate();
    return scenario;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tanlock DPLL frequency-synthesizer simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(tool_version));

    std::string scenario_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> samples;

    auto* run = app.add_subcommand("run", "Simulate one scenario; writes trace.csv, phase_plane.csv, report.json");
    run->add_option("scenario", scenario_path, "Scenario file")->required();
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--seed", seed, "Override stimulus.seed");
    run->add_option("--samples", samples, "Override run.samples");

    std::optional<std::size_t> trials;
    std::optional<double> snr_min;
    std::optional<double> snr_max;
    std::optional<double> snr_step;
    auto* compare = app.add_subcommand("compare", "TDTL vs NDTL jitter over an SNR grid");
    compare->add_option("template", scenario_path, "Scenario template (variant is ignored)")->required();
    compare->add_option("--out", out_dir, "Output directory");
    compare->add_option("--seed", seed, "Override stimulus.seed");
    compare->add_option("--samples", samples, "Override run.samples");
    compare->add_option("--trials", trials, "Trials per SNR point");
    compare->add_option("--snr-min", snr_min, "First SNR point, dB");
    compare->add_option("--snr-max", snr_max, "Last SNR point, dB");
    compare->add_option("--snr-step", snr_step, "SNR spacing, dB");

    double w_min = 0.5;
    double w_max = 1.5;
    std::size_t w_steps = 101;
    auto* lockrange = app.add_subcommand("lockrange", "Noise-free lock-range sweep over W for both variants");
    lockrange->add_option("template", scenario_path, "Scenario template (variant is ignored)")->required();
    lockrange->add_option("--w-min", w_min, "Smallest W")->required();
    lockrange->add_option("--w-max", w_max, "Largest W")->required();
    lockrange->add_option("--w-steps", w_steps, "Number of grid points")->required();
    lockrange->add_option("--out", out_dir, "Output directory");
    lockrange->add_option("--samples", samples, "Override run.samples");

    int oracle_n = 1;
    std::string oracle_frac = "0/1";
    std::size_t oracle_count = 10;
    auto* oracle = app.add_subcommand("oracle", "Reference sequences for cross-checking");
    oracle->require_subcommand(1);
    auto* divider = oracle->add_subcommand("divider", "Print the dual-modulus DIV sequence, one per line");
    divider->add_option("--n", oracle_n, "Integer ratio N")->required();
    divider->add_option("--frac", oracle_frac, "Fraction NUM/DEN")->required();
    divider->add_option("--count", oracle_count, "Number of cycles")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if(*run) return run_scenario(load_with_overrides(scenario_path, seed, samples), out_dir, std::cerr);
        if(*compare) {
            Scenario scenario = load_with_overrides(scenario_path, seed, samples);
            if(trials) scenario.sweep.trials = *trials;
            if(snr_min) scenario.sweep.snr_min = *snr_min;
            if(snr_max) scenario.sweep.snr_max = *snr_max;
            if(snr_step) scenario.sweep.snr_step = *snr_step;
            if(snr_min || snr_max || snr_step) scenario.sweep.snr_list.clear();
            return run_compare(scenario, out_dir, std::cerr);
        }
        if(*lockrange) {
            const Scenario scenario = load_with_overrides(scenario_path, std::nullopt, samples);
            return run_lockrange(scenario, linear_grid(w_min, w_max, w_steps), out_dir, std::cerr);
        }
        if(*divider) {
            DividerConfig config;
            config.ratio_int = oracle_n;
            config.ratio_frac = Rational::parse(oracle_frac);
            for(int ratio : divider_sequence(config, oracle_count)) std::cout << ratio << '\n';
            return exit_ok;
        }
    } catch(const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_error;
    }
    return exit_error;
}
