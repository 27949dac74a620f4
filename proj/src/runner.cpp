#include "tanlock/runner.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace tanlock {

namespace {

using json = nlohmann::ordered_json;

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if(!out) throw IoError("cannot write '" + path.string() + "'");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if(!out) throw IoError("write failed for '" + path.string() + "'");
}

void prepare_dir(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if(ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

void write_json(const std::filesystem::path& path, const json& value) {
    auto out = open_output(path);
    out << value.dump(2) << '\n';
    finish(out, path);
}

json optional_json(const std::optional<double>& value) { return value ? json(*value) : json(nullptr); }

json lock_json(const LockReport& lock) {
    json j;
    j["locked"] = lock.locked;
    j["lock_index"] = lock.lock_index ? json(*lock.lock_index) : json(nullptr);
    j["lock_time"] = optional_json(lock.lock_time);
    j["reference_phi"] = lock.reference_phi;
    j["steady_phi_mean"] = lock.steady_phi_mean;
    j["steady_phi_std"] = lock.steady_phi_std;
    j["mean_sample_freq"] = lock.mean_sample_freq;
    j["mean_dco_freq"] = lock.mean_dco_freq;
    j["dco_to_sample_ratio"] = lock.mean_sample_freq > 0.0 ? json(lock.mean_dco_freq / lock.mean_sample_freq) : json(nullptr);
    j["steady_window"] = {lock.steady_begin, lock.steady_end};
    return j;
}

json jitter_json(const JitterReport& jitter) {
    return {{"rms_jitter", jitter.rms_jitter},
            {"peak_to_peak_jitter", jitter.peak_to_peak_jitter},
            {"rms_carry_removed", jitter.rms_carry_removed},
            {"mean_interval", jitter.mean_interval},
            {"window", {jitter.window.begin, jitter.window.end}},
            {"carry_period", jitter.carry_period}};
}

template <typename Body>
int guarded(std::ostream& log, Body&& body) {
    try {
        return body();
    } catch(const IoError& e) {
        log << "error: " << e.what() << '\n';
    } catch(const ConfigError& e) {
        log << "error: " << e.what() << '\n';
    } catch(const std::invalid_argument& e) {
        log << "error: " << e.what() << '\n';
    } catch(const std::domain_error& e) {
        log << "error: " << e.what() << '\n';
    }
    return exit_error;
}

} // namespace

void write_trace_csv(std::ostream& out, const Trace& trace) {
    out << trace_csv_header << '\n';
    for(const auto& r : trace) {
        out << r.k << ',' << format_double(r.t) << ',' << r.ratio << ',' << to_string(r.edge) << ','
            << format_double(r.f_dco) << ',' << format_double(r.s_sin) << ',' << format_double(r.s_cos) << ','
            << format_double(r.phi) << ',' << format_double(r.v_filter) << ',' << (r.saturated ? 1 : 0) << ','
            << (r.degenerate ? 1 : 0) << '\n';
    }
}

void write_phase_plane_csv(std::ostream& out, const Trace& trace) {
    out << phase_plane_csv_header << '\n';
    for(const auto& [a, b] : phase_plane(trace)) out << format_double(a) << ',' << format_double(b) << '\n';
}

int run_scenario(const Scenario& scenario, const std::filesystem::path& out_dir, std::ostream& log) {
    return guarded(log, [&] {
        scenario.validate();
        prepare_dir(out_dir);

        const Trace trace = simulate(scenario.synth, scenario.stimulus, scenario.run_length);
        const auto lock = detect_lock(trace, scenario.lock_criteria());
        const auto carry_period = static_cast<std::size_t>(scenario.synth.divider.ratio_frac.den());

        json jitter = nullptr;
        json jitter_error = nullptr;
        try {
            if(scenario.analysis.jitter_window == JitterWindowPolicy::tail_half)
                jitter = jitter_json(interval_jitter(trace, tail_window(trace), carry_period));
            else
                jitter = jitter_json(jitter_rms(trace, lock, post_lock_window(trace, lock), carry_period));
        } catch(const NotLockedError& e) {
            jitter_error = e.what();
        } catch(const std::invalid_argument& e) {
            jitter_error = e.what();
        }

        const auto point = restored_operating_point(scenario.synth.divider.beta_avg(), scenario.synth.loop,
                                                    scenario.stimulus, scenario.synth.adaptation);

        {
            const auto path = out_dir / "trace.csv";
            auto out = open_output(path);
            write_trace_csv(out, trace);
            finish(out, path);
        }
        {
            const auto path = out_dir / "phase_plane.csv";
            auto out = open_output(path);
            write_phase_plane_csv(out, trace);
            finish(out, path);
        }

        json report;
        report["tool"] = tool_version;
        report["seed"] = scenario.stimulus.seed;
        report["scenario"] = to_json(scenario);
        report["scenario_text"] = to_scenario_text(scenario);
        report["input_frequency"] = scenario.stimulus.stepped_frequency();
        report["beta_avg"] = scenario.synth.divider.beta_avg();
        report["operating_point"] = {{"pre", {{"W", point.pre.W}, {"K1", point.pre.K1}}},
                                     {"post", {{"W", point.post.W}, {"K1", point.post.K1}}},
                                     {"divided_center_pre", point.divided_center_pre},
                                     {"divided_center_post", point.divided_center_post}};
        report["lock"] = lock_json(lock);
        report["jitter"] = jitter;
        report["jitter_error"] = jitter_error;
        std::size_t saturated = 0;
        std::size_t degenerate = 0;
        for(const auto& r : trace) {
            saturated += r.saturated ? 1 : 0;
            degenerate += r.degenerate ? 1 : 0;
        }
        report["saturated_samples"] = saturated;
        report["degenerate_samples"] = degenerate;
        write_json(out_dir / "report.json", report);

        log << scenario.name << ": " << (lock.locked ? "locked" : "NOT locked");
        if(lock.locked) log << " at sample " << *lock.lock_index;
        log << ", mean DCO/sample ratio "
            << (lock.mean_sample_freq > 0 ? format_double(lock.mean_dco_freq / lock.mean_sample_freq) : "n/a") << '\n';
        return lock.locked ? exit_ok : exit_unlocked;
    });
}

int run_compare(const Scenario& scenario, const std::filesystem::path& out_dir, std::ostream& log) {
    return guarded(log, [&] {
        scenario.validate();
        prepare_dir(out_dir);
        const auto grid = scenario.sweep.grid();
        const auto [tdtl, ndtl] =
            snr_jitter_sweep(scenario.synth, scenario.stimulus, grid, scenario.sweep.trials, scenario.run_length);

        const auto csv_path = out_dir / "jitter_sweep.csv";
        auto csv = open_output(csv_path);
        csv << jitter_sweep_csv_header << '\n';
        json rows = json::array();
        std::size_t below = 0;
        std::size_t tenfold = 0;
        std::size_t in_band = 0;
        bool all_locked = true;
        for(std::size_t i = 0; i < grid.size(); ++i) {
            const auto& t = tdtl.points[i];
            const auto& n = ndtl.points[i];
            const double ratio = t.rms_jitter > 0.0 ? n.rms_jitter / t.rms_jitter : std::nan("");
            csv << format_double(grid[i]) << ',' << format_double(t.rms_jitter) << ',' << format_double(n.rms_jitter)
                << ',' << format_double(ratio) << '\n';
            below += n.rms_jitter < t.rms_jitter ? 1 : 0;
            tenfold += ratio <= 0.1 ? 1 : 0;
            in_band += (n.rms_jitter >= 1e-5 && n.rms_jitter <= 1e-2) ? 1 : 0;
            all_locked = all_locked && t.locked_trials == t.trials && n.locked_trials == n.trials;
            rows.push_back({{"snr_db", std::isinf(grid[i]) ? json("inf") : json(grid[i])},
                            {"tdtl", {{"rms_jitter", t.rms_jitter},
                                      {"rms_carry_removed", t.rms_carry_removed},
                                      {"peak_to_peak_jitter", t.peak_to_peak_jitter},
                                      {"locked_trials", t.locked_trials},
                                      {"trials", t.trials}}},
                            {"ndtl", {{"rms_jitter", n.rms_jitter},
                                      {"rms_carry_removed", n.rms_carry_removed},
                                      {"peak_to_peak_jitter", n.peak_to_peak_jitter},
                                      {"locked_trials", n.locked_trials},
                                      {"trials", n.trials}}},
                            {"ratio", ratio}});
        }
        finish(csv, csv_path);

        json summary;
        summary["tool"] = tool_version;
        summary["seed"] = scenario.stimulus.seed;
        summary["scenario"] = to_json(scenario);
        summary["scenario_text"] = to_scenario_text(scenario);
        summary["points"] = rows;
        summary["ndtl_below_tdtl_points"] = below;
        summary["ratio_le_0_1_points"] = tenfold;
        summary["ndtl_in_decade_band_points"] = in_band;
        summary["grid_points"] = grid.size();
        summary["ndtl_below_tdtl_everywhere"] = below == grid.size();
        summary["majority_ratio_le_0_1"] = 2 * tenfold > grid.size();
        summary["all_trials_locked"] = all_locked;
        write_json(out_dir / "compare.json", summary);

        log << "compare: NDTL below TDTL at " << below << "/" << grid.size() << " points, ratio <= 0.1 at "
            << tenfold << "/" << grid.size() << '\n';
        return all_locked ? exit_ok : exit_unlocked;
    });
}

std::vector<double> linear_grid(double w_min, double w_max, std::size_t steps) {
    if(steps == 0) throw std::invalid_argument("grid needs at least one step");
    if(steps == 1) return {w_min};
    if(!(w_max > w_min)) throw std::invalid_argument("grid needs w_max > w_min");
    std::vector<double> grid;
    for(std::size_t i = 0; i < steps; ++i)
        grid.push_back(w_min + (w_max - w_min) * static_cast<double>(i) / static_cast<double>(steps - 1));
    return grid;
}

int run_lockrange(const Scenario& scenario, const std::vector<double>& w_grid, const std::filesystem::path& out_dir,
                  std::ostream& log) {
    return guarded(log, [&] {
        scenario.validate();
        prepare_dir(out_dir);

        const auto csv_path = out_dir / "lockrange.csv";
        auto csv = open_output(csv_path);
        csv << lockrange_csv_header << '\n';

        json summary;
        summary["tool"] = tool_version;
        summary["scenario"] = to_json(scenario);
        summary["scenario_text"] = to_scenario_text(scenario);
        std::optional<double> asym[2];
        bool any_locked = false;
        for(const Variant variant : {Variant::tdtl, Variant::ndtl}) {
            SynthesizerConfig cfg = scenario.synth;
            cfg.loop.variant = variant;
            const auto sweep = lock_range_sweep(cfg, scenario.stimulus, w_grid, scenario.run_length,
                                                scenario.lock_criteria());
            for(const auto& p : sweep.points) {
                any_locked = any_locked || p.locked;
                csv << to_string(variant) << ',' << format_double(p.W) << ',' << (p.locked ? 1 : 0) << ','
                    << (p.locked ? std::to_string(*p.report.lock_index) : std::string()) << '\n';
            }
            json entry = nullptr;
            if(sweep.summary) {
                const auto& s = *sweep.summary;
                entry = {{"lower_edge", s.lower_edge}, {"upper_edge", s.upper_edge},
                         {"lower_clipped", s.lower_clipped}, {"upper_clipped", s.upper_clipped},
                         {"asymmetry", s.asymmetry}};
                asym[variant == Variant::ndtl ? 1 : 0] = s.asymmetry;
            }
            summary[std::string(to_string(variant))] = entry;
        }
        finish(csv, csv_path);
        if(asym[0] && asym[1]) {
            summary["ndtl_less_asymmetric"] = *asym[1] < *asym[0];
            log << "lockrange: asymmetry TDTL " << format_double(*asym[0]) << ", NDTL " << format_double(*asym[1])
                << '\n';
        } else {
            summary["ndtl_less_asymmetric"] = nullptr;
            log << "lockrange: no asymmetry comparison for this grid\n";
        }
        write_json(out_dir / "lockrange.json", summary);
        return any_locked ? exit_ok : exit_unlocked;
    });
}

std::vector<int> divider_sequence(const DividerConfig& config, std::size_t count) {
    config.validate();
    std::vector<int> out;
    out.reserve(count);
    DividerState state;
    for(std::size_t i = 0; i < count; ++i) {
        int ratio = 0;
        std::tie(ratio, state) = next_ratio(state, config);
        out.push_back(ratio);
    }
    return out;
}

} // namespace tanlock
