#pragma once

// Flat `key = value` scenario files. See README.md for the key table.

#include "tanlock/analysis.hpp"
#include "tanlock/synthesizer.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace tanlock {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& message, std::size_t line = 0);
    /// 1-based line of the offending entry, 0 for whole-file validation errors.
    [[nodiscard]] std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

enum class JitterWindowPolicy { post_lock_half, tail_half };

struct AnalysisConfig {
    double epsilon = 0.01;
    std::size_t hold = 100;
    JitterWindowPolicy jitter_window = JitterWindowPolicy::post_lock_half;
};

struct SweepConfig {
    double snr_min = 0.0;
    double snr_max = 30.0;
    double snr_step = 5.0;
    std::vector<double> snr_list;  ///< overrides the min/max/step grid when non-empty; inf = noise-free
    std::size_t trials = 10;

    [[nodiscard]] std::vector<double> grid() const;
};

struct Scenario {
    std::string name = "scenario";
    SynthesizerConfig synth;
    StimulusSpec stimulus;
    std::size_t run_length = 5000;
    AnalysisConfig analysis;
    SweepConfig sweep;

    [[nodiscard]] LockCriteria lock_criteria() const { return {analysis.epsilon, analysis.hold, std::nullopt}; }
    /// Throws ConfigError naming the violated invariant.
    void validate() const;
};

/// Parses scenario text; unspecified keys take their defaults, unknown keys
/// are rejected. Throws ConfigError (with line number for syntax errors).
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

/// Fully resolved scenario in the same text format (parse_scenario round-trips it).
std::string to_scenario_text(const Scenario& scenario);
nlohmann::ordered_json to_json(const Scenario& scenario);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

} // namespace tanlock
