#pragma once

// Input sinusoid with a single frequency step, sampled at arbitrary instants.

#include <cstdint>
#include <optional>
#include <random>

namespace tanlock {

using Rng = std::mt19937_64;

struct StimulusSpec {
    double base_frequency = 100.0;           ///< Hz, before the step
    double step_value = 0.0;                 ///< normalized step "volts"
    std::optional<double> step_scale;        ///< Hz per volt; defaults to base_frequency
    double step_time = 0.0;                  ///< s
    double amplitude = 1.0;                  ///< V
    double initial_phase = 0.0;              ///< rad, (-pi, pi]
    std::optional<double> snr_db;            ///< absent = noise-free
    std::uint64_t seed = 1;

    [[nodiscard]] double kappa() const { return step_scale.value_or(base_frequency); }
    /// Frequency after the step.
    [[nodiscard]] double stepped_frequency() const { return base_frequency + kappa() * step_value; }
    /// Per-sample noise standard deviation, zero when noise-free.
    [[nodiscard]] double noise_sigma() const;

    /// Throws std::invalid_argument naming the first violated invariant.
    void validate() const;
};

/// f_in(t): base frequency before step_time, stepped frequency from step_time on.
double input_frequency(const StimulusSpec& spec, double t);

/// Noise-free instantaneous phase, continuous across the step. The signal is
/// stationary before step_time, so negative t extrapolates the base tone.
double input_phase(const StimulusSpec& spec, double t);

/// A*sin(phase(t)) plus one independent Gaussian draw from rng when snr_db is set.
double sample_at(const StimulusSpec& spec, double t, Rng& rng);

} // namespace tanlock
