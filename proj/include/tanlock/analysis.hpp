#pragma once

// Lock detection, phase planes, period jitter and the lock-range / SNR sweeps.

#include "tanlock/synthesizer.hpp"
#include "tanlock/trace.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace tanlock {

struct LockCriteria {
    double epsilon = 0.01;  ///< rad
    std::size_t hold = 100;
    /// Steady-state phase the trace must settle on. When absent it is the
    /// circular mean of the final `hold` samples.
    std::optional<double> reference;
};

struct LockReport {
    bool locked = false;
    std::optional<std::size_t> lock_index;  ///< index into the trace
    std::optional<double> lock_time;        ///< s
    double reference_phi = 0.0;
    double steady_phi_mean = 0.0;
    double steady_phi_std = 0.0;
    double mean_sample_freq = 0.0;  ///< Hz, sampling events per second
    double mean_dco_freq = 0.0;     ///< Hz, DCO cycles per second
    std::size_t steady_begin = 0;   ///< statistics window [begin, end)
    std::size_t steady_end = 0;
};

/// First index k with |phi_j - reference| < epsilon for all j in [k, k+hold).
/// Steady statistics cover the trailing half of the post-lock trace (of the
/// whole trace when unlocked).
LockReport detect_lock(const Trace& trace, const LockCriteria& criteria = {});

/// Noise-tolerant lock test: mean sampling frequency over the trailing half
/// within `tolerance` (relative) of `expected_frequency`.
LockReport detect_frequency_lock(const Trace& trace, double expected_frequency, double tolerance = 1e-2);

/// Mean sampling and DCO frequencies over records [begin, end).
std::pair<double, double> mean_frequencies(const Trace& trace, std::size_t begin, std::size_t end);

/// Consecutive phase-error pairs (phi_k, phi_k+1).
std::vector<std::pair<double, double>> phase_plane(const Trace& trace);

struct JitterWindow {
    std::size_t begin = 0;  ///< record range [begin, end); intervals join neighbours
    std::size_t end = 0;
};

struct JitterReport {
    double rms_jitter = 0.0;           ///< s, std of sampling intervals
    double peak_to_peak_jitter = 0.0;  ///< s
    double rms_carry_removed = 0.0;    ///< s, after removing the per-carry-position mean
    double mean_interval = 0.0;        ///< s
    JitterWindow window;
    std::size_t carry_period = 1;
};

class NotLockedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

JitterWindow post_lock_window(const Trace& trace, const LockReport& lock);
JitterWindow tail_window(const Trace& trace);

/// Interval statistics over a window, no lock precondition.
JitterReport interval_jitter(const Trace& trace, JitterWindow window, std::size_t carry_period = 1);

/// Period jitter of a locked trace; throws NotLockedError when `lock` is not
/// locked and std::invalid_argument when the window has fewer than 2 intervals.
JitterReport jitter_rms(const Trace& trace, const LockReport& lock, JitterWindow window,
                        std::size_t carry_period = 1);

struct LockRangePoint {
    double W = 0.0;
    double input_frequency = 0.0;
    bool locked = false;
    LockReport report;
};

struct LockRangeSummary {
    double lower_edge = 0.0;
    double upper_edge = 0.0;
    bool lower_clipped = false;  ///< edge is the grid boundary
    bool upper_clipped = false;
    /// | (upper - 1) - (1 - lower) |
    double asymmetry = 0.0;
};

struct LockRangeSweep {
    Variant variant = Variant::ndtl;
    std::vector<LockRangePoint> points;
    std::optional<LockRangeSummary> summary;
};

/// Input frequency that puts the (adapted) loop at normalized frequency W.
double input_frequency_for_W(const SynthesizerConfig& config, double W);

/// Noise-free cold-start runs over a strictly increasing W grid. The summary
/// is the contiguous locked run around W = 1; absent for fewer than two
/// points or when the point nearest W = 1 fails to lock.
LockRangeSweep lock_range_sweep(const SynthesizerConfig& config, const StimulusSpec& stimulus_template,
                                std::span<const double> w_grid, std::size_t samples, const LockCriteria& criteria);

struct SnrPoint {
    double snr_db = 0.0;  ///< +inf means noise-free
    double rms_jitter = 0.0;  ///< mean over trials
    double rms_carry_removed = 0.0;
    double peak_to_peak_jitter = 0.0;
    std::size_t trials = 0;
    std::size_t locked_trials = 0;
};

struct SnrSweep {
    Variant variant = Variant::ndtl;
    std::vector<SnrPoint> points;
};

/// splitmix64(root + stream): independent, reproducible per-trial seeds.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream);

/// Paired TDTL/NDTL runs at each SNR point. Trial j at point i uses
/// derive_seed(stimulus.seed, i * trials + j) for both variants. Jitter is
/// measured over the trailing half of each run.
std::pair<SnrSweep, SnrSweep> snr_jitter_sweep(const SynthesizerConfig& config, const StimulusSpec& stimulus,
                                               std::span<const double> snr_grid, std::size_t trials,
                                               std::size_t samples);

} // namespace tanlock
