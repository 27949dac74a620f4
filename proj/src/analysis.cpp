#include "tanlock/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace tanlock {

namespace {

double wrap(double x) {
    const double two_pi = 2.0 * std::numbers::pi;
    x = std::remainder(x, two_pi);
    if(x <= -std::numbers::pi) x += two_pi;
    return x;
}

double circular_mean(const Trace& trace, std::size_t begin, std::size_t end) {
    double s = 0.0;
    double c = 0.0;
    for(std::size_t i = begin; i < end; ++i) {
        s += std::sin(trace[i].phi);
        c += std::cos(trace[i].phi);
    }
    return std::atan2(s, c);
}

void fill_steady_statistics(const Trace& trace, LockReport& report, std::size_t begin) {
    const std::size_t end = trace.size();
    report.steady_begin = begin;
    report.steady_end = end;
    if(begin >= end) return;

    double sum = 0.0;
    for(std::size_t i = begin; i < end; ++i) sum += wrap(trace[i].phi - report.reference_phi);
    const double n = static_cast<double>(end - begin);
    const double mean_dev = sum / n;
    double var = 0.0;
    for(std::size_t i = begin; i < end; ++i) {
        const double d = wrap(trace[i].phi - report.reference_phi) - mean_dev;
        var += d * d;
    }
    report.steady_phi_mean = wrap(report.reference_phi + mean_dev);
    report.steady_phi_std = std::sqrt(var / n);
    std::tie(report.mean_sample_freq, report.mean_dco_freq) = mean_frequencies(trace, begin, end);
}

} // namespace

std::pair<double, double> mean_frequencies(const Trace& trace, std::size_t begin, std::size_t end) {
    end = std::min(end, trace.size());
    const std::size_t first = std::max<std::size_t>(begin, 1);
    if(first >= end) return {0.0, 0.0};
    const double elapsed = trace[end - 1].t - trace[first - 1].t;
    double cycles = 0.0;
    for(std::size_t i = first; i < end; ++i) cycles += trace[i].ratio;
    return {static_cast<double>(end - first) / elapsed, cycles / elapsed};
}

LockReport detect_lock(const Trace& trace, const LockCriteria& criteria) {
    if(!(criteria.epsilon > 0.0)) throw std::invalid_argument("detect_lock: epsilon must be > 0");
    if(criteria.hold < 1) throw std::invalid_argument("detect_lock: hold must be >= 1");

    LockReport report;
    const std::size_t n = trace.size();
    if(n == 0) return report;

    const std::size_t tail = std::min(criteria.hold, n);
    report.reference_phi = criteria.reference.value_or(circular_mean(trace, n - tail, n));

    if(n >= criteria.hold) {
        std::size_t run = 0;
        for(std::size_t i = 0; i < n; ++i) {
            if(std::abs(wrap(trace[i].phi - report.reference_phi)) < criteria.epsilon) {
                if(++run == criteria.hold) {
                    report.locked = true;
                    report.lock_index = i + 1 - criteria.hold;
                    report.lock_time = trace[*report.lock_index].t;
                    break;
                }
            } else {
                run = 0;
            }
        }
    }

    const std::size_t begin = report.locked ? *report.lock_index + (n - *report.lock_index) / 2 : n / 2;
    fill_steady_statistics(trace, report, begin);
    return report;
}

LockReport detect_frequency_lock(const Trace& trace, double expected_frequency, double tolerance) {
    LockReport report;
    const std::size_t n = trace.size();
    if(n < 3) return report;
    report.reference_phi = circular_mean(trace, n / 2, n);
    fill_steady_statistics(trace, report, n / 2);
    report.locked = std::abs(report.mean_sample_freq - expected_frequency) < tolerance * expected_frequency;
    if(report.locked) {
        report.lock_index = n / 2;
        report.lock_time = trace[n / 2].t;
    }
    return report;
}

std::vector<std::pair<double, double>> phase_plane(const Trace& trace) {
    std::vector<std::pair<double, double>> pairs;
    if(trace.size() < 2) return pairs;
    pairs.reserve(trace.size() - 1);
    for(std::size_t i = 0; i + 1 < trace.size(); ++i) pairs.emplace_back(trace[i].phi, trace[i + 1].phi);
    return pairs;
}

JitterWindow post_lock_window(const Trace& trace, const LockReport& lock) {
    const std::size_t n = trace.size();
    const std::size_t start = lock.lock_index.value_or(0);
    return {start + (n - start) / 2, n};
}

JitterWindow tail_window(const Trace& trace) { return {trace.size() / 2, trace.size()}; }

JitterReport interval_jitter(const Trace& trace, JitterWindow window, std::size_t carry_period) {
    window.end = std::min(window.end, trace.size());
    if(window.end < window.begin + 3) throw std::invalid_argument("jitter: window needs at least 2 intervals");
    if(carry_period == 0) carry_period = 1;

    std::vector<double> intervals;
    std::vector<std::size_t> positions;
    for(std::size_t i = window.begin + 1; i < window.end; ++i) {
        intervals.push_back(trace[i].t - trace[i - 1].t);
        positions.push_back(static_cast<std::size_t>((trace[i].k - 1) % carry_period));
    }
    const double n = static_cast<double>(intervals.size());

    double mean = 0.0;
    for(double d : intervals) mean += d;
    mean /= n;
    double var = 0.0;
    for(double d : intervals) var += (d - mean) * (d - mean);

    std::vector<double> pos_sum(carry_period, 0.0);
    std::vector<double> pos_count(carry_period, 0.0);
    for(std::size_t i = 0; i < intervals.size(); ++i) {
        pos_sum[positions[i]] += intervals[i];
        pos_count[positions[i]] += 1.0;
    }
    double residual = 0.0;
    for(std::size_t i = 0; i < intervals.size(); ++i) {
        const double r = intervals[i] - pos_sum[positions[i]] / pos_count[positions[i]];
        residual += r * r;
    }

    const auto [lo, hi] = std::minmax_element(intervals.begin(), intervals.end());
    JitterReport report;
    report.rms_jitter = std::sqrt(var / n);
    report.peak_to_peak_jitter = *hi - *lo;
    report.rms_carry_removed = std::sqrt(residual / n);
    report.mean_interval = mean;
    report.window = window;
    report.carry_period = carry_period;
    return report;
}

JitterReport jitter_rms(const Trace& trace, const LockReport& lock, JitterWindow window, std::size_t carry_period) {
    if(!lock.locked) throw NotLockedError("jitter: trace never locked; extend the run (more samples)");
    return interval_jitter(trace, window, carry_period);
}

double input_frequency_for_W(const SynthesizerConfig& config, double W) {
    if(!(W > 0.0)) throw std::domain_error("W must be > 0");
    const double beta = config.divider.beta_avg();
    const auto adapted = adapt(beta, config.loop, config.adaptation);
    const double center = config.loop.dco_sensitivity * (config.loop.dco_dc_constant + adapted.dc_offset);
    return center / (beta * W);
}

LockRangeSweep lock_range_sweep(const SynthesizerConfig& config, const StimulusSpec& stimulus_template,
                                std::span<const double> w_grid, std::size_t samples, const LockCriteria& criteria) {
    for(std::size_t i = 0; i < w_grid.size(); ++i) {
        if(!(w_grid[i] > 0.0)) throw std::invalid_argument("lock_range_sweep: W values must be > 0");
        if(i > 0 && !(w_grid[i] > w_grid[i - 1]))
            throw std::invalid_argument("lock_range_sweep: W grid must be strictly increasing");
    }

    LockRangeSweep sweep;
    sweep.variant = config.loop.variant;
    for(double W : w_grid) {
        StimulusSpec stimulus = stimulus_template;
        stimulus.base_frequency = input_frequency_for_W(config, W);
        stimulus.step_value = 0.0;
        stimulus.step_scale.reset();
        stimulus.step_time = 0.0;
        stimulus.snr_db.reset();

        LockRangePoint point;
        point.W = W;
        point.input_frequency = stimulus.base_frequency;
        const Trace trace = simulate(config, stimulus, samples);
        point.report = detect_lock(trace, criteria);
        point.locked = point.report.locked &&
                       std::abs(point.report.mean_sample_freq - point.input_frequency) < 1e-3 * point.input_frequency;
        sweep.points.push_back(std::move(point));
    }

    if(sweep.points.size() < 2) return sweep;
    std::size_t center = 0;
    for(std::size_t i = 1; i < sweep.points.size(); ++i)
        if(std::abs(sweep.points[i].W - 1.0) < std::abs(sweep.points[center].W - 1.0)) center = i;
    if(!sweep.points[center].locked) return sweep;

    std::size_t lo = center;
    std::size_t hi = center;
    while(lo > 0 && sweep.points[lo - 1].locked) --lo;
    while(hi + 1 < sweep.points.size() && sweep.points[hi + 1].locked) ++hi;
    LockRangeSummary summary;
    summary.lower_edge = sweep.points[lo].W;
    summary.upper_edge = sweep.points[hi].W;
    summary.lower_clipped = lo == 0;
    summary.upper_clipped = hi + 1 == sweep.points.size();
    summary.asymmetry = std::abs((summary.upper_edge - 1.0) - (1.0 - summary.lower_edge));
    sweep.summary = summary;
    return sweep;
}

std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
    std::uint64_t z = root + stream + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::pair<SnrSweep, SnrSweep> snr_jitter_sweep(const SynthesizerConfig& config, const StimulusSpec& stimulus,
                                               std::span<const double> snr_grid, std::size_t trials,
                                               std::size_t samples) {
    if(trials < 1) throw std::invalid_argument("snr_jitter_sweep: trials must be >= 1");
    for(std::size_t i = 1; i < snr_grid.size(); ++i)
        if(!(snr_grid[i] > snr_grid[i - 1]))
            throw std::invalid_argument("snr_jitter_sweep: SNR grid must be strictly increasing");

    const auto carry_period = static_cast<std::size_t>(config.divider.ratio_frac.den());
    const auto run_variant = [&](Variant variant) {
        SynthesizerConfig cfg = config;
        cfg.loop.variant = variant;
        SnrSweep sweep;
        sweep.variant = variant;
        for(std::size_t i = 0; i < snr_grid.size(); ++i) {
            SnrPoint point;
            point.snr_db = snr_grid[i];
            point.trials = trials;
            for(std::size_t j = 0; j < trials; ++j) {
                StimulusSpec stim = stimulus;
                stim.seed = derive_seed(stimulus.seed, i * trials + j);
                stim.snr_db = std::isinf(snr_grid[i]) ? std::nullopt : std::optional<double>(snr_grid[i]);
                const Trace trace = simulate(cfg, stim, samples);
                const auto lock = detect_frequency_lock(trace, stim.stepped_frequency());
                const auto jitter = interval_jitter(trace, tail_window(trace), carry_period);
                point.rms_jitter += jitter.rms_jitter;
                point.rms_carry_removed += jitter.rms_carry_removed;
                point.peak_to_peak_jitter += jitter.peak_to_peak_jitter;
                if(lock.locked) ++point.locked_trials;
            }
            const double count = static_cast<double>(trials);
            point.rms_jitter /= count;
            point.rms_carry_removed /= count;
            point.peak_to_peak_jitter /= count;
            sweep.points.push_back(point);
        }
        return sweep;
    };
    return {run_variant(Variant::tdtl), run_variant(Variant::ndtl)};
}

} // namespace tanlock
