#include "tanlock/signal_model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tanlock {

double StimulusSpec::noise_sigma() const {
    if(!snr_db) return 0.0;
    return std::sqrt(amplitude * amplitude / (2.0 * std::pow(10.0, *snr_db / 10.0)));
}

void StimulusSpec::validate() const {
    if(!(base_frequency > 0.0) || !std::isfinite(base_frequency))
        throw std::invalid_argument("stimulus: base_frequency must be > 0");
    if(!(amplitude > 0.0) || !std::isfinite(amplitude))
        throw std::invalid_argument("stimulus: amplitude must be > 0");
    if(!(step_time >= 0.0) || !std::isfinite(step_time))
        throw std::invalid_argument("stimulus: step_time must be >= 0");
    if(!std::isfinite(step_value) || !std::isfinite(kappa()))
        throw std::invalid_argument("stimulus: step_value and step_scale must be finite");
    if(!(stepped_frequency() > 0.0))
        throw std::invalid_argument("stimulus: stepped input frequency " + std::to_string(stepped_frequency()) +
                                    " Hz must be > 0");
    if(!(initial_phase > -std::numbers::pi && initial_phase <= std::numbers::pi))
        throw std::invalid_argument("stimulus: initial_phase must lie in (-pi, pi]");
    if(snr_db && !std::isfinite(*snr_db)) throw std::invalid_argument("stimulus: snr_db must be finite");
}

double input_frequency(const StimulusSpec& spec, double t) {
    if(t < 0.0) throw std::domain_error("input_frequency: t must be >= 0");
    if(t < spec.step_time) return spec.base_frequency;
    const double f = spec.stepped_frequency();
    if(!(f > 0.0)) throw std::invalid_argument("stimulus: stepped input frequency must be > 0");
    return f;
}

double input_phase(const StimulusSpec& spec, double t) {
    // Whole cycles are dropped before scaling by 2*pi so long runs keep full precision.
    double cycles = 0.0;
    if(t < spec.step_time) {
        cycles = spec.base_frequency * t;
    } else {
        const double before = spec.base_frequency * spec.step_time;
        const double after = spec.stepped_frequency() * (t - spec.step_time);
        cycles = (before - std::floor(before)) + (after - std::floor(after));
    }
    cycles -= std::floor(cycles);
    return spec.initial_phase + 2.0 * std::numbers::pi * cycles;
}

double sample_at(const StimulusSpec& spec, double t, Rng& rng) {
    double value = spec.amplitude * std::sin(input_phase(spec, t));
    if(spec.snr_db) {
        std::normal_distribution<double> noise(0.0, spec.noise_sigma());
        value += noise(rng);
    }
    return value;
}

} // namespace tanlock
