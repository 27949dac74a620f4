#include "tanlock/loop_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace tanlock {

std::string_view to_string(Variant variant) { return variant == Variant::ndtl ? "ndtl" : "tdtl"; }

std::string_view to_string(DcoLaw law) { return law == DcoLaw::period ? "period" : "frequency"; }

double LoopParams::delay() const { return tdtl_delay.value_or(0.25 / free_running_frequency()); }

double LoopParams::floor_frequency() const { return f_floor.value_or(1e-3 * free_running_frequency()); }

double LoopParams::ceil_frequency() const { return f_ceil.value_or(100.0 * free_running_frequency()); }

void LoopParams::validate() const {
    if(!(dco_sensitivity > 0.0)) throw std::invalid_argument("loop: dco_sensitivity must be > 0");
    if(!(dco_dc_constant >= 0.0)) throw std::invalid_argument("loop: dco_dc_constant must be >= 0");
    if(!(filter_gain > 0.0)) throw std::invalid_argument("loop: filter_gain must be > 0");
    if(variant == Variant::tdtl && !(delay() > 0.0)) throw std::invalid_argument("loop: tdtl_delay must be > 0");
    const double lo = floor_frequency();
    const double hi = ceil_frequency();
    if(!(lo > 0.0 && lo < hi)) throw std::invalid_argument("loop: clamp bounds need 0 < f_floor < f_ceil");
    const double f_free = free_running_frequency();
    if(f_free < lo || f_free > hi)
        throw std::invalid_argument("loop: free-running frequency S*M lies outside [f_floor, f_ceil]");
}

LoopState LoopState::initial(std::uint64_t seed) {
    LoopState state;
    state.rng.seed(seed);
    return state;
}

PhaseDetection phase_detect(double s_sin, double s_cos) {
    if(s_sin == 0.0 && s_cos == 0.0) return {0.0, true};
    double phi = std::atan2(s_sin, s_cos);
    if(phi <= -std::numbers::pi) phi = std::numbers::pi;
    return {phi, false};
}

QuadratureTap quadrature_sample_offset(Variant variant, double T_dco, int ratio_d, double tdtl_delay) {
    if(variant == Variant::tdtl) return {-tdtl_delay, -1.0};
    return {static_cast<double>(ratio_d) * T_dco / 4.0, 1.0};
}

DcoOutput dco_frequency(const LoopParams& params, double control, double dc_offset) {
    const double s = params.dco_sensitivity;
    const double m_total = params.dco_dc_constant + dc_offset;
    double raw = 0.0;
    if(params.dco_law == DcoLaw::frequency) {
        raw = s * (m_total + control);
    } else if(m_total > 0.0) {
        raw = control < m_total ? s * m_total * m_total / (m_total - control) : std::numeric_limits<double>::infinity();
    }
    const double lo = params.floor_frequency();
    const double hi = params.ceil_frequency();
    if(raw < lo) return {lo, true};
    if(raw > hi) return {hi, true};
    return {raw, false};
}

double compute_W(double omega0, double beta, double omega) {
    if(!(omega0 > 0.0 && beta > 0.0 && omega > 0.0)) throw std::domain_error("compute_W: arguments must be > 0");
    return omega0 / (beta * omega);
}

double compute_K1(double g1, double omega0, double beta) {
    if(!(g1 > 0.0 && omega0 > 0.0 && beta > 0.0)) throw std::domain_error("compute_K1: arguments must be > 0");
    return g1 * omega0 / beta;
}

TraceRecord loop_step(LoopState& state, const LoopParams& params, const StimulusSpec& stimulus,
                      const CycleDrive& drive) {
    const auto dco = dco_frequency(params, state.v, drive.dc_offset);
    const double T = 1.0 / dco.frequency;

    double shift = 0.0;
    if(drive.shift == EdgeShift::lag_half) shift = T / 2.0;
    if(drive.shift == EdgeShift::lead_half) shift = -T / 2.0;
    const double t_next = state.t + drive.ratio * T + shift;

    const auto tap = quadrature_sample_offset(params.variant, T, drive.ratio, params.delay());
    // In-phase sample first so the noise draw order is fixed per step.
    const double s_sin = sample_at(stimulus, t_next, state.rng);
    const double s_cos = tap.sign * sample_at(stimulus, t_next + tap.offset, state.rng);
    const auto detected = phase_detect(s_sin, s_cos);

    state.k += 1;
    state.t = t_next;
    state.T_dco = T;
    state.phi = detected.phi;
    state.v = drive.next_gain * detected.phi;

    TraceRecord record;
    record.k = state.k;
    record.t = t_next;
    record.ratio = drive.ratio;
    record.edge = drive.edge;
    record.f_dco = dco.frequency;
    record.s_sin = s_sin;
    record.s_cos = s_cos;
    record.phi = detected.phi;
    record.v_filter = state.v;
    record.saturated = dco.saturated;
    record.degenerate = detected.degenerate;
    return record;
}

} // namespace tanlock
