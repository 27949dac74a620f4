#include "tanlock/synthesizer.hpp"

#include <numbers>
#include <numeric>
#include <stdexcept>

namespace tanlock {

void DividerConfig::validate() const {
    if(ratio_int < 1) throw std::invalid_argument("divider: ratio_int must be >= 1");
    if(ratio_frac.num() < 0 || ratio_frac >= Rational(1, 1))
        throw std::invalid_argument("divider: ratio_frac must satisfy 0 <= F < 1, got " + ratio_frac.to_string());
}

std::pair<int, DividerState> next_ratio(DividerState state, const DividerConfig& config) {
    state.accumulator = state.accumulator + config.ratio_frac;
    int ratio = config.ratio_int;
    if(state.accumulator >= Rational(1, 1)) {
        ratio += 1;
        state.accumulator = state.accumulator - Rational(1, 1);
    }
    state.cycle_index += 1;
    state.last_ratio = ratio;
    return {ratio, state};
}

std::string_view to_string(GainRule rule) { return rule == GainRule::beta ? "beta" : "beta_plus_one"; }

std::string_view to_string(AdaptationBasis basis) {
    return basis == AdaptationBasis::instantaneous ? "instantaneous" : "average";
}

Adaptation adapt(double beta, const LoopParams& params, const AdaptationConfig& config) {
    if(!(beta >= 1.0)) throw std::domain_error("adapt: beta must be >= 1");
    if(!config.enabled) return {params.filter_gain, 0.0};
    const double factor = config.gain_rule == GainRule::beta ? beta : beta + 1.0;
    return {params.filter_gain * factor, (beta - 1.0) * params.dco_dc_constant};
}

OperatingPoint restored_operating_point(double beta_avg, const LoopParams& params, const StimulusSpec& stimulus,
                                        const AdaptationConfig& config) {
    const double two_pi = 2.0 * std::numbers::pi;
    const double omega = two_pi * stimulus.stepped_frequency();
    const double omega_free = two_pi * params.free_running_frequency();
    const auto adapted = adapt(beta_avg, params, config);
    const double omega_center = two_pi * params.dco_sensitivity * (params.dco_dc_constant + adapted.dc_offset);

    OperatingPoint point;
    point.pre = {compute_W(omega_free, beta_avg, omega), compute_K1(params.filter_gain, omega_free, beta_avg)};
    point.post = {compute_W(omega_center, beta_avg, omega), compute_K1(adapted.gain, omega_center, beta_avg)};
    point.divided_center_pre = params.free_running_frequency() / beta_avg;
    point.divided_center_post = omega_center / two_pi / beta_avg;
    return point;
}

std::pair<int, FsmState> fsm_select(double filter_output, int div_pos, int div_neg, FsmState state,
                                    const FsmConfig& config) {
    state.recent.push_back(filter_output);
    const std::size_t window = config.window == 0 ? 1 : config.window;
    if(state.recent.size() > window) state.recent.erase(state.recent.begin());

    const double mean =
        std::accumulate(state.recent.begin(), state.recent.end(), 0.0) / static_cast<double>(state.recent.size());
    if(mean > config.threshold) {
        state.step_sign_estimate = StepSign::positive;
        state.selected_edge = Edge::negative;
    } else if(mean < -config.threshold) {
        state.step_sign_estimate = StepSign::negative;
        state.selected_edge = Edge::positive;
    } else {
        state.step_sign_estimate = StepSign::unknown;
    }
    return {state.selected_edge == Edge::negative ? div_neg : div_pos, state};
}

void SynthesizerConfig::validate() const {
    loop.validate();
    divider.validate();
    if(fsm.window == 0) throw std::invalid_argument("fsm: window must be >= 1");
    if(!(fsm.threshold >= 0.0)) throw std::invalid_argument("fsm: threshold must be >= 0");
}

} // namespace tanlock
