#include "tanlock/synthesizer.hpp"

#include <tuple>

namespace tanlock {

namespace {

EdgeShift transition(Edge from, Edge to) {
    if(from == to) return EdgeShift::none;
    // The negative-edge divider output trails the positive one by half a DCO period.
    return to == Edge::negative ? EdgeShift::lag_half : EdgeShift::lead_half;
}

} // namespace

Trace simulate(const SynthesizerConfig& config, const StimulusSpec& stimulus, std::size_t samples) {
    config.validate();
    stimulus.validate();

    const double beta_avg = config.divider.beta_avg();
    const auto adaptation_for = [&](int ratio) {
        const double beta = config.adaptation.basis == AdaptationBasis::instantaneous ? ratio : beta_avg;
        return adapt(beta, config.loop, config.adaptation);
    };

    auto state = LoopState::initial(stimulus.seed);
    DividerState divider;
    FsmState fsm;
    fsm.selected_edge = config.divider.edge;

    int ratio = 0;
    std::tie(ratio, divider) = next_ratio(divider, config.divider);

    Trace trace;
    trace.reserve(samples);
    for(std::size_t i = 0; i < samples; ++i) {
        // The divider's next DIV is known one cycle ahead, which lets the new
        // phase error be scaled by the gain of the cycle it will drive.
        auto [upcoming, advanced] = next_ratio(divider, config.divider);
        divider = advanced;

        const Edge previous = fsm.selected_edge;
        int selected = ratio;
        if(config.fsm.enabled) std::tie(selected, fsm) = fsm_select(state.v, ratio, ratio, std::move(fsm), config.fsm);

        CycleDrive drive;
        drive.ratio = selected;
        drive.dc_offset = adaptation_for(selected).dc_offset;
        drive.next_gain = adaptation_for(upcoming).gain;
        drive.edge = fsm.selected_edge;
        drive.shift = transition(previous, fsm.selected_edge);

        trace.push_back(loop_step(state, config.loop, stimulus, drive));
        ratio = upcoming;
    }
    return trace;
}

} // namespace tanlock
