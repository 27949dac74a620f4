#pragma once

// Hybrid dual-modulus divider, fractional carry accumulator, edge-selecting
// FSM and the loop adaptation that restores the operating point after
// division.

#include "tanlock/loop_core.hpp"
#include "tanlock/rational.hpp"
#include "tanlock/signal_model.hpp"
#include "tanlock/trace.hpp"

#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

namespace tanlock {

struct DividerConfig {
    int ratio_int = 4;          ///< N; instantaneous DIV is N or N+1
    Rational ratio_frac{0, 1};  ///< F in [0, 1)
    Edge edge = Edge::positive; ///< edge selected before the FSM has an opinion

    [[nodiscard]] Rational beta_exact() const { return Rational(ratio_int, 1) + ratio_frac; }
    [[nodiscard]] double beta_avg() const { return beta_exact().to_double(); }
    void validate() const;
};

struct DividerState {
    Rational accumulator{0, 1};
    std::uint64_t cycle_index = 0;
    int last_ratio = 0;
};

/// Adds F to the accumulator; a carry (accumulator >= 1) selects N+1.
std::pair<int, DividerState> next_ratio(DividerState state, const DividerConfig& config);

enum class GainRule { beta, beta_plus_one };

/// Which divide ratio the adaptation tracks: the DIV value of the current
/// cycle, or the long-run average N + F.
enum class AdaptationBasis { instantaneous, average };

std::string_view to_string(GainRule rule);
std::string_view to_string(AdaptationBasis basis);

struct AdaptationConfig {
    GainRule gain_rule = GainRule::beta;
    AdaptationBasis basis = AdaptationBasis::instantaneous;
    bool enabled = true;
};

struct Adaptation {
    double gain = 0.0;       ///< effective filter gain, V/rad
    double dc_offset = 0.0;  ///< added to M at the DCO input, V
};

/// Gain G1*beta (or G1*(beta+1)) and DC (beta-1)*M, so the DCO centre moves
/// from S*M to beta*S*M. Identity when disabled. Throws std::domain_error for beta < 1.
Adaptation adapt(double beta, const LoopParams& params, const AdaptationConfig& config);

struct OperatingPoint {
    DerivedLoopQuantities pre;   ///< divided loop, no compensation
    DerivedLoopQuantities post;  ///< after adaptation
    double divided_center_pre = 0.0;   ///< Hz, DCO centre / beta
    double divided_center_post = 0.0;
};

/// W and K1 before and after adaptation, using the DCO centre as omega0 and
/// the stepped input frequency as omega.
OperatingPoint restored_operating_point(double beta_avg, const LoopParams& params, const StimulusSpec& stimulus,
                                        const AdaptationConfig& config);

enum class StepSign { positive, negative, unknown };

struct FsmConfig {
    std::size_t window = 8;
    double threshold = 1e-3;  ///< dead band on the windowed mean filter output, V
    bool enabled = true;
};

struct FsmState {
    Edge selected_edge = Edge::positive;
    StepSign step_sign_estimate = StepSign::unknown;
    std::vector<double> recent;  ///< most recent filter outputs, oldest first
};

/// Positive sensed step -> negative-edge divider; negative step -> positive
/// edge; inside the dead band the previous selection is kept.
std::pair<int, FsmState> fsm_select(double filter_output, int div_pos, int div_neg, FsmState state,
                                    const FsmConfig& config);

struct SynthesizerConfig {
    LoopParams loop;
    DividerConfig divider;
    AdaptationConfig adaptation;
    FsmConfig fsm;

    void validate() const;
};

/// Runs the closed loop for `samples` sampling events from the lock-initialized
/// state, using stimulus.seed for the noise stream.
Trace simulate(const SynthesizerConfig& config, const StimulusSpec& stimulus, std::size_t samples);

} // namespace tanlock
