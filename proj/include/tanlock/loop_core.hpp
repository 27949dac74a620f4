#pragma once

// Tanlock loop recursion: four-quadrant arctan detector, gain-block loop
// filter and DCO timing, for the time-delay (TDTL) and no-delay (NDTL)
// variants.

#include "tanlock/signal_model.hpp"
#include "tanlock/trace.hpp"

#include <optional>
#include <string_view>

namespace tanlock {

enum class Variant { tdtl, ndtl };

/// How the DCO responds to its control input v around its DC operating point
/// M_total. Both laws give S*M_total at v = 0 and agree to first order in v.
///   period:    T = T_c * (1 - v / M_total), T_c = 1 / (S * M_total)
///   frequency: f = S * (M_total + v)
enum class DcoLaw { period, frequency };

std::string_view to_string(Variant variant);
std::string_view to_string(DcoLaw law);

struct LoopParams {
    Variant variant = Variant::ndtl;
    DcoLaw dco_law = DcoLaw::period;
    double dco_sensitivity = 32.0;       ///< S, Hz/V
    double dco_dc_constant = 3.125;      ///< M, V
    double filter_gain = 0.45;           ///< G1, V/rad
    std::optional<double> tdtl_delay;    ///< tau, s; defaults to a quarter free-running period
    std::optional<double> f_floor;       ///< defaults to 1e-3 * f_free
    std::optional<double> f_ceil;        ///< defaults to 100 * f_free

    [[nodiscard]] double free_running_frequency() const { return dco_sensitivity * dco_dc_constant; }
    [[nodiscard]] double delay() const;
    [[nodiscard]] double floor_frequency() const;
    [[nodiscard]] double ceil_frequency() const;

    void validate() const;
};

struct LoopState {
    std::uint64_t k = 0;
    double t = 0.0;       ///< current sampling instant
    double T_dco = 0.0;   ///< DCO period used for the last interval
    double v = 0.0;       ///< loop-filter output driving the next interval
    double phi = 0.0;
    Rng rng;

    /// Lock-initialized state: t = 0, zero phase error, zero control.
    static LoopState initial(std::uint64_t seed);
};

struct DerivedLoopQuantities {
    double W = 0.0;
    double K1 = 0.0;
};

struct PhaseDetection {
    double phi = 0.0;
    bool degenerate = false;
};

/// Four-quadrant arctangent of (s_sin, s_cos) in (-pi, pi]. (0, 0) yields 0, flagged.
PhaseDetection phase_detect(double s_sin, double s_cos);

struct QuadratureTap {
    double offset = 0.0;  ///< added to the in-phase sampling instant
    double sign = 1.0;    ///< applied to the sample taken there
};

/// TDTL: the input delayed by tau, inverted. NDTL: a quarter of the current
/// divider-output period (ratio_d * T_dco / 4) after the in-phase instant.
QuadratureTap quadrature_sample_offset(Variant variant, double T_dco, int ratio_d, double tdtl_delay);

struct DcoOutput {
    double frequency = 0.0;
    bool saturated = false;
};

/// DCO frequency for control voltage `control` with `dc_offset` added to M.
DcoOutput dco_frequency(const LoopParams& params, double control, double dc_offset = 0.0);

/// W = omega0 / (beta * omega). Throws std::domain_error on nonpositive input.
double compute_W(double omega0, double beta, double omega);
/// K1 = g1 * omega0 / beta. Throws std::domain_error on nonpositive input.
double compute_K1(double g1, double omega0, double beta);

enum class EdgeShift { none, lag_half, lead_half };

/// Everything the synthesizer decides for one divider cycle.
struct CycleDrive {
    int ratio = 1;                 ///< DCO cycles in this divider-output period
    double dc_offset = 0.0;        ///< adaptation DC added to M for this cycle
    double next_gain = 0.0;        ///< filter gain applied to the new phase error
    Edge edge = Edge::positive;
    EdgeShift shift = EdgeShift::none;
};

/// Advances one sampling event: holds state.v across the interval, samples
/// both channels, detects phase and updates the filter output.
TraceRecord loop_step(LoopState& state, const LoopParams& params, const StimulusSpec& stimulus,
                      const CycleDrive& drive);

} // namespace tanlock
