#include "tanlock/loop_core.hpp"
#include "tanlock/synthesizer.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace tanlock;

namespace {

constexpr double pi = std::numbers::pi;

} // namespace

TEST(PhaseDetect, QuadrantExamples) {
    EXPECT_DOUBLE_EQ(phase_detect(0.0, 1.0).phi, 0.0);
    EXPECT_DOUBLE_EQ(phase_detect(1.0, 0.0).phi, pi / 2);
    EXPECT_DOUBLE_EQ(phase_detect(-1.0, 0.0).phi, -pi / 2);
    EXPECT_DOUBLE_EQ(phase_detect(0.0, -1.0).phi, pi);
    EXPECT_DOUBLE_EQ(phase_detect(-0.0, -1.0).phi, pi);
    EXPECT_NEAR(phase_detect(-1.0, -1.0).phi, -3 * pi / 4, 1e-15);
}

TEST(PhaseDetect, OriginIsDegenerate) {
    const auto d = phase_detect(0.0, 0.0);
    EXPECT_EQ(d.phi, 0.0);
    EXPECT_TRUE(d.degenerate);
    EXPECT_FALSE(phase_detect(1e-300, 0.0).degenerate);
}

TEST(PhaseDetect, RangeProperty) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 1.0);
    for(int i = 0; i < 100000; ++i) {
        const double phi = phase_detect(n(rng), n(rng)).phi;
        ASSERT_GT(phi, -pi);
        ASSERT_LE(phi, pi);
    }
}

TEST(QuadratureTap, NdtlQuarterOfDividedPeriod) {
    const auto tap = quadrature_sample_offset(Variant::ndtl, 0.01, 4, 123.0);
    EXPECT_DOUBLE_EQ(tap.offset, 0.01);
    EXPECT_DOUBLE_EQ(tap.sign, 1.0);
}

TEST(QuadratureTap, NdtlShiftIsQuarterCycleAtLockForAnyFrequency) {
    for(double f_in : {3.0, 25.0, 100.0, 417.5}) {
        for(int d : {1, 3, 4, 5}) {
            const double T = 1.0 / (d * f_in);
            const auto tap = quadrature_sample_offset(Variant::ndtl, T, d, 0.0);
            EXPECT_NEAR(2 * pi * f_in * tap.offset, pi / 2, 1e-12);
        }
    }
}

TEST(QuadratureTap, TdtlDelayIsFixed) {
    const double tau = 1.0 / 400.0;
    const auto tap = quadrature_sample_offset(Variant::tdtl, 0.5, 7, tau);
    EXPECT_DOUBLE_EQ(tap.offset, -tau);
    EXPECT_DOUBLE_EQ(tap.sign, -1.0);
    // Off the design frequency the fixed delay no longer gives 90 degrees.
    for(double f : {80.0, 120.0}) {
        const double shift = 2 * pi * f * tau;
        EXPECT_NEAR(shift - pi / 2, (pi / 2) * (f / 100.0 - 1.0), 1e-12);
    }
}

TEST(Dco, FrequencyLawExamples) {
    LoopParams p;
    p.dco_law = DcoLaw::frequency;
    p.dco_sensitivity = 32.0;
    p.dco_dc_constant = 3.125;
    EXPECT_DOUBLE_EQ(dco_frequency(p, 0.0).frequency, 100.0);
    EXPECT_DOUBLE_EQ(dco_frequency(p, 0.5).frequency, 116.0);
    const auto low = dco_frequency(p, -10.0);
    EXPECT_TRUE(low.saturated);
    EXPECT_DOUBLE_EQ(low.frequency, 0.1);
}

TEST(Dco, PeriodLawExamples) {
    LoopParams p;
    EXPECT_DOUBLE_EQ(dco_frequency(p, 0.0).frequency, 100.0);
    EXPECT_NEAR(dco_frequency(p, 0.5).frequency, 100.0 * 3.125 / 2.625, 1e-12);
    // Period moves linearly with control: T = T_c (1 - v / M).
    const double T = 1.0 / dco_frequency(p, -0.7).frequency;
    EXPECT_NEAR(T, 0.01 * (1.0 + 0.7 / 3.125), 1e-15);
    const auto high = dco_frequency(p, 3.125);
    EXPECT_TRUE(high.saturated);
    EXPECT_DOUBLE_EQ(high.frequency, 1e4);
}

TEST(Dco, DcOffsetScalesCentre) {
    LoopParams p;
    EXPECT_NEAR(dco_frequency(p, 0.0, 3 * 3.125).frequency, 400.0, 1e-9);
    p.dco_law = DcoLaw::frequency;
    EXPECT_NEAR(dco_frequency(p, 0.0, 3 * 3.125).frequency, 400.0, 1e-9);
}

TEST(Dco, LawsAgreeToFirstOrder) {
    LoopParams per;
    LoopParams freq;
    freq.dco_law = DcoLaw::frequency;
    const double h = 1e-6;
    const double d1 = (dco_frequency(per, h).frequency - dco_frequency(per, -h).frequency) / (2 * h);
    const double d2 = (dco_frequency(freq, h).frequency - dco_frequency(freq, -h).frequency) / (2 * h);
    EXPECT_NEAR(d1, d2, 1e-4);
}

TEST(DerivedQuantities, Examples) {
    EXPECT_DOUBLE_EQ(compute_W(100.0, 4.0, 25.0), 1.0);
    EXPECT_DOUBLE_EQ(compute_K1(0.01, 100.0, 4.0), 0.25);
    EXPECT_THROW(compute_W(100.0, 0.0, 25.0), std::domain_error);
    EXPECT_THROW(compute_W(100.0, 4.0, -1.0), std::domain_error);
    EXPECT_THROW(compute_K1(0.0, 100.0, 4.0), std::domain_error);
}

TEST(LoopStep, LockedFixedPointStaysPut) {
    LoopParams p;
    StimulusSpec s;
    s.base_frequency = 100.0;
    auto state = LoopState::initial(1);
    CycleDrive drive;
    drive.ratio = 1;
    drive.next_gain = p.filter_gain;
    for(int i = 0; i < 1000; ++i) {
        const auto r = loop_step(state, p, s, drive);
        ASSERT_LT(std::abs(r.phi), 1e-9);
        ASSERT_EQ(r.k, static_cast<std::uint64_t>(i + 1));
    }
}

TEST(LoopStep, SamplingInstantsIncreaseEvenWhenSaturated) {
    LoopParams p;
    p.filter_gain = 50.0;
    StimulusSpec s;
    s.base_frequency = 37.0;
    s.initial_phase = 2.0;
    auto state = LoopState::initial(1);
    CycleDrive drive;
    drive.ratio = 1;
    drive.next_gain = p.filter_gain;
    double last = 0.0;
    bool any_saturated = false;
    for(int i = 0; i < 2000; ++i) {
        const auto r = loop_step(state, p, s, drive);
        ASSERT_GT(r.t, last);
        last = r.t;
        any_saturated = any_saturated || r.saturated;
    }
    EXPECT_TRUE(any_saturated);
}

TEST(LoopStep, EdgeShiftMovesInstantByHalfPeriod) {
    LoopParams p;
    StimulusSpec s;
    auto a = LoopState::initial(1);
    auto b = LoopState::initial(1);
    CycleDrive drive;
    drive.ratio = 1;
    drive.next_gain = 0.0;
    const auto r1 = loop_step(a, p, s, drive);
    drive.shift = EdgeShift::lag_half;
    const auto r2 = loop_step(b, p, s, drive);
    EXPECT_NEAR(r2.t - r1.t, 0.005, 1e-15);
}

// Linearized recursion for the adapted period-law loop. With the DCO interval
// Delta(phi) = T0 (1 - G1 phi / M) and the NDTL quadrature offset tied to the
// current interval, the error map near the fixed point phi* has Jacobian
// [[1, a], [1, a (1 + sin^2(phi*) / 4)]] in (theta, phi) with
// a = -2 pi f_in T0 G1 / M. Its dominant eigenvalue sets the decay ratio.
namespace {

double dominant_eigenvalue(double G1, double M, double W) {
    const double a = -2 * pi * G1 / M / W;
    const double phi_star = M * (1.0 - W) / G1;
    const double s2 = std::sin(phi_star) * std::sin(phi_star);
    const double tr = 1.0 + a * (1.0 + s2 / 4.0);
    const double det = a * s2 / 4.0;
    const double disc = std::sqrt(tr * tr - 4.0 * det);
    const double l1 = (tr + disc) / 2.0;
    const double l2 = (tr - disc) / 2.0;
    return std::abs(l1) > std::abs(l2) ? l1 : l2;
}

double measured_ratio(const SynthesizerConfig& cfg, const StimulusSpec& stim, double phi_star) {
    const auto trace = simulate(cfg, stim, 400);
    double ratio = 0.0;
    bool found = false;
    for(std::size_t k = 1; k + 1 < trace.size(); ++k) {
        const double e0 = trace[k].phi - phi_star;
        const double e1 = trace[k + 1].phi - phi_star;
        if(std::abs(e0) < 1e-4 && std::abs(e1) > 1e-10) {
            ratio = e1 / e0;
            found = true;
        }
    }
    EXPECT_TRUE(found);
    return ratio;
}

} // namespace

TEST(Linearization, ConvergenceRatioMatchesJacobianAtW1) {
    SynthesizerConfig cfg;
    cfg.divider.ratio_int = 1;
    cfg.fsm.enabled = false;
    StimulusSpec stim;
    stim.base_frequency = 100.0;
    stim.initial_phase = 0.01;
    const double expected = dominant_eigenvalue(0.45, 3.125, 1.0);
    EXPECT_NEAR(expected, 1.0 - 2 * pi * 0.45 / 3.125, 1e-12);
    EXPECT_NEAR(measured_ratio(cfg, stim, 0.0), expected, 0.05 * std::abs(expected));
}

TEST(Linearization, ConvergenceRatioMatchesJacobianOffCentre) {
    for(double W : {0.9, 1.1}) {
        for(double G1 : {0.3, 0.45}) {
            SynthesizerConfig cfg;
            cfg.divider.ratio_int = 1;
            cfg.fsm.enabled = false;
            cfg.loop.filter_gain = G1;
            StimulusSpec stim;
            stim.base_frequency = 100.0 / W;
            const double phi_star = 3.125 * (1.0 - W) / G1;
            const double expected = dominant_eigenvalue(G1, 3.125, W);
            EXPECT_NEAR(measured_ratio(cfg, stim, phi_star), expected, 0.05 * std::abs(expected))
                << "W=" << W << " G1=" << G1;
        }
    }
}
