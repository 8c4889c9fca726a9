#include "giantmol/closedform.hpp"

#include "frozen.hpp"

#include <gtest/gtest.h>

using namespace giantmol;
using namespace giantmol::closedform;

namespace {

SystemParams equal_params(double g, double theta0_pi, double tau = 0.0) {
    SystemParams p;
    p.g = g;
    p.phase.theta0_over_pi = theta0_pi;
    p.phase.tau = tau;
    p.phase.markovian = tau == 0.0;
    return p;
}

}  // namespace

TEST(ClosedForm, MatchesFrozenIndependentSolve) {
    for (const auto& pt : frozen::points) {
        const auto p = pt.params();
        const auto a = amplitudes(pt.config, p, FormulaVariant::GeneralGamma, pt.delta);
        EXPECT_LT(std::abs(a.t - pt.t), 1e-12) << to_string(pt.config.kind);
        EXPECT_LT(std::abs(a.r - pt.r), 1e-12) << to_string(pt.config.kind);
    }
}

TEST(ClosedForm, EqualGammaFormsAgreeWithGeneralForms) {
    for (const auto& c : all_configurations)
        for (double th : {0.0, 0.13, 0.5, 0.99, 1.37, 1.9})
            for (double d : {-6.0, -0.4, 0.0, 2.2}) {
                SystemParams p = equal_params(2.4, th);
                p.gamma1 = p.gamma2 = 1.7;
                p.kappa = 0.05;
                const auto e = amplitudes(c, p, FormulaVariant::EqualGamma, d);
                const auto g = amplitudes(c, p, FormulaVariant::GeneralGamma, d);
                EXPECT_LT(std::abs(e.t - g.t), 1e-12);
                EXPECT_LT(std::abs(e.r - g.r), 1e-12);
            }
}

TEST(ClosedForm, EqualGammaRequiresEqualRates) {
    SystemParams p;
    p.gamma2 = 2.0;
    EXPECT_THROW(amplitudes(Configuration::nested(), p, FormulaVariant::EqualGamma, 0.0), IncompatibleVariant);
    EXPECT_EQ(default_variant(p), FormulaVariant::GeneralGamma);
    EXPECT_EQ(default_variant(SystemParams{}), FormulaVariant::EqualGamma);
}

// theta0 = 0 braided: r = -8i / (delta - g + 8i).
TEST(ClosedForm, BraidedInPhaseLimitIsLorentzian) {
    const auto p = equal_params(1.5, 0.0);
    for (double d : {-9.0, 0.0, 1.5, 4.0}) {
        const complex expect = complex(0.0, -8.0) / (complex(d - 1.5, 8.0));
        EXPECT_LT(std::abs(amplitudes(Configuration::braided(), p, FormulaVariant::EqualGamma, d).r - expect), 1e-14);
    }
}

TEST(ClosedForm, BraidedDecouplesAtQuarterTurn) {
    for (double g : {0.0, 1.0, 3.0})
        for (double d : {-5.0, -3.0, 0.0, 3.0, 7.0}) {
            const auto e = evaluate(Configuration::braided(), equal_params(g, 0.5), FormulaVariant::EqualGamma, d);
            EXPECT_LE(e.point.R, 1e-12);
        }
}

TEST(ClosedForm, RetardedPhaseUsesRealDetuning) {
    SystemParams p = equal_params(1.0, 0.2, 1.5);
    p.kappa = 0.3;
    const double d = 0.7;
    SystemParams fixed = p;
    fixed.phase.theta0_over_pi = (0.2 * pi + 1.5 * d) / pi;
    fixed.phase.tau = 0.0;
    fixed.phase.markovian = true;
    const auto a = amplitudes(Configuration::nested(), p, FormulaVariant::GeneralGamma, d);
    const auto b = amplitudes(Configuration::nested(), fixed, FormulaVariant::GeneralGamma, d);
    EXPECT_LT(std::abs(a.t - b.t), 1e-13);
    EXPECT_LT(std::abs(a.r - b.r), 1e-13);
}

TEST(Evaluate, FallsBackAtPoleZeroCancellation) {
    const auto p = equal_params(2.0, 0.0);
    const auto e = evaluate(Configuration::separated(), p, FormulaVariant::EqualGamma, -2.0);
    EXPECT_TRUE(e.oracle_fallback);
    EXPECT_EQ(e.nudge, kNudge);
    EXPECT_EQ(e.point.delta, -2.0);
    EXPECT_NEAR(e.point.R, 0.8, 1e-9);
    EXPECT_NEAR(e.point.T + e.point.R, 1.0, 1e-9);
}

TEST(Evaluate, NoFallbackAwayFromSingularities) {
    const auto e = evaluate(Configuration::nested(), equal_params(1.0, 0.3), FormulaVariant::EqualGamma, 0.4);
    EXPECT_FALSE(e.oracle_fallback);
    EXPECT_EQ(e.nudge, 0.0);
}

TEST(Sweep, RecordsFallbacksByIndex) {
    const auto s = sweep(Configuration::separated(), equal_params(2.0, 0.0), FormulaVariant::EqualGamma,
                         {-20.0, 20.0, 2001});
    ASSERT_EQ(s.points.size(), 2001u);
    ASSERT_EQ(s.oracle_fallbacks.size(), 1u);
    EXPECT_EQ(s.oracle_fallbacks[0], 900u);
    EXPECT_EQ(s.nudged, s.oracle_fallbacks);
    const auto top = std::max_element(s.points.begin(), s.points.end(),
                                      [](const ScatterPoint& a, const ScatterPoint& b) { return a.R < b.R; });
    EXPECT_EQ(top->delta, 2.0);
}

TEST(Sweep, ThreadCountDoesNotChangeResults) {
    const SweepGrid grid{-15.0, 15.0, 3001};
    SystemParams p = equal_params(3.0, 101.0, 1.0);
    const auto a = sweep(Configuration::separated(), p, FormulaVariant::EqualGamma, grid, {1});
    const auto b = sweep(Configuration::separated(), p, FormulaVariant::EqualGamma, grid, {7});
    ASSERT_EQ(a.points.size(), b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        EXPECT_EQ(a.points[i].delta, b.points[i].delta);
        EXPECT_EQ(a.points[i].t, b.points[i].t);
        EXPECT_EQ(a.points[i].r, b.points[i].r);
    }
    EXPECT_EQ(a.oracle_fallbacks, b.oracle_fallbacks);
}

TEST(Sweep, ValidatesInputs) {
    EXPECT_THROW(sweep(Configuration::nested(), SystemParams{}, FormulaVariant::EqualGamma, {1.0, 0.0, 10}), BadGrid);
    SystemParams bad;
    bad.g = -1.0;
    EXPECT_THROW(sweep(Configuration::nested(), bad, FormulaVariant::EqualGamma, {}), InvalidParams);
    SystemParams unequal;
    unequal.gamma2 = 3.0;
    EXPECT_THROW(sweep(Configuration::nested(), unequal, FormulaVariant::EqualGamma, {}), IncompatibleVariant);
}

TEST(Sweep, RetardedSpectrumRevivesMultiplePeaks) {
    const auto s = sweep(Configuration::separated(), equal_params(3.0, 101.0, 1.0), FormulaVariant::EqualGamma,
                         {-20.0, 20.0, 2001});
    int near_one = 0;
    for (std::size_t i = 1; i + 1 < s.points.size(); ++i)
        if (s.points[i].R > 0.99 && s.points[i].R >= s.points[i - 1].R && s.points[i].R >= s.points[i + 1].R) ++near_one;
    EXPECT_GE(near_one, 2);
}
