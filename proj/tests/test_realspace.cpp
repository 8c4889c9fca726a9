#include "giantmol/realspace.hpp"

#include "frozen.hpp"

#include <gtest/gtest.h>

using namespace giantmol;
using namespace giantmol::realspace;

namespace {

SystemParams equal_params(double g, double theta0_pi) {
    SystemParams p;
    p.g = g;
    p.phase.theta0_over_pi = theta0_pi;
    return p;
}

}  // namespace

TEST(Realspace, MatchesFrozenIndependentSolve) {
    for (const auto& pt : frozen::points) {
        const auto a = solve_amplitudes(pt.config, pt.params(), pt.delta);
        EXPECT_LT(std::abs(a.t() - pt.t), 1e-13) << to_string(pt.config.kind);
        EXPECT_LT(std::abs(a.r() - pt.r), 1e-13) << to_string(pt.config.kind);
    }
}

TEST(Realspace, SolutionSatisfiesTheSystem) {
    for (const auto& pt : frozen::points) {
        const auto sys = build_system(pt.config, pt.params(), pt.delta);
        EXPECT_LT(residual_inf(sys, solve_dense(sys)), 1e-13);
    }
}

TEST(Realspace, BoundaryValuesAreFixed) {
    const auto a = solve_amplitudes(Configuration::nested(), equal_params(1.0, 0.3), 0.7);
    EXPECT_EQ(a.t_seg[0], complex(1.0, 0.0));
    EXPECT_EQ(a.r_seg[4], complex(0.0, 0.0));
}

TEST(Realspace, DetachedMoleculeTransmitsFully) {
    SystemParams p = equal_params(2.0, 0.4);
    p.gamma1 = p.gamma2 = 0.0;
    for (const auto& c : all_configurations) {
        const auto a = solve_amplitudes(c, p, 0.5);
        EXPECT_LT(std::abs(a.t() - 1.0), 1e-15);
        EXPECT_LT(std::abs(a.r()), 1e-15);
    }
}

// theta0 = 0 separated: single Lorentzian of half width 8 centred at delta = g.
TEST(Realspace, SeparatedInPhaseLimitIsLorentzian) {
    const auto p = equal_params(2.0, 0.0);
    EXPECT_NEAR(std::norm(solve_amplitudes(Configuration::separated(), p, -20.0).r()), 16.0 / 137.0, 1e-14);
    const auto on = solve_amplitudes(Configuration::separated(), p, 2.0);
    EXPECT_NEAR(std::abs(on.r() - complex(-1.0, 0.0)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(on.t()), 0.0, 1e-14);
}

TEST(Realspace, LosslessSolveIsUnitary) {
    for (const auto& c : all_configurations)
        for (double d : {-7.0, -1.1, 0.0, 0.3, 5.5}) {
            SystemParams p = equal_params(1.7, 0.61);
            p.gamma2 = 2.3;
            p.phase.tau = 1.0;
            p.phase.markovian = false;
            const auto a = solve_amplitudes(c, p, d);
            EXPECT_NEAR(std::norm(a.t()) + std::norm(a.r()), 1.0, 1e-13);
        }
}

TEST(Realspace, LossRemovesFlux) {
    SystemParams p = equal_params(1.0, 0.3);
    p.kappa = 0.5;
    const auto a = solve_amplitudes(Configuration::braided(), p, 0.2);
    EXPECT_LT(std::norm(a.t()) + std::norm(a.r()), 1.0 - 1e-3);
}

// Pole-zero point: closed-form numerator and denominator vanish together here.
TEST(Realspace, DegenerateSystemIsReported) {
    EXPECT_THROW(solve_amplitudes(Configuration::separated(), equal_params(2.0, 0.0), -2.0), SingularSystem);
}

TEST(Realspace, LayoutRejectsOverlappingPoints) {
    Configuration bad{Topology::Separated, 1, 1, 3};
    EXPECT_THROW(CouplingLayout::make(bad, SystemParams{}), InvalidParams);
    Configuration out_of_range{Topology::Separated, 1, 2, 4};
    EXPECT_THROW(CouplingLayout::make(out_of_range, SystemParams{}), InvalidParams);
}

TEST(Realspace, LayoutAssignsOwnersAndStrengths) {
    SystemParams p;
    p.gamma1 = 4.0;
    p.gamma2 = 9.0;
    const auto l = CouplingLayout::make(Configuration::braided(), p);
    EXPECT_EQ(l.owner, (std::array<Atom, 4>{Atom::A, Atom::B, Atom::A, Atom::B}));
    EXPECT_DOUBLE_EQ(l.coupling(0), 2.0);
    EXPECT_DOUBLE_EQ(l.coupling(1), 3.0);
}

TEST(SolveDense, ThrowsOnZeroPivot) {
    LinearSystem sys;
    for (std::size_t i = 0; i + 1 < kUnknowns; ++i) sys.matrix[i][i] = 1.0;
    EXPECT_THROW(solve_dense(sys), SingularSystem);
}

TEST(SolveDense, PivotsPastZeroDiagonal) {
    LinearSystem sys;
    for (std::size_t i = 0; i < kUnknowns; ++i) {
        sys.matrix[i][(i + 1) % kUnknowns] = complex(1.0, static_cast<double>(i));
        sys.rhs[i] = static_cast<double>(i + 1);
    }
    const auto x = solve_dense(sys);
    EXPECT_LT(residual_inf(sys, x), 1e-13);
}
