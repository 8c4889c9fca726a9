#include "giantmol/model.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

using namespace giantmol;

TEST(PhaseModel, ReducesWholeTurnsExactly) {
    PhaseModel a{101.0}, b{1.0}, c{100.5}, d{0.5};
    EXPECT_EQ(a.theta0(), pi);
    EXPECT_EQ(a.theta0(), b.theta0());
    EXPECT_EQ(c.theta0(), d.theta0());
    EXPECT_EQ(c.theta0(), pi / 2.0);
    EXPECT_EQ(PhaseModel{2.0}.theta0(), 0.0);
    EXPECT_EQ(PhaseModel{1.75}.theta0(), 1.75 * pi);
}

TEST(PhaseModel, FractionalPartKeepsFullPrecision) {
    EXPECT_DOUBLE_EQ(PhaseModel{2.25}.theta0(), 0.25 * pi);
    EXPECT_DOUBLE_EQ(PhaseModel{1001.5}.theta0(), 1.5 * pi);
}

TEST(PhaseShift, MarkovianIgnoresDetuning) {
    SystemParams p;
    p.phase = {0.5, 3.0, true};
    EXPECT_EQ(phase_shift(p, 7.0), pi / 2.0);
    p.phase.markovian = false;
    EXPECT_DOUBLE_EQ(phase_shift(p, 2.0), 6.0 + pi / 2.0);
    EXPECT_DOUBLE_EQ(phase_shift(p, -2.0), -6.0 + pi / 2.0);
}

TEST(EffectiveDetuning, LossEntersAsImaginaryPart) {
    SystemParams p;
    p.kappa = 0.25;
    EXPECT_EQ(effective_detuning(p, 1.5), complex(1.5, 0.25));
}

TEST(SystemParams, ValidationNamesTheOffendingFlag) {
    auto flag_of = [](SystemParams p) -> std::string {
        try {
            p.validate();
        } catch (const InvalidParams& e) {
            return e.flag();
        }
        return "";
    };
    SystemParams ok;
    EXPECT_EQ(flag_of(ok), "");
    SystemParams p = ok;
    p.g = -1.0;
    EXPECT_EQ(flag_of(p), "--g");
    p = ok;
    p.gamma1 = std::nan("");
    EXPECT_EQ(flag_of(p), "--gamma1");
    p = ok;
    p.gamma2 = -0.5;
    EXPECT_EQ(flag_of(p), "--gamma2");
    p = ok;
    p.kappa = INFINITY;
    EXPECT_EQ(flag_of(p), "--kappa");
    p = ok;
    p.phase.tau = -1.0;
    EXPECT_EQ(flag_of(p), "--tau");
    p = ok;
    p.phase.theta0_over_pi = -0.1;
    EXPECT_EQ(flag_of(p), "--theta0-pi");
}

TEST(SystemParams, DetachedMoleculeIsValid) {
    SystemParams p;
    p.gamma1 = p.gamma2 = 0.0;
    EXPECT_NO_THROW(p.validate());
    EXPECT_TRUE(p.equal_gamma());
}

TEST(Configuration, CouplingPointsCoverTheWaveguideOnce) {
    for (const auto& c : all_configurations) {
        std::multiset<int> pts;
        for (int j : c.points_a()) pts.insert(j);
        for (int j : c.points_b()) pts.insert(j);
        EXPECT_EQ(pts, (std::multiset<int>{0, 1, 2, 3})) << to_string(c.kind);
    }
    EXPECT_EQ(Configuration::braided().points_a(), (std::array<int, 2>{0, 2}));
    EXPECT_EQ(Configuration::braided().points_b(), (std::array<int, 2>{1, 3}));
    EXPECT_EQ(Configuration::nested().points_a(), (std::array<int, 2>{0, 3}));
    EXPECT_EQ(Configuration::nested().points_b(), (std::array<int, 2>{1, 2}));
}

TEST(Topology, NamesRoundTrip) {
    for (auto t : {Topology::Separated, Topology::Braided, Topology::Nested})
        EXPECT_EQ(parse_topology(to_string(t)), t);
    EXPECT_FALSE(parse_topology("twisted"));
}

TEST(SweepGrid, EndpointsAreExact) {
    SweepGrid g{-20.0, 20.0, 2001};
    EXPECT_EQ(g.at(0), -20.0);
    EXPECT_EQ(g.at(2000), 20.0);
    EXPECT_DOUBLE_EQ(g.step(), 0.02);
    SweepGrid h{0.1, 0.7, 7};
    EXPECT_EQ(h.at(6), 0.7);
}

TEST(SweepGrid, RejectsDegenerateGrids) {
    EXPECT_THROW((SweepGrid{1.0, 1.0, 10}.validate()), BadGrid);
    EXPECT_THROW((SweepGrid{2.0, 1.0, 10}.validate()), BadGrid);
    EXPECT_THROW((SweepGrid{0.0, 1.0, 1}.validate()), BadGrid);
    EXPECT_THROW((SweepGrid{0.0, INFINITY, 10}.validate()), BadGrid);
    EXPECT_NO_THROW((SweepGrid{0.0, 1.0, 2}.validate()));
}

TEST(ScatterPoint, CoefficientsAreSquaredMagnitudes) {
    const auto p = ScatterPoint::make(0.0, complex(0.6, 0.0), complex(0.0, -0.8));
    EXPECT_DOUBLE_EQ(p.T, 0.36);
    EXPECT_DOUBLE_EQ(p.R, 0.64);
}
