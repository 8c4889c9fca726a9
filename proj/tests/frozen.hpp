#pragma once

#include "giantmol/model.hpp"

// Amplitudes at generic parameter points, computed once with an independent dense solve
// of the real-space equations (numpy.linalg.solve) and frozen here.
namespace frozen {

struct Point {
    giantmol::Configuration config;
    double gamma2, g, theta0_pi, delta, kappa;
    giantmol::complex t, r;

    giantmol::SystemParams params() const {
        giantmol::SystemParams p;
        p.gamma2 = gamma2;
        p.g = g;
        p.kappa = kappa;
        p.phase.theta0_over_pi = theta0_pi;
        return p;
    }
};

inline const Point points[] = {
    {giantmol::Configuration::separated(), 2.5, 1.3, 0.37, 0.8, 0.0,
     {0.059756043446731556, -0.10038303997676225}, {-0.5942513771023179, -0.79574981078767149}},
    {giantmol::Configuration::braided(), 0.6, 2.2, 1.21, -1.7, 0.0,
     {0.43437145196980892, 0.61755618232599285}, {-0.19766346475926758, -0.62519993448811795}},
    {giantmol::Configuration::nested(), 3.1, 0.4, 0.83, 2.9, 0.0,
     {0.13233182984536471, 0.33885117183675506}, {-0.36593808509094078, -0.85659645576818244}},
    {giantmol::Configuration::braided(), 1.0, 3.0, 0.45, 1.0, 0.2,
     {0.9976130720944566, 0.0089293060201367652}, {0.03523688786669335, -0.017031188322802294}},
};

}  // namespace frozen
