// closedform.hpp: analytic transmission and reflection amplitudes and the sweep engine.
//
// Each formula is written out term by term as it was derived, without algebraic
// simplification; the linear-system solver in realspace.hpp is the independent check.
// theta comes from phase_shift (so the same expressions cover the retarded regime) and
// every explicit detuning is the lossy one, delta + i kappa.

#pragma once

#include "giantmol/errors.hpp"
#include "giantmol/model.hpp"
#include "giantmol/realspace.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <thread>
#include <vector>

namespace giantmol::closedform {

struct Amplitudes {
    complex t{};
    complex r{};
};

// Numerators and the shared denominator of one formula set, before division.
struct Fraction {
    complex t_num{};
    complex r_num{};
    complex den{};

    Amplitudes divide() const noexcept { return {t_num / den, r_num / den}; }
};

namespace detail {

inline constexpr complex I{0.0, 1.0};

template <class T>
constexpr T sq(const T& x) noexcept { return x * x; }

inline Fraction separated_general(complex D, double th, double G1, double G2, double g) {
    const double s = std::sqrt(G1 * G2);
    const complex e = std::polar(1.0, th);
    const complex den = sq(I * D - (G1 + G2) * (1.0 + e))
                        - (G1 - G2) * (G1 - G2) * sq(1.0 + e)
                        - sq(I * g + s * e * sq(1.0 + e));
    const complex t_num = -(D - 2.0 * G1 * std::sin(th)) * (D - 2.0 * G2 * std::sin(th)) + g * g
                          + 4.0 * g * s * std::sin(2.0 * th) * (1.0 + std::cos(th));
    const complex r_num = 4.0 * I * std::polar(1.0, 3.0 * th) * sq(std::cos(th / 2.0))
                          * (D * ((G1 + G2) * std::cos(2.0 * th) + I * (G2 - G1) * std::sin(2.0 * th))
                             + 4.0 * G1 * G2 * (std::sin(th) + std::sin(2.0 * th)) + 2.0 * g * s);
    return {t_num, r_num, den};
}

inline Fraction separated_equal(complex D, double th, double G, double g) {
    const complex e = std::polar(1.0, th);
    const complex den = sq(I * D - 2.0 * G * (1.0 + e))
                        - sq(I * g + G * e * sq(1.0 + e));
    const complex t_num = -sq(D - 2.0 * G * std::sin(th)) + g * g
                          + 4.0 * g * G * std::sin(2.0 * th) * (1.0 + std::cos(th));
    const complex r_num = 4.0 * I * G * std::polar(1.0, 3.0 * th) * sq(std::cos(th / 2.0))
                          * (2.0 * D * std::cos(2.0 * th)
                             + 4.0 * G * (std::sin(th) + std::sin(2.0 * th)) + 2.0 * g);
    return {t_num, r_num, den};
}

inline Fraction braided_general(complex D, double th, double G1, double G2, double g) {
    const double s = std::sqrt(G1 * G2);
    const complex e = std::polar(1.0, th);
    const complex e2 = std::polar(1.0, 2.0 * th);
    const complex e3 = std::polar(1.0, 3.0 * th);
    const complex den = sq(I * D - (G1 + G2) * (1.0 + e2))
                        - ((G1 + G2) * (G1 + G2) + G1 * G2 * e2) * sq(1.0 + e2)
                        + 4.0 * G1 * G2 + g * g - 2.0 * I * g * s * (3.0 * e + e3);
    const complex t_num = -sq(D - (G1 + G2) * std::sin(2.0 * th))
                          + (G1 + G2) * (G1 + G2) * sq(std::sin(2.0 * th))
                          + 4.0 * G1 * G2 * sq(std::sin(th)) + g * g
                          + 2.0 * g * s * (3.0 * std::sin(th) + std::sin(3.0 * th));
    const complex r_num = 4.0 * I * e3 * sq(std::cos(th))
                          * (D * (G1 * std::conj(e) + G2 * e) + 4.0 * G1 * G2 * std::sin(th)
                             + 2.0 * g * s);
    return {t_num, r_num, den};
}

inline Fraction braided_equal(complex D, double th, double G, double g) {
    const complex e = std::polar(1.0, th);
    const complex e2 = std::polar(1.0, 2.0 * th);
    const complex e3 = std::polar(1.0, 3.0 * th);
    const complex den = sq(I * D - 2.0 * G * (1.0 + e2))
                        - sq(I * g + G * (3.0 * e + e3));
    const complex t_num = -sq(D - 2.0 * G * std::sin(2.0 * th))
                          + 4.0 * G * G * (sq(std::sin(2.0 * th)) + sq(std::sin(th)))
                          + g * g + 2.0 * g * G * (3.0 * std::sin(th) + std::sin(3.0 * th));
    const complex r_num = 8.0 * I * G * e3 * sq(std::cos(th))
                          * (D * std::cos(th) + 2.0 * G * std::sin(th) + g);
    return {t_num, r_num, den};
}

inline Fraction nested_general(complex D, double th, double G1, double G2, double g) {
    const double s = std::sqrt(G1 * G2);
    const complex e = std::polar(1.0, th);
    const complex e3 = std::polar(1.0, 3.0 * th);
    const complex den = (I * D - 2.0 * G2 * (1.0 + e)) * (I * D - 2.0 * G1 * (1.0 + e3))
                        - sq(I * g + 2.0 * s * e * (1.0 + e));
    const complex t_num = -(D - 2.0 * G2 * std::sin(th)) * (D - 2.0 * G1 * std::sin(3.0 * th))
                          + sq(g + 2.0 * s * (std::sin(th) + std::sin(2.0 * th)));
    const complex r_num = 4.0 * I * e3 * sq(std::cos(th / 2.0))
                          * (D * ((3.0 * G1 + G2) - 4.0 * G1 * std::cos(th) + 2.0 * G1 * std::cos(2.0 * th))
                             + 4.0 * G1 * G2 * (std::sin(2.0 * th) - std::sin(th))
                             - 2.0 * g * s * (1.0 - 2.0 * std::cos(th)));
    return {t_num, r_num, den};
}

inline Fraction nested_equal(complex D, double th, double G, double g) {
    const complex e = std::polar(1.0, th);
    const complex e3 = std::polar(1.0, 3.0 * th);
    const complex den = (I * D - 2.0 * G * (1.0 + e)) * (I * D - 2.0 * G * (1.0 + e3))
                        - sq(I * g + 2.0 * G * e * (1.0 + e));
    const complex t_num = -(D - 2.0 * G * std::sin(th)) * (D - 2.0 * G * std::sin(3.0 * th))
                          + sq(g + 2.0 * G * (std::sin(th) + std::sin(2.0 * th)));
    const complex r_num = 8.0 * I * G * e3 * sq(std::cos(th / 2.0))
                          * (D * (2.0 - 2.0 * std::cos(th) + std::cos(2.0 * th))
                             + 2.0 * G * (std::sin(2.0 * th) - std::sin(th))
                             - g * (1.0 - 2.0 * std::cos(th)));
    return {t_num, r_num, den};
}

}  // namespace detail

inline FormulaVariant default_variant(const SystemParams& p) noexcept {
    return p.equal_gamma() ? FormulaVariant::EqualGamma : FormulaVariant::GeneralGamma;
}

inline Fraction fraction(const Configuration& config, const SystemParams& params,
                         FormulaVariant variant, double delta) {
    if (variant == FormulaVariant::EqualGamma && !params.equal_gamma())
        throw IncompatibleVariant("equal-gamma formulas require gamma1 == gamma2");
    const complex D = effective_detuning(params, delta);
    const double th = phase_shift(params, delta);
    const double G1 = params.gamma1, G2 = params.gamma2, g = params.g;
    const bool eq = variant == FormulaVariant::EqualGamma;
    switch (config.kind) {
        case Topology::Separated:
            return eq ? detail::separated_equal(D, th, G1, g) : detail::separated_general(D, th, G1, G2, g);
        case Topology::Braided:
            return eq ? detail::braided_equal(D, th, G1, g) : detail::braided_general(D, th, G1, G2, g);
        case Topology::Nested:
            return eq ? detail::nested_equal(D, th, G1, g) : detail::nested_general(D, th, G1, G2, g);
    }
    throw InvalidParams("--config", "unknown topology");
}

// Literal evaluation. At a removable singularity (numerator and denominator both zero)
// the result is not finite; use evaluate() when that matters.
inline Amplitudes amplitudes(const Configuration& config, const SystemParams& params,
                             FormulaVariant variant, double delta) {
    return fraction(config, params, variant, delta).divide();
}

inline constexpr double kDenominatorFloor = 1e-12;
inline constexpr double kNudge = 1e-9;

struct Evaluation {
    ScatterPoint point{};
    bool oracle_fallback = false;
    double nudge = 0.0;  // +/- shift around delta used when the linear system was singular too
};

// Amplitudes at one detuning, falling back to the linear-system solver where the closed
// form's denominator vanishes. The reported point keeps the requested detuning.
inline Evaluation evaluate(const Configuration& config, const SystemParams& params,
                           FormulaVariant variant, double delta) {
    const Fraction f = fraction(config, params, variant, delta);
    if (std::abs(f.den) >= kDenominatorFloor) {
        const Amplitudes a = f.divide();
        return {ScatterPoint::make(delta, a.t, a.r), false, 0.0};
    }
    try {
        const auto s = realspace::solve_amplitudes(config, params, delta);
        return {ScatterPoint::make(delta, s.t(), s.r()), true, 0.0};
    } catch (const SingularSystem&) {
        // Mean of the two neighbours cancels the first-order error of a one-sided shift.
        const auto lo = realspace::solve_amplitudes(config, params, delta - kNudge);
        const auto hi = realspace::solve_amplitudes(config, params, delta + kNudge);
        return {ScatterPoint::make(delta, 0.5 * (lo.t() + hi.t()), 0.5 * (lo.r() + hi.r())), true, kNudge};
    }
}

inline double reflectance(const Configuration& config, const SystemParams& params,
                          FormulaVariant variant, double delta) {
    return evaluate(config, params, variant, delta).point.R;
}

struct SweepOptions {
    unsigned threads = 1;
};

inline Spectrum sweep(const Configuration& config, const SystemParams& params, FormulaVariant variant,
                      const SweepGrid& grid, SweepOptions options = {}) {
    grid.validate();
    params.validate();
    if (variant == FormulaVariant::EqualGamma && !params.equal_gamma())
        throw IncompatibleVariant("equal-gamma formulas require gamma1 == gamma2");

    std::vector<Evaluation> evals(grid.steps);
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) evals[i] = evaluate(config, params, variant, grid.at(i));
    };
    const std::size_t nthreads =
        std::clamp<std::size_t>(options.threads, 1, std::max<std::size_t>(1, grid.steps / 64));
    if (nthreads <= 1) {
        work(0, grid.steps);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (grid.steps + nthreads - 1) / nthreads;
        for (std::size_t b = 0; b < grid.steps; b += chunk)
            pool.emplace_back(work, b, std::min(grid.steps, b + chunk));
    }

    Spectrum out{config, params, variant, grid, {}, {}, {}};
    out.points.reserve(grid.steps);
    for (std::size_t i = 0; i < grid.steps; ++i) {
        out.points.push_back(evals[i].point);
        if (evals[i].oracle_fallback) out.oracle_fallbacks.push_back(i);
        if (evals[i].nudge != 0.0) out.nudged.push_back(i);
    }
    return out;
}

}  // namespace giantmol::closedform
