// model.hpp: domain types shared by the solver, the closed forms and the analysis code.
//
// Units: every rate and detuning is measured in units of a reference decay rate (the
// decay rate of atom a), the group velocity is 1, and the spacing between adjacent
// coupling points equals the propagation time tau.

#pragma once

#include "giantmol/errors.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string_view>
#include <vector>

namespace giantmol {

using complex = std::complex<double>;
inline constexpr double pi = std::numbers::pi;

enum class Topology { Separated, Braided, Nested };

inline constexpr std::string_view to_string(Topology t) noexcept {
    switch (t) {
        case Topology::Separated: return "separated";
        case Topology::Braided: return "braided";
        case Topology::Nested: return "nested";
    }
    return "?";
}

inline std::optional<Topology> parse_topology(std::string_view s) noexcept {
    if (s == "separated") return Topology::Separated;
    if (s == "braided") return Topology::Braided;
    if (s == "nested") return Topology::Nested;
    return std::nullopt;
}

// Coupling-point indices (in units of the spacing) of the two atoms. Atom a couples at
// {0, m}, atom b at {n, l}; together they cover {0, 1, 2, 3}.
struct Configuration {
    Topology kind = Topology::Separated;
    int m = 1;
    int n = 2;
    int l = 3;

    static constexpr Configuration of(Topology t) noexcept {
        switch (t) {
            case Topology::Braided: return {t, 2, 1, 3};
            case Topology::Nested: return {t, 3, 1, 2};
            case Topology::Separated: break;
        }
        return {Topology::Separated, 1, 2, 3};
    }
    static constexpr Configuration separated() noexcept { return of(Topology::Separated); }
    static constexpr Configuration braided() noexcept { return of(Topology::Braided); }
    static constexpr Configuration nested() noexcept { return of(Topology::Nested); }

    constexpr std::array<int, 2> points_a() const noexcept { return {0, m}; }
    constexpr std::array<int, 2> points_b() const noexcept { return {n, l}; }

    friend constexpr bool operator==(const Configuration&, const Configuration&) = default;
};

inline constexpr std::array<Configuration, 3> all_configurations = {
    Configuration::separated(), Configuration::braided(), Configuration::nested()};

// theta = tau * delta + theta0, or theta0 alone in the Markovian limit.
struct PhaseModel {
    double theta0_over_pi = 0.0;
    double tau = 0.0;
    bool markovian = true;

    // theta0 in radians. The integer part of theta0_over_pi is reduced modulo 2 before
    // multiplying by pi, so 101 and 1 map to the same double.
    double theta0() const noexcept {
        const double whole = std::floor(theta0_over_pi);
        const double frac = theta0_over_pi - whole;
        return (std::fmod(whole, 2.0) + frac) * pi;
    }
};

enum class FormulaVariant { GeneralGamma, EqualGamma };

inline constexpr std::string_view to_string(FormulaVariant v) noexcept {
    return v == FormulaVariant::EqualGamma ? "equal-gamma" : "general-gamma";
}

struct SystemParams {
    double gamma1 = 1.0;
    double gamma2 = 1.0;
    double g = 0.0;
    double kappa = 0.0;
    PhaseModel phase{};

    bool equal_gamma() const noexcept { return gamma1 == gamma2; }

    // Zero decay rates are accepted: they describe a waveguide with the molecule detached.
    void validate() const {
        auto finite_nonneg = [](double v, const char* flag) {
            if (!std::isfinite(v)) throw InvalidParams(flag, "must be finite");
            if (v < 0.0) throw InvalidParams(flag, "must be >= 0");
        };
        finite_nonneg(gamma1, "--gamma1");
        finite_nonneg(gamma2, "--gamma2");
        finite_nonneg(g, "--g");
        finite_nonneg(kappa, "--kappa");
        finite_nonneg(phase.theta0_over_pi, "--theta0-pi");
        finite_nonneg(phase.tau, "--tau");
    }
};

inline double phase_shift(const SystemParams& p, double delta) noexcept {
    const double theta0 = p.phase.theta0();
    if (p.phase.markovian) return theta0;
    return p.phase.tau * delta + theta0;
}

inline complex effective_detuning(const SystemParams& p, double delta) noexcept {
    return {delta, p.kappa};
}

struct ScatterPoint {
    double delta = 0.0;
    complex t{};
    complex r{};
    double T = 0.0;
    double R = 0.0;

    static ScatterPoint make(double delta, complex t, complex r) noexcept {
        return {delta, t, r, std::norm(t), std::norm(r)};
    }
};

// Uniform detuning grid, endpoints included.
struct SweepGrid {
    double delta_min = -20.0;
    double delta_max = 20.0;
    std::size_t steps = 2001;

    void validate() const {
        if (!std::isfinite(delta_min) || !std::isfinite(delta_max))
            throw BadGrid("grid bounds must be finite");
        if (!(delta_min < delta_max)) throw BadGrid("grid requires min < max");
        if (steps < 2) throw BadGrid("grid requires at least 2 steps");
    }
    double step() const noexcept {
        return (delta_max - delta_min) / static_cast<double>(steps - 1);
    }
    double at(std::size_t i) const noexcept {
        if (i + 1 == steps) return delta_max;
        return delta_min + static_cast<double>(i) * step();
    }
};

struct Spectrum {
    Configuration config{};
    SystemParams params{};
    FormulaVariant variant = FormulaVariant::GeneralGamma;
    SweepGrid grid{};
    std::vector<ScatterPoint> points;
    // Grid indices recomputed through the linear-system solver because the closed-form
    // denominator vanished, and the subset of those that also needed a detuning nudge.
    std::vector<std::size_t> oracle_fallbacks;
    std::vector<std::size_t> nudged;
};

}  // namespace giantmol
