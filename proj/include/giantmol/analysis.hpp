// analysis.hpp: spectral structure of the reflection coefficient.
//
// Complete-reflection peaks sit where the transmission numerator vanishes. In the
// Markovian limit that gives closed-form candidates; with retardation theta depends on the
// detuning and the same condition becomes a transcendental equation, solved here by a
// sign-change scan plus bisection. Candidates are always checked against a direct
// evaluation of R, because several of them coincide with a pole of the amplitude and do
// not reflect at all.

#pragma once

#include "giantmol/closedform.hpp"
#include "giantmol/errors.hpp"
#include "giantmol/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace giantmol::analysis {

inline constexpr double kMarkovianPeakTol = 1e-8;
inline constexpr double kRetardedPeakTol = 1e-6;
inline constexpr double kDipTol = 1e-8;
inline constexpr double kSingularCutoff = 1e-9;

struct Extremum {
    double delta = 0.0;
    double R = 0.0;
    bool verified = false;
    // Value of the peak-condition radicand at this point, NaN when not applicable.
    double radicand = std::numeric_limits<double>::quiet_NaN();
    int branch = 0;  // +1 / -1 for the two roots of the peak condition, 0 otherwise
};

struct PeakReport {
    std::vector<Extremum> peaks;
    std::vector<Extremum> dips;
    std::optional<double> separation;
    bool condition_met = false;
    std::optional<double> radicand;

    std::vector<Extremum> verified_peaks() const {
        std::vector<Extremum> out;
        std::copy_if(peaks.begin(), peaks.end(), std::back_inserter(out),
                     [](const Extremum& e) { return e.verified; });
        return out;
    }
    std::size_t verified_count() const { return verified_peaks().size(); }
    std::optional<Extremum> dip() const {
        for (const auto& d : dips)
            if (d.verified) return d;
        return std::nullopt;
    }
};

namespace detail {

inline void require_equal_gamma(const SystemParams& p, const char* what) {
    if (!p.equal_gamma())
        throw NotApplicable(std::string(what) + " requires gamma1 == gamma2");
}

inline void require_markovian_equal(const SystemParams& p, const char* what) {
    require_equal_gamma(p, what);
    if (!p.phase.markovian && p.phase.tau != 0.0)
        throw NotApplicable(std::string(what) + " requires the Markovian phase model; use nonmarkovian_extrema");
}

// Complete-reflection condition Delta = center(theta) +/- sqrt(radicand(theta)).
struct PeakCondition {
    double center = 0.0;
    double radicand = 0.0;
};

inline PeakCondition peak_condition(Topology kind, double th, double G, double g) noexcept {
    using std::cos;
    using std::sin;
    switch (kind) {
        case Topology::Separated:
            return {2.0 * G * sin(th), g * g + 4.0 * g * G * sin(2.0 * th) * (1.0 + cos(th))};
        case Topology::Braided:
            return {2.0 * G * sin(2.0 * th),
                    4.0 * G * G * (1.0 - cos(th) * cos(3.0 * th)) + g * g
                        + 2.0 * g * G * (3.0 * sin(th) + sin(3.0 * th))};
        case Topology::Nested: {
            const double a = sin(th) - sin(3.0 * th);
            const double b = g + 2.0 * G * (sin(th) + sin(2.0 * th));
            return {G * (sin(th) + sin(3.0 * th)), G * G * a * a + b * b};
        }
    }
    return {};
}

// Rounding can push an exact zero of the radicand slightly negative.
inline double clamp_radicand(double rad, double G, double g) noexcept {
    const double scale = 1.0 + G * G + g * g;
    if (rad < 0.0 && rad > -1e-12 * scale) return 0.0;
    return rad;
}

inline bool sorted_by_delta(const Extremum& a, const Extremum& b) { return a.delta < b.delta; }

}  // namespace detail

inline double reflectance(const Configuration& c, const SystemParams& p, double delta) {
    return closedform::reflectance(c, p, closedform::default_variant(p), delta);
}

// Dip location from the closed forms, or none where the formula is singular, where the
// whole reflection amplitude vanishes, or where direct evaluation shows no zero.
inline std::optional<double> markovian_dip(const Configuration& config, const SystemParams& params) {
    detail::require_markovian_equal(params, "markovian_dip");
    const double th = params.phase.theta0();
    const double G = params.gamma1;
    const double g = params.g;
    std::optional<double> where;
    switch (config.kind) {
        case Topology::Separated: {
            const double den = std::cos(2.0 * th);
            if (std::abs(den) < kSingularCutoff) return std::nullopt;
            if (std::pow(std::cos(th / 2.0), 2) < kSingularCutoff) return std::nullopt;
            where = -(2.0 * G * (std::sin(th) + std::sin(2.0 * th)) + g) / den;
            break;
        }
        case Topology::Braided: {
            const double c = std::cos(th);
            if (std::abs(c) < kSingularCutoff) return std::nullopt;
            where = -2.0 * G * std::tan(th) - g / c;
            break;
        }
        case Topology::Nested: {
            if (std::pow(std::cos(th / 2.0), 2) < kSingularCutoff) return std::nullopt;
            const double num = g * (1.0 - 2.0 * std::cos(th)) - 2.0 * G * (std::sin(2.0 * th) - std::sin(th));
            where = num / (2.0 - 2.0 * std::cos(th) + std::cos(2.0 * th));
            break;
        }
    }
    if (!where || reflectance(config, params, *where) > kDipTol) return std::nullopt;
    return where;
}

inline PeakReport markovian_peaks(const Configuration& config, const SystemParams& params) {
    detail::require_markovian_equal(params, "markovian_peaks");
    const double G = params.gamma1;
    const double th = params.phase.theta0();
    const auto cond = detail::peak_condition(config.kind, th, G, params.g);
    const double rad = detail::clamp_radicand(cond.radicand, G, params.g);

    PeakReport rep;
    rep.radicand = rad;
    rep.condition_met = rad > 0.0;
    auto add = [&](double delta, int branch) {
        const double R = reflectance(config, params, delta);
        rep.peaks.push_back({delta, R, R >= 1.0 - kMarkovianPeakTol, rad, branch});
    };
    if (rad > 0.0) {
        add(cond.center - std::sqrt(rad), -1);
        add(cond.center + std::sqrt(rad), +1);
    } else {
        // Merged pair (rad == 0) or the real part of a complex pair (rad < 0).
        add(cond.center, 0);
    }
    std::sort(rep.peaks.begin(), rep.peaks.end(), detail::sorted_by_delta);

    if (rad >= 0.0 && std::all_of(rep.peaks.begin(), rep.peaks.end(),
                                  [](const Extremum& e) { return e.verified; }))
        rep.separation = 2.0 * std::sqrt(rad);

    if (auto d = markovian_dip(config, params))
        rep.dips.push_back({*d, reflectance(config, params, *d), true});
    return rep;
}

inline std::optional<double> peak_separation(const Configuration& config, const SystemParams& params) {
    return markovian_peaks(config, params).separation;
}

// Two-Lorentzian decomposition of the reflection amplitude (separated and braided only).
// Component + is centred at delta = lambda_plus + g, component - at lambda_minus - g.
struct FanoComponents {
    double lambda_plus = 0.0, lambda_minus = 0.0;
    double gamma_plus = 0.0, gamma_minus = 0.0;
    // Asymmetry and weight from the centre parameters alone. NaN for a zero-width component.
    double q_plus = 0.0, q_minus = 0.0;
    double c_plus = 0.0, c_minus = 0.0;
    // Same quantities measured between the actual component centres (lambda +/- g).
    double q_shift_plus = 0.0, q_shift_minus = 0.0;
    double c_shift_plus = 0.0, c_shift_minus = 0.0;
    double g = 0.0;
    double phase = 0.0;  // 3 theta0, the common phase of both components

    double center_plus() const noexcept { return lambda_plus + g; }
    double center_minus() const noexcept { return lambda_minus - g; }
    double width_ratio() const noexcept { return gamma_plus / gamma_minus; }

    // r_+ and r_-; a zero-width component vanishes identically.
    std::pair<complex, complex> components(double delta) const noexcept {
        const complex I{0.0, 1.0};
        const complex ph = std::polar(1.0, phase);
        complex rp{}, rm{};
        if (gamma_plus > 0.0) rp = ph * gamma_plus / (I * (delta - g - lambda_plus) - gamma_plus);
        if (gamma_minus > 0.0) rm = -ph * gamma_minus / (I * (delta + g - lambda_minus) - gamma_minus);
        return {rp, rm};
    }
};

namespace detail {

inline constexpr double kZeroWidth = 1e-14;

inline void asymmetry(double width, double offset, double& q, double& c) noexcept {
    if (width <= kZeroWidth) {
        q = c = std::numeric_limits<double>::quiet_NaN();
        return;
    }
    q = offset / width;
    c = width * width / (offset * offset + width * width);
}

}  // namespace detail

inline FanoComponents fano_components(const Configuration& config, const SystemParams& params) {
    detail::require_markovian_equal(params, "fano_components");
    const double G = params.gamma1;
    const double th = params.phase.theta0();
    using std::cos;
    using std::sin;
    FanoComponents f;
    switch (config.kind) {
        case Topology::Separated:
            f.lambda_plus = 2.0 * G * sin(th) * (1.0 + 2.0 * cos(th) + 2.0 * cos(th) * cos(th));
            f.lambda_minus = 2.0 * G * sin(th) * (1.0 - 2.0 * cos(th) - 2.0 * cos(th) * cos(th));
            f.gamma_plus = 2.0 * G * (1.0 + cos(th)) * (1.0 + cos(2.0 * th));
            f.gamma_minus = 2.0 * G * (1.0 + cos(th)) * (1.0 - cos(2.0 * th));
            break;
        case Topology::Braided:
            f.lambda_plus = G * (2.0 * sin(2.0 * th) + 3.0 * sin(th) + sin(3.0 * th));
            f.lambda_minus = G * (2.0 * sin(2.0 * th) - 3.0 * sin(th) - sin(3.0 * th));
            f.gamma_plus = 2.0 * G * (1.0 + cos(2.0 * th)) * (1.0 + cos(th));
            f.gamma_minus = 2.0 * G * (1.0 + cos(2.0 * th)) * (1.0 - cos(th));
            break;
        case Topology::Nested:
            throw NotApplicable("fano_components: no two-Lorentzian decomposition for the nested configuration");
    }
    // Products of non-negative factors; clear rounding noise below zero.
    f.gamma_plus = std::max(0.0, f.gamma_plus);
    f.gamma_minus = std::max(0.0, f.gamma_minus);
    f.g = params.g;
    f.phase = 3.0 * th;
    const double dl = f.lambda_plus - f.lambda_minus;
    detail::asymmetry(f.gamma_plus, dl, f.q_plus, f.c_plus);
    detail::asymmetry(f.gamma_minus, -dl, f.q_minus, f.c_minus);
    const double dc = f.center_plus() - f.center_minus();
    detail::asymmetry(f.gamma_plus, dc, f.q_shift_plus, f.c_shift_plus);
    detail::asymmetry(f.gamma_minus, -dc, f.q_shift_minus, f.c_shift_minus);
    return f;
}

inline double fano_decomposition_residual(const Configuration& config, const SystemParams& params,
                                          const SweepGrid& grid) {
    grid.validate();
    const FanoComponents f = fano_components(config, params);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.steps; ++i) {
        const double d = grid.at(i);
        const complex r = closedform::evaluate(config, params, FormulaVariant::EqualGamma, d).point.r;
        const auto [rp, rm] = f.components(d);
        worst = std::max(worst, std::abs(r - (rp + rm)));
    }
    return worst;
}

// Standard Fano profile around the narrower of the two components, with the broad one
// treated as a constant background.
struct FanoApproximation {
    bool upper = true;  // true when gamma_plus > gamma_minus (narrow component is r_-)
    double center = 0.0;
    double width = 0.0;
    double q = 0.0;
    double c = 0.0;
    double ratio = 0.0;  // broad width / narrow width

    double reduced_detuning(double delta) const noexcept { return (delta - center) / width; }
    double R(double delta) const noexcept {
        const double e = reduced_detuning(delta);
        return c * (q + e) * (q + e) / (1.0 + e * e);
    }
    std::pair<double, double> window(double half_widths = 5.0) const noexcept {
        return {center - half_widths * width, center + half_widths * width};
    }
};

inline FanoApproximation fano_approximation(const FanoComponents& f) {
    if (f.gamma_plus <= detail::kZeroWidth && f.gamma_minus <= detail::kZeroWidth)
        throw NotApplicable("fano_approximation: both components have zero width");
    FanoApproximation a;
    a.upper = f.gamma_plus > f.gamma_minus;
    if (a.upper) {
        a.center = f.center_minus();
        a.width = f.gamma_minus;
        a.q = f.q_shift_plus;
        a.c = f.c_shift_plus;
        a.ratio = f.gamma_minus > 0.0 ? f.gamma_plus / f.gamma_minus : std::numeric_limits<double>::infinity();
    } else {
        a.center = f.center_plus();
        a.width = f.gamma_plus;
        a.q = f.q_shift_minus;
        a.c = f.c_shift_minus;
        a.ratio = f.gamma_plus > 0.0 ? f.gamma_minus / f.gamma_plus : std::numeric_limits<double>::infinity();
    }
    if (a.width <= detail::kZeroWidth)
        throw NotApplicable("fano_approximation: narrow component has zero width (pure Lorentzian)");
    return a;
}

inline double exchange_coupling(double theta0, double gamma = 1.0) noexcept {
    return gamma * (3.0 * std::sin(theta0) + std::sin(3.0 * theta0));
}

// Braided configuration near the decoupling phases theta0 = pi/2 + d and 3pi/2 + d.
enum class RabiBranch { HalfPi, ThreeHalfPi };

inline constexpr double kRabiMaxPhase = 0.1 * pi;

inline closedform::Amplitudes rabi_approx_braided(const SystemParams& params, double delta_phase,
                                                  RabiBranch branch, double delta) {
    if (std::abs(delta_phase) > kRabiMaxPhase) throw DeltaTooLarge("rabi approximation requires |delta| <= 0.1 pi");
    detail::require_equal_gamma(params, "rabi_approx_braided");
    const complex I{0.0, 1.0};
    const double G = params.gamma1;
    const double split = params.g + (branch == RabiBranch::HalfPi ? 2.0 : -2.0) * G;
    const double x = delta + 4.0 * G * delta_phase;
    const double d2 = delta_phase * delta_phase;
    const complex den = I * x * (I * x - 8.0 * G * d2) + split * split;
    return {(-x * x + split * split) / den, 8.0 * G * split * d2 / den};
}

inline std::pair<double, double> rabi_peak_positions(const SystemParams& params, double delta_phase,
                                                     RabiBranch branch) {
    if (std::abs(delta_phase) > kRabiMaxPhase) throw DeltaTooLarge("rabi approximation requires |delta| <= 0.1 pi");
    const double G = params.gamma1;
    const double split = params.g + (branch == RabiBranch::HalfPi ? 2.0 : -2.0) * G;
    const double mid = -4.0 * G * delta_phase;
    return {mid - std::abs(split), mid + std::abs(split)};
}

struct DetuningRange {
    double delta_min = -10.0;
    double delta_max = 10.0;
};

struct ExtremaOptions {
    std::size_t scan_points = 2000;
    double root_tol = 1e-10;
    double dip_threshold = 1e-6;
};

namespace detail {

// Bisection on a bracket with f(a) f(b) < 0, carried down to the resolution of double.
// Returns none if f is undefined inside or the bracket closes on a jump rather than a root.
template <class F>
std::optional<double> bisect(F&& f, double a, double b, double fa, double tol) {
    double m = 0.5 * (a + b);
    double fm = f(m);
    for (int it = 0; it < 200 && fm != 0.0; ++it) {
        if (!std::isfinite(fm)) return std::nullopt;
        if ((fm < 0.0) == (fa < 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
        const double next = 0.5 * (a + b);
        if (next == a || next == b) break;
        m = next;
        fm = f(m);
    }
    if (!(std::abs(fm) <= tol)) return std::nullopt;
    return m;
}

template <class F>
double golden_min(F&& f, double a, double b, double tol) {
    constexpr double invphi = 0.6180339887498949;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace detail

inline PeakReport nonmarkovian_extrema(const Configuration& config, const SystemParams& params,
                                       DetuningRange range, ExtremaOptions opt = {}) {
    if (params.phase.markovian || !(params.phase.tau > 0.0))
        throw NotApplicable("nonmarkovian_extrema requires tau > 0 with the retarded phase model");
    detail::require_equal_gamma(params, "nonmarkovian_extrema");
    if (!(range.delta_min < range.delta_max) || !std::isfinite(range.delta_min) || !std::isfinite(range.delta_max))
        throw EmptyRange("nonmarkovian_extrema: detuning range is empty");
    if (opt.scan_points < 2) throw BadGrid("nonmarkovian_extrema: scan needs at least 2 points");

    const double G = params.gamma1;
    const SweepGrid scan{range.delta_min, range.delta_max, opt.scan_points};
    PeakReport rep;

    auto radicand_at = [&](double d) {
        const auto c = detail::peak_condition(config.kind, phase_shift(params, d), G, params.g);
        return detail::clamp_radicand(c.radicand, G, params.g);
    };
    // Last point with a non-negative radicand between a finite sample `in` and a sample
    // `out` where the radicand is negative.
    auto branch_point = [&](double in, double out) {
        for (int it = 0; it < 200; ++it) {
            const double m = 0.5 * (in + out);
            if (m == in || m == out) break;
            (radicand_at(m) >= 0.0 ? in : out) = m;
        }
        return in;
    };

    for (int branch : {+1, -1}) {
        auto f = [&](double d) {
            const auto c = detail::peak_condition(config.kind, phase_shift(params, d), G, params.g);
            const double rad = detail::clamp_radicand(c.radicand, G, params.g);
            if (rad < 0.0) return std::numeric_limits<double>::quiet_NaN();
            return d - (c.center + branch * std::sqrt(rad));
        };
        auto add_root = [&](double root) {
            const auto c = detail::peak_condition(config.kind, phase_shift(params, root), G, params.g);
            const double R = reflectance(config, params, root);
            rep.peaks.push_back({root, R, R >= 1.0 - kRetardedPeakTol, c.radicand, branch});
        };
        auto try_bracket = [&](double a, double b, double fa, double fb) {
            if (fa == 0.0) return add_root(a);
            if (fb == 0.0 || (fa < 0.0) == (fb < 0.0)) return;
            if (auto root = detail::bisect(f, a, b, fa, opt.root_tol)) add_root(*root);
        };
        std::vector<double> fs(scan.steps);
        for (std::size_t i = 0; i < scan.steps; ++i) fs[i] = f(scan.at(i));
        for (std::size_t i = 0; i + 1 < scan.steps; ++i) {
            const double a = scan.at(i), b = scan.at(i + 1);
            const bool fin_a = std::isfinite(fs[i]), fin_b = std::isfinite(fs[i + 1]);
            if (fin_a && fin_b) {
                try_bracket(a, b, fs[i], fs[i + 1]);
            } else if (fin_a) {
                const double e = branch_point(a, b);
                try_bracket(a, e, fs[i], f(e));
            } else if (fin_b) {
                const double e = branch_point(b, a);
                try_bracket(e, b, f(e), fs[i + 1]);
            }
        }
        if (fs.back() == 0.0) add_root(scan.at(scan.steps - 1));
    }
    std::sort(rep.peaks.begin(), rep.peaks.end(), detail::sorted_by_delta);
    // Both branches coincide where the radicand vanishes.
    rep.peaks.erase(std::unique(rep.peaks.begin(), rep.peaks.end(),
                                [&](const Extremum& a, const Extremum& b) {
                                    return std::abs(a.delta - b.delta) <= 100.0 * opt.root_tol;
                                }),
                    rep.peaks.end());
    rep.condition_met = rep.verified_count() > 0;

    std::vector<double> Rs(scan.steps);
    for (std::size_t i = 0; i < scan.steps; ++i) Rs[i] = reflectance(config, params, scan.at(i));
    auto Rf = [&](double d) { return reflectance(config, params, d); };
    for (std::size_t i = 1; i + 1 < scan.steps; ++i) {
        if (!(Rs[i] <= Rs[i - 1] && Rs[i] <= Rs[i + 1])) continue;
        if (Rs[i] == Rs[i - 1] && Rs[i] == Rs[i + 1]) continue;
        const double d = detail::golden_min(Rf, scan.at(i - 1), scan.at(i + 1), opt.root_tol);
        const double R = Rf(d);
        if (R <= opt.dip_threshold) rep.dips.push_back({d, R, R <= kDipTol});
    }
    const auto v = rep.verified_peaks();
    if (v.size() == 2) rep.separation = v[1].delta - v[0].delta;
    return rep;
}

struct ScanOptions {
    double flat_tol = 1e-9;  // spectra with max R - min R below this have no extrema
};

// Local extrema of a sampled spectrum by three-point comparison, refined with a parabola
// through the neighbours and re-evaluated at the refined detuning.
inline PeakReport numerical_extrema(const Spectrum& s, ScanOptions opt = {}) {
    const auto& pts = s.points;
    if (pts.size() < 3) throw TooFewPoints("numerical_extrema needs at least 3 points");
    PeakReport rep;
    const auto [lo, hi] = std::minmax_element(pts.begin(), pts.end(),
                                              [](const ScatterPoint& a, const ScatterPoint& b) { return a.R < b.R; });
    if (hi->R - lo->R < opt.flat_tol) return rep;

    auto refine = [&](std::size_t i, bool maximum) {
        const double h = pts[i + 1].delta - pts[i].delta;
        const double ym = pts[i - 1].R, y0 = pts[i].R, yp = pts[i + 1].R;
        const double curv = ym - 2.0 * y0 + yp;
        double x = pts[i].delta;
        if (curv != 0.0) x += std::clamp(0.5 * h * (ym - yp) / curv, -h, h);
        double R = closedform::evaluate(s.config, s.params, s.variant, x).point.R;
        if (maximum ? R < y0 : R > y0) {
            x = pts[i].delta;
            R = y0;
        }
        return std::pair{x, R};
    };
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
        const double ym = pts[i - 1].R, y0 = pts[i].R, yp = pts[i + 1].R;
        if (y0 > ym && y0 >= yp) {
            const auto [x, R] = refine(i, true);
            rep.peaks.push_back({x, R, R >= 1.0 - kMarkovianPeakTol});
        } else if (y0 < ym && y0 <= yp) {
            const auto [x, R] = refine(i, false);
            rep.dips.push_back({x, R, R <= kDipTol});
        }
    }
    const auto v = rep.verified_peaks();
    rep.condition_met = !v.empty();
    if (v.size() == 2) rep.separation = v[1].delta - v[0].delta;
    return rep;
}

// Full width at half maximum of the global maximum of R, from linear interpolation of the
// half-maximum crossings. None if a crossing falls outside the grid.
inline std::optional<double> full_width_half_max(const Spectrum& s) {
    const auto& p = s.points;
    if (p.size() < 3) throw TooFewPoints("full_width_half_max needs at least 3 points");
    const auto top = static_cast<std::size_t>(
        std::max_element(p.begin(), p.end(), [](const ScatterPoint& a, const ScatterPoint& b) { return a.R < b.R; })
        - p.begin());
    const double half = 0.5 * p[top].R;
    auto cross = [&](std::size_t i, std::size_t j) {
        return p[i].delta + (half - p[i].R) * (p[j].delta - p[i].delta) / (p[j].R - p[i].R);
    };
    std::optional<double> left, right;
    for (std::size_t i = top; i > 0; --i)
        if (p[i - 1].R <= half) { left = cross(i - 1, i); break; }
    for (std::size_t i = top; i + 1 < p.size(); ++i)
        if (p[i + 1].R <= half) { right = cross(i, i + 1); break; }
    if (!left || !right) return std::nullopt;
    return *right - *left;
}

}  // namespace giantmol::analysis
