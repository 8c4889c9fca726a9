// realspace.hpp: scattering amplitudes from the real-space equations of motion.
//
// The waveguide is cut into five segments by the four coupling points at x = j (j = 0..3).
// Segment j lies left of point j. A photon enters from the left, so the right-moving
// amplitude in segment 0 is 1 and the left-moving amplitude in segment 4 is 0. The
// remaining eight field amplitudes and the two atomic amplitudes solve a 10x10 system:
// two jump conditions per point and one field-averaged equation per atom, with the field
// at a coupling point taken as the mean of its two neighbouring segments.

#pragma once

#include "giantmol/errors.hpp"
#include "giantmol/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>

namespace giantmol::realspace {

enum class Atom { A = 0, B = 1 };

inline constexpr std::size_t kUnknowns = 10;

// Unknown ordering: t1 t2 t3 t r r1 r2 r3 u_a u_b.
namespace idx {
inline constexpr std::size_t t1 = 0, t2 = 1, t3 = 2, t = 3;
inline constexpr std::size_t r = 4, r1 = 5, r2 = 6, r3 = 7;
inline constexpr std::size_t u_a = 8, u_b = 9;
}  // namespace idx

struct CouplingLayout {
    std::array<Atom, 4> owner{};
    std::array<double, 2> strength{};  // lambda = sqrt(gamma1), eta = sqrt(gamma2)

    static CouplingLayout make(const Configuration& c, const SystemParams& p) {
        CouplingLayout out;
        std::array<int, 4> count{};
        out.owner.fill(Atom::A);
        for (int j : c.points_b()) {
            if (j < 0 || j > 3) throw InvalidParams("--config", "coupling index out of range");
            out.owner[static_cast<std::size_t>(j)] = Atom::B;
            ++count[static_cast<std::size_t>(j)];
        }
        for (int j : c.points_a()) {
            if (j < 0 || j > 3) throw InvalidParams("--config", "coupling index out of range");
            ++count[static_cast<std::size_t>(j)];
        }
        if (std::any_of(count.begin(), count.end(), [](int k) { return k != 1; }))
            throw InvalidParams("--config", "coupling points must cover {0,1,2,3} once each");
        out.strength = {std::sqrt(p.gamma1), std::sqrt(p.gamma2)};
        return out;
    }

    double coupling(std::size_t point) const noexcept {
        return strength[static_cast<std::size_t>(owner[point])];
    }
};

struct InternalAmplitudes {
    std::array<complex, 5> t_seg{};  // t_seg[0] = 1, t_seg[4] = t
    std::array<complex, 5> r_seg{};  // r_seg[0] = r, r_seg[4] = 0
    complex u_a{};
    complex u_b{};

    complex t() const noexcept { return t_seg[4]; }
    complex r() const noexcept { return r_seg[0]; }
};

struct LinearSystem {
    std::array<std::array<complex, kUnknowns>, kUnknowns> matrix{};
    std::array<complex, kUnknowns> rhs{};
};

using Solution = std::array<complex, kUnknowns>;

namespace detail {

// Column of t_seg[j], or none for the fixed incoming amplitude t_seg[0] = 1.
constexpr std::optional<std::size_t> t_column(std::size_t j) noexcept {
    if (j == 0) return std::nullopt;
    return j - 1;
}
// Column of r_seg[j], or none for the fixed r_seg[4] = 0.
constexpr std::optional<std::size_t> r_column(std::size_t j) noexcept {
    if (j == 4) return std::nullopt;
    return idx::r + j;
}

}  // namespace detail

inline LinearSystem build_system(const Configuration& config, const SystemParams& params,
                                 double delta) {
    const CouplingLayout layout = CouplingLayout::make(config, params);
    const double theta = phase_shift(params, delta);
    const complex i{0.0, 1.0};
    LinearSystem sys;
    auto& A = sys.matrix;
    auto& b = sys.rhs;

    std::size_t row = 0;
    for (std::size_t j = 0; j < 4; ++j) {
        const std::size_t u = idx::u_a + static_cast<std::size_t>(layout.owner[j]);
        const double kq = layout.coupling(j);
        const complex fwd = std::polar(1.0, static_cast<double>(j) * theta);
        const complex bwd = std::conj(fwd);

        // i (t_j - t_{j+1}) e^{ij theta} + k u = 0
        if (auto c = detail::t_column(j)) A[row][*c] += i * fwd;
        else b[row] -= i * fwd;
        A[row][*detail::t_column(j + 1)] -= i * fwd;
        A[row][u] += kq;
        ++row;

        // i (r_{j+1} - r_j) e^{-ij theta} + k u = 0
        if (auto c = detail::r_column(j + 1)) A[row][*c] += i * bwd;
        A[row][*detail::r_column(j)] -= i * bwd;
        A[row][u] += kq;
        ++row;
    }

    const complex detuning = effective_detuning(params, delta);
    for (std::size_t q = 0; q < 2; ++q) {
        const std::size_t u = idx::u_a + q;
        const std::size_t other = idx::u_a + (1 - q);
        const double kq = layout.strength[q];
        // detuning u_q - g u_other - (k/2) sum_j [...] = 0
        A[row][u] += detuning;
        A[row][other] -= params.g;
        for (std::size_t j = 0; j < 4; ++j) {
            if (static_cast<std::size_t>(layout.owner[j]) != q) continue;
            const complex fwd = std::polar(1.0, static_cast<double>(j) * theta);
            const complex bwd = std::conj(fwd);
            for (std::size_t seg : {j, j + 1}) {
                if (auto c = detail::t_column(seg)) A[row][*c] -= 0.5 * kq * fwd;
                else b[row] += 0.5 * kq * fwd;
                if (auto c = detail::r_column(seg)) A[row][*c] -= 0.5 * kq * bwd;
            }
        }
        ++row;
    }
    return sys;
}

inline constexpr double kPivotFloor = 1e-14;

// Gaussian elimination with partial pivoting on the fixed-size system.
inline Solution solve_dense(LinearSystem sys) {
    auto& A = sys.matrix;
    auto& b = sys.rhs;
    constexpr std::size_t n = kUnknowns;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::abs(A[col][col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double mag = std::abs(A[r][col]);
            if (mag > best) { best = mag; piv = r; }
        }
        if (best < kPivotFloor) throw SingularSystem("linear system is singular at this parameter point");
        if (piv != col) {
            std::swap(A[piv], A[col]);
            std::swap(b[piv], b[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const complex f = A[r][col] / A[col][col];
            if (f == complex{}) continue;
            for (std::size_t k = col; k < n; ++k) A[r][k] -= f * A[col][k];
            b[r] -= f * b[col];
        }
    }
    Solution x{};
    for (std::size_t r = n; r-- > 0;) {
        complex acc = b[r];
        for (std::size_t k = r + 1; k < n; ++k) acc -= A[r][k] * x[k];
        x[r] = acc / A[r][r];
    }
    return x;
}

inline double residual_inf(const LinearSystem& sys, const Solution& x) noexcept {
    double worst = 0.0;
    for (std::size_t r = 0; r < kUnknowns; ++r) {
        complex acc = -sys.rhs[r];
        for (std::size_t k = 0; k < kUnknowns; ++k) acc += sys.matrix[r][k] * x[k];
        worst = std::max(worst, std::abs(acc));
    }
    return worst;
}

inline InternalAmplitudes unpack(const Solution& x) noexcept {
    InternalAmplitudes a;
    a.t_seg = {complex{1.0, 0.0}, x[idx::t1], x[idx::t2], x[idx::t3], x[idx::t]};
    a.r_seg = {x[idx::r], x[idx::r1], x[idx::r2], x[idx::r3], complex{}};
    a.u_a = x[idx::u_a];
    a.u_b = x[idx::u_b];
    return a;
}

inline InternalAmplitudes solve_amplitudes(const Configuration& config, const SystemParams& params,
                                           double delta) {
    return unpack(solve_dense(build_system(config, params, delta)));
}

}  // namespace giantmol::realspace
