// Dense complex linear solver for the small boundary-condition systems
// (6x6 per spin channel, 12x12 combined). LU with partial pivoting, one
// step of iterative refinement, an infinity-norm residual and a condition
// number estimate. Small fixed sizes make a hand-rolled solver both simpler
// and faster than pulling in a full linear-algebra dependency.
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "spin.hpp"

namespace ringpol {

template <std::size_t N>
using SquareMatrix = std::array<std::array<cplx, N>, N>;

template <std::size_t N>
using ColumnVector = std::array<cplx, N>;

struct SolveReport {
    double residual{};   // ||A x - b||_inf / max(1, ||b||_inf)
    double condition{};  // ||A||_inf * ||A^-1||_inf estimate
};

// Condition numbers above this indicate a numerically singular boundary
// system, i.e. the parameters sit on a junction resonance.
inline constexpr double kResonanceCondition = 1e12;

namespace detail {

template <std::size_t N>
struct LuFactors {
    SquareMatrix<N> lu{};
    std::array<std::size_t, N> perm{};
};

template <std::size_t N>
LuFactors<N> lu_factor(const SquareMatrix<N>& a) {
    LuFactors<N> f;
    f.lu = a;
    for (std::size_t i = 0; i < N; ++i) f.perm[i] = i;
    for (std::size_t k = 0; k < N; ++k) {
        std::size_t piv = k;
        double best = std::abs(f.lu[k][k]);
        for (std::size_t i = k + 1; i < N; ++i) {
            const double v = std::abs(f.lu[i][k]);
            if (v > best) { best = v; piv = i; }
        }
        if (best == 0.0) throw resonance_error("boundary system is exactly singular");
        if (piv != k) {
            std::swap(f.lu[piv], f.lu[k]);
            std::swap(f.perm[piv], f.perm[k]);
        }
        for (std::size_t i = k + 1; i < N; ++i) {
            const cplx m = f.lu[i][k] / f.lu[k][k];
            f.lu[i][k] = m;
            for (std::size_t j = k + 1; j < N; ++j) f.lu[i][j] -= m * f.lu[k][j];
        }
    }
    return f;
}

template <std::size_t N>
ColumnVector<N> lu_apply(const LuFactors<N>& f, const ColumnVector<N>& b) {
    ColumnVector<N> x{};
    for (std::size_t i = 0; i < N; ++i) x[i] = b[f.perm[i]];
    for (std::size_t i = 1; i < N; ++i)
        for (std::size_t j = 0; j < i; ++j) x[i] -= f.lu[i][j] * x[j];
    for (std::size_t i = N; i-- > 0;) {
        for (std::size_t j = i + 1; j < N; ++j) x[i] -= f.lu[i][j] * x[j];
        x[i] /= f.lu[i][i];
    }
    return x;
}

template <std::size_t N>
double inf_norm_rows(const SquareMatrix<N>& a) {
    double best = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < N; ++j) s += std::abs(a[i][j]);
        if (s > best) best = s;
    }
    return best;
}

}  // namespace detail

// Solve A x = b. Throws resonance_error on exact or near singularity.
template <std::size_t N>
ColumnVector<N> solve(const SquareMatrix<N>& a, const ColumnVector<N>& b, SolveReport* report = nullptr) {
    const auto f = detail::lu_factor<N>(a);
    ColumnVector<N> x = detail::lu_apply(f, b);

    // One refinement pass tightens the residual for poorly scaled systems.
    ColumnVector<N> r{};
    for (std::size_t i = 0; i < N; ++i) {
        cplx s = b[i];
        for (std::size_t j = 0; j < N; ++j) s -= a[i][j] * x[j];
        r[i] = s;
    }
    const ColumnVector<N> dx = detail::lu_apply(f, r);
    for (std::size_t i = 0; i < N; ++i) x[i] += dx[i];

    double bnorm = 0.0, rnorm = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        cplx s = b[i];
        for (std::size_t j = 0; j < N; ++j) s -= a[i][j] * x[j];
        rnorm = std::max(rnorm, std::abs(s));
        bnorm = std::max(bnorm, std::abs(b[i]));
    }

    // Condition estimate from explicit inverse columns; N is small enough
    // that the extra N solves are negligible.
    double inv_col_sums[N] = {};
    for (std::size_t j = 0; j < N; ++j) {
        ColumnVector<N> e{};
        e[j] = 1.0;
        const ColumnVector<N> col = detail::lu_apply(f, e);
        for (std::size_t i = 0; i < N; ++i) inv_col_sums[i] += std::abs(col[i]);
    }
    double inv_norm = 0.0;
    for (std::size_t i = 0; i < N; ++i) inv_norm = std::max(inv_norm, inv_col_sums[i]);
    const double cond = detail::inf_norm_rows(a) * inv_norm;

    if (report) {
        report->residual = rnorm / std::max(1.0, bnorm);
        report->condition = cond;
    }
    if (cond > kResonanceCondition)
        throw resonance_error("boundary system is numerically singular (junction resonance)");
    return x;
}

}  // namespace ringpol
