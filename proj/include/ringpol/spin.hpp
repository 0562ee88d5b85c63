// Two-component spinor and 2x2 complex matrix utilities: the spin algebra
// shared by every other header (states, density matrices, Bloch vectors).
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace ringpol {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kImag{0.0, 1.0};

// Thrown when a junction resonance (vanishing secular denominator or a
// numerically singular boundary system) makes the scattering problem
// ill-posed. Distinct from std::invalid_argument so callers can map the
// two failure classes to different exit codes.
class resonance_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Spinor
// ---------------------------------------------------------------------------

// Spin state in the S_z basis. Not forced to unit norm: lead amplitudes and
// internal wave-function values reuse the same type.
struct Spinor {
    cplx up{};
    cplx down{};
};

inline Spinor operator+(const Spinor& a, const Spinor& b) { return {a.up + b.up, a.down + b.down}; }
inline Spinor operator-(const Spinor& a, const Spinor& b) { return {a.up - b.up, a.down - b.down}; }
inline Spinor operator*(const cplx& c, const Spinor& s) { return {c * s.up, c * s.down}; }

// <a|b> with the physicist convention: conjugate first argument.
inline cplx vdot(const Spinor& a, const Spinor& b) {
    return std::conj(a.up) * b.up + std::conj(a.down) * b.down;
}

inline double norm2(const Spinor& s) { return std::norm(s.up) + std::norm(s.down); }

inline Spinor normalized(const Spinor& s) {
    const double n = std::sqrt(norm2(s));
    if (n == 0.0) throw std::invalid_argument("cannot normalize a zero spinor");
    return {s.up / n, s.down / n};
}

// ---------------------------------------------------------------------------
// 2x2 complex matrices
// ---------------------------------------------------------------------------

// m[r][c]; row index is the outgoing spin component, column the incoming one.
struct Mat2 {
    cplx m[2][2]{};

    static Mat2 identity() { return {{{1.0, 0.0}, {0.0, 1.0}}}; }
};

inline Mat2 operator*(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r.m[i][j] = a.m[i][0] * b.m[0][j] + a.m[i][1] * b.m[1][j];
    return r;
}

inline Spinor operator*(const Mat2& a, const Spinor& s) {
    return {a.m[0][0] * s.up + a.m[0][1] * s.down,
            a.m[1][0] * s.up + a.m[1][1] * s.down};
}

inline Mat2 adjoint(const Mat2& a) {
    return {{{std::conj(a.m[0][0]), std::conj(a.m[1][0])},
             {std::conj(a.m[0][1]), std::conj(a.m[1][1])}}};
}

inline cplx trace(const Mat2& a) { return a.m[0][0] + a.m[1][1]; }

inline cplx det(const Mat2& a) { return a.m[0][0] * a.m[1][1] - a.m[0][1] * a.m[1][0]; }

// Squared Frobenius norm (root-sum-square of entries, squared).
inline double frob2(const Mat2& a) {
    return std::norm(a.m[0][0]) + std::norm(a.m[0][1]) +
           std::norm(a.m[1][0]) + std::norm(a.m[1][1]);
}

inline Mat2 outer(const Spinor& a, const Spinor& b) {
    return {{{a.up * std::conj(b.up), a.up * std::conj(b.down)},
             {a.down * std::conj(b.up), a.down * std::conj(b.down)}}};
}

inline const Mat2 kSigmaX{{{0.0, 1.0}, {1.0, 0.0}}};
inline const Mat2 kSigmaY{{{0.0, -kImag}, {kImag, 0.0}}};
inline const Mat2 kSigmaZ{{{1.0, 0.0}, {0.0, -1.0}}};

// ---------------------------------------------------------------------------
// Density matrices
// ---------------------------------------------------------------------------

// A density matrix is an ordinary Mat2 expected to be Hermitian and PSD;
// the alias marks intent at call sites.
using DensityMatrix = Mat2;

// Deviation from Hermiticity, scale-free.
inline double hermitian_asymmetry(const Mat2& rho) {
    const double scale = std::max(1.0, std::sqrt(frob2(rho)));
    return (std::abs(rho.m[0][1] - std::conj(rho.m[1][0])) +
            std::abs(rho.m[0][0].imag()) + std::abs(rho.m[1][1].imag())) / scale;
}

struct BlochVector {
    double x{}, y{}, z{};
    double length() const { return std::sqrt(x * x + y * y + z * z); }
};

// Bloch vector of rho / Tr(rho). Requires positive trace.
inline BlochVector bloch_vector(const DensityMatrix& rho) {
    const double tr = trace(rho).real();
    if (tr <= 0.0) throw std::invalid_argument("density matrix must have positive trace");
    return {2.0 * rho.m[0][1].real() / tr,
            -2.0 * rho.m[0][1].imag() / tr,
            (rho.m[0][0].real() - rho.m[1][1].real()) / tr};
}

// Tr(rho_hat^2) of the trace-normalized state; 1/2 for a perfect mixture,
// 1 for a pure state.
inline double purity(const DensityMatrix& rho) {
    const BlochVector s = bloch_vector(rho);
    return 0.5 * (1.0 + s.x * s.x + s.y * s.y + s.z * s.z);
}

struct HermitianEigen {
    double eval_lo{}, eval_hi{};
    Spinor evec_hi{};  // unit eigenvector of the larger eigenvalue
};

// Closed-form eigendecomposition of a Hermitian 2x2 matrix.
inline HermitianEigen eigen_hermitian(const Mat2& a) {
    const double d11 = a.m[0][0].real();
    const double d22 = a.m[1][1].real();
    const cplx off = a.m[0][1];
    const double mid = 0.5 * (d11 + d22);
    const double rad = std::sqrt(0.25 * (d11 - d22) * (d11 - d22) + std::norm(off));
    HermitianEigen e;
    e.eval_lo = mid - rad;
    e.eval_hi = mid + rad;
    if (std::abs(off) > 1e-300 * std::max(1.0, std::abs(mid))) {
        e.evec_hi = normalized({off, cplx(e.eval_hi - d11)});
    } else {
        e.evec_hi = (d11 >= d22) ? Spinor{1.0, 0.0} : Spinor{0.0, 1.0};
    }
    return e;
}

}  // namespace ringpol
