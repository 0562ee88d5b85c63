// Closed-form scattering of the three-terminal ring: the secular function y,
// the h building blocks, the two 2x2 transmission matrices, the (diagonal)
// reflection matrix and the eight internal ring amplitudes per spin channel.
//
// Conventions: output lead n = 1 sits at gamma1, n = 2 at gamma2. Spin
// matrices act in the S_z basis of the leads. Lead states carry momentum
// factor e^{+-i k x} with x growing away from the ring; the incident state
// arrives on the input lead with amplitude spinor f.
#pragma once

#include <cmath>

#include "ring.hpp"
#include "spin.hpp"

namespace ringpol::transport {

// ---------------------------------------------------------------------------
// Secular and numerator functions
// ---------------------------------------------------------------------------

struct HFunctions {
    cplx h1[2]{};  // h1[n-1], numerator part shared by the diagonal entries
    cplx h2[2]{};  // h2[n-1], numerator part odd under the case swap
    cplx y{};      // secular denominator of every scattering amplitude
};

// y vanishes only at junction resonances. The guard scale is the largest
// individual term of y, so the test is meaningful for any parameter size.
inline bool below_resonance_floor(const cplx& y, double largest_term) {
    return std::abs(y) < 1e-300 * std::max(1.0, largest_term);
}

inline HFunctions h_functions(const RingGeometry& geom, const DerivedParams& d, double ka) {
    const double q = d.q, w = d.w;
    const double g1 = geom.gamma1, g2 = geom.gamma2;
    const double s1 = std::sin(q * g1);
    const double s2 = std::sin(q * g2);
    const double sb1 = std::sin(q * (2.0 * kPi - g1));
    const double sb2 = std::sin(q * (2.0 * kPi - g2));
    const double s21 = std::sin(q * (g2 - g1));
    const cplx ewpi = std::exp(-kImag * (w * kPi));

    HFunctions h;
    h.h1[0] = -ka * std::exp(kImag * (0.5 * w * g1)) * sb2 * s21;
    h.h1[1] = ka * std::exp(kImag * (0.5 * w * g2)) * ewpi * s1 * s21;
    h.h2[0] = kImag * q * std::exp(kImag * (0.5 * w * g1)) * (ewpi * s1 - sb1);
    h.h2[1] = kImag * q * std::exp(kImag * (0.5 * w * g2)) * (ewpi * s2 - sb2);

    const double ka2 = ka * ka, ka3 = ka2 * ka;
    const cplx t1 = kImag * ka3 *
                    (std::sin(2.0 * q * (kPi - g2 + g1)) + std::sin(2.0 * q * (kPi - g1)) -
                     std::sin(2.0 * q * (kPi - g2)) - std::sin(2.0 * q * kPi));
    const cplx t2 = -2.0 * q * ka2 *
                    (std::cos(2.0 * q * (kPi - g2 + g1)) + std::cos(2.0 * q * (kPi - g1)) +
                     std::cos(2.0 * q * (kPi - g2)) - std::cos(2.0 * q * kPi));
    const cplx t3 = 4.0 * q * ka2 * std::cos(2.0 * q * kPi);
    const cplx t4 = -12.0 * kImag * q * q * ka * std::sin(2.0 * q * kPi);
    const cplx t5 = 8.0 * q * q * q * (std::cos(w * kPi) + std::cos(2.0 * q * kPi));
    h.y = t1 + t2 + t3 + t4 + t5;

    double largest = 0.0;
    for (const cplx& t : {t1, t2, t3, t4, t5}) largest = std::max(largest, std::abs(t));
    if (below_resonance_floor(h.y, largest))
        throw resonance_error("secular denominator vanishes (junction resonance)");
    return h;
}

// ---------------------------------------------------------------------------
// Scattering matrices
// ---------------------------------------------------------------------------

struct Transmission {
    Mat2 t[2]{};    // t[n-1]: outgoing spinor at lead n = T^(n) * f
    cplx r_diag{};  // the reflection matrix is r_diag * identity
};

inline Transmission transmission(const RingGeometry& geom, const DerivedParams& d, double ka) {
    const HFunctions h = h_functions(geom, d, ka);
    const double q = d.q;
    const double c = std::cos(0.5 * d.theta);
    const double s = std::sin(0.5 * d.theta);
    const cplx pre = 8.0 * q * ka / h.y;

    Transmission tr;
    const double gs[2] = {geom.gamma1, geom.gamma2};
    for (int n = 0; n < 2; ++n) {
        const cplx p = h.h1[n] + h.h2[n];
        const cplx qq = std::conj(h.h1[n] - h.h2[n]);
        const cplx em = std::exp(-kImag * (0.5 * gs[n]));
        const cplx ep = std::exp(kImag * (0.5 * gs[n]));
        Mat2& t = tr.t[n];
        t.m[0][0] = pre * em * (c * c * p + s * s * qq);
        t.m[0][1] = pre * em * (s * c) * (p - qq);
        t.m[1][0] = std::exp(kImag * gs[n]) * t.m[0][1];
        t.m[1][1] = pre * ep * (s * s * p + c * c * qq);
    }

    const double g1 = geom.gamma1, g2 = geom.gamma2;
    const double s1 = std::sin(q * g1), s2 = std::sin(q * g2);
    const double sb1 = std::sin(q * (2.0 * kPi - g1)), sb2 = std::sin(q * (2.0 * kPi - g2));
    tr.r_diag = (8.0 * ka / h.y) *
                    (-kImag * q * q * std::sin(2.0 * q * kPi) +
                     kImag * ka * ka * std::sin(q * (g2 - g1)) * sb2 * s1 -
                     q * ka * (sb1 * s1 + sb2 * s2)) -
                1.0;
    return tr;
}

// ---------------------------------------------------------------------------
// Internal ring amplitudes
// ---------------------------------------------------------------------------

// a[segment][mu-1][j-1]; segment 0 spans (0, gamma1), 1 spans (gamma1,
// gamma2), 2 spans (gamma2, 2*pi).
struct RingCoefficients {
    cplx a[3][2][2]{};
};

inline RingCoefficients ring_coefficients(const RingGeometry& geom, const DerivedParams& d,
                                          double ka, const Spinor& f) {
    const HFunctions h = h_functions(geom, d, ka);
    const double q = d.q, w = d.w;
    const double g1 = geom.gamma1, g2 = geom.gamma2;
    const double c = std::cos(0.5 * d.theta);
    const double s = std::sin(0.5 * d.theta);
    const cplx dvec[2] = {2.0 * ka * (c * f.up + s * f.down),
                          2.0 * ka * (s * f.up - c * f.down)};
    const double s1 = std::sin(q * g1);
    const double sb1 = std::sin(q * (2.0 * kPi - g1)), sb2 = std::sin(q * (2.0 * kPi - g2));
    const double s21 = std::sin(q * (g2 - g1));

    RingCoefficients rc;
    for (int mu = 1; mu <= 2; ++mu) {
        const cplx dmu = dvec[mu - 1];
        const cplx ew = std::exp(kImag * (((mu == 1) ? -1.0 : 1.0) * w * kPi));
        for (int j = 1; j <= 2; ++j) {
            const double sg = ((mu + j) % 2 == 0) ? 1.0 : -1.0;  // (-1)^(mu+j)
            const cplx eg1 = std::exp(kImag * (sg * q * g1));
            const cplx eg2 = std::exp(kImag * (sg * q * g2));
            const cplx e2p = std::exp(kImag * (sg * q * 2.0 * kPi));
            rc.a[0][mu - 1][j - 1] =
                (2.0 * dmu / h.y) * sg *
                (ka * ka * eg1 * s21 * sb2 + kImag * q * ka * (eg1 * sb1 + eg2 * sb2) -
                 q * q * (ew + e2p));
            rc.a[1][mu - 1][j - 1] =
                (2.0 * q * dmu / h.y) * sg *
                (-q * (ew + e2p) + kImag * ka * (eg1 * ew * s1 + eg2 * sb2));
        }
        // Segment III couples the two II amplitudes of the same spin channel.
        for (int j = 1; j <= 2; ++j) {
            const double sg = ((mu + j) % 2 == 0) ? 1.0 : -1.0;
            const cplx aII = rc.a[1][mu - 1][j - 1];
            const cplx aII_other = rc.a[1][mu - 1][2 - j];
            rc.a[2][mu - 1][j - 1] =
                ((2.0 * q + sg * ka) * aII +
                 sg * ka * std::exp(kImag * (2.0 * sg * q * g2)) * aII_other) /
                (2.0 * q);
        }
    }
    return rc;
}

// ---------------------------------------------------------------------------
// Wavefunction evaluation on the ring
// ---------------------------------------------------------------------------

// Scalar sum N_i^mu(phi) = sum_j a[i][mu][j] e^{i kappa_j^mu phi}. Its zeros
// mark angles where channel mu carries a pure eigenstate of the other
// channel, so this quantity drives the polarization diagnostics.
inline cplx channel_sum(const RingCoefficients& rc, const DerivedParams& d, int segment, int mu,
                        double phi) {
    if (segment < 0 || segment > 2) throw std::invalid_argument("segment must be 0, 1 or 2");
    if (mu != 1 && mu != 2) throw std::invalid_argument("spin channel must be 1 or 2");
    cplx n = 0.0;
    for (int j = 1; j <= 2; ++j)
        n += rc.a[segment][mu - 1][j - 1] * std::exp(kImag * (d.kappa[mu - 1][j - 1] * phi));
    return n;
}

// Psi restricted to spin channel mu on a segment.
inline Spinor channel_wave(const RingCoefficients& rc, const DerivedParams& d, int segment,
                           int mu, double phi) {
    return channel_sum(rc, d, segment, mu, phi) * spinor_part(mu, d.theta, phi);
}

// Full two-channel wavefunction on a segment.
inline Spinor segment_wave(const RingCoefficients& rc, const DerivedParams& d, int segment,
                           double phi) {
    return channel_wave(rc, d, segment, 1, phi) + channel_wave(rc, d, segment, 2, phi);
}

// d/dphi of the restricted wavefunction, evaluated analytically.
inline Spinor channel_wave_derivative(const RingCoefficients& rc, const DerivedParams& d,
                                      int segment, int mu, double phi) {
    Spinor dpsi{};
    const Spinor chi = spinor_part(mu, d.theta, phi);
    const Spinor dchi = spinor_part_derivative(mu, d.theta, phi);
    for (int j = 1; j <= 2; ++j) {
        const double kap = d.kappa[mu - 1][j - 1];
        const cplx amp = rc.a[segment][mu - 1][j - 1] * std::exp(kImag * (kap * phi));
        dpsi = dpsi + amp * Spinor{kImag * kap * chi.up + dchi.up,
                                   kImag * kap * chi.down + dchi.down};
    }
    return dpsi;
}

// ---------------------------------------------------------------------------
// Probabilities and density-matrix propagation
// ---------------------------------------------------------------------------

struct ScatteringSolution {
    Transmission tr{};
    double eta[2]{};               // transmission probability per output lead,
                                   // averaged over an unpolarized input
    double reflect_prob{};         // |r_diag|^2
    double conservation_residual{};
};

inline ScatteringSolution solve_scattering(const RingGeometry& geom, const DerivedParams& d) {
    validate(geom);
    ScatteringSolution sol;
    sol.tr = transmission(geom, d, d.ka);
    for (int n = 0; n < 2; ++n) sol.eta[n] = 0.5 * frob2(sol.tr.t[n]);
    sol.reflect_prob = std::norm(sol.tr.r_diag);
    sol.conservation_residual =
        std::abs(sol.eta[0] + sol.eta[1] + sol.reflect_prob - 1.0);
    return sol;
}

// rho_out = T rho_in T^dagger. The input must be Hermitian; PSD and
// trace <= 1 are the caller's responsibility.
inline DensityMatrix propagate_density(const Mat2& t, const DensityMatrix& rho_in) {
    if (hermitian_asymmetry(rho_in) > 1e-10)
        throw std::invalid_argument("input density matrix is not Hermitian");
    return t * rho_in * adjoint(t);
}

}  // namespace ringpol::transport
