// Independent cross-check of the closed forms: assemble the junction
// boundary conditions (wavefunction continuity plus Griffith current
// conservation at all three junctions) as one 12x12 linear system and solve
// it numerically. No scattering formula enters the assembly, so agreement
// with transport.hpp validates both paths.
//
// Also home to the probability currents: lead currents, exact ring currents
// of the full spinor wave, and the per-channel closed forms.
#pragma once

#include <cmath>

#include "linsolve.hpp"
#include "ring.hpp"
#include "spin.hpp"
#include "transport.hpp"

namespace ringpol::oracle {

// Column order: segment-major, then spin channel, then j. The two spin
// channels never mix, so the matrix is block diagonal; keeping one system
// preserves that structure for tests to assert.
inline std::size_t column_index(int segment, int mu, int j) {
    return static_cast<std::size_t>(segment * 4 + (mu - 1) * 2 + (j - 1));
}

struct JunctionSystem {
    SquareMatrix<12> matrix{};
    ColumnVector<12> rhs{};
    RingGeometry geom{};
    DerivedParams d{};
    Spinor f{};
};

inline JunctionSystem assemble(const RingGeometry& geom, const DerivedParams& d, const Spinor& f) {
    validate(geom);
    JunctionSystem sys;
    sys.geom = geom;
    sys.d = d;
    sys.f = f;
    const double ka = d.ka;
    const double g1 = geom.gamma1, g2 = geom.gamma2;
    const auto E = [](double k, double phi) { return std::exp(kImag * (k * phi)); };

    for (int mu = 1; mu <= 2; ++mu) {
        const double k1 = d.kappa[mu - 1][0];
        const double k2 = d.kappa[mu - 1][1];
        const cplx fmu = vdot(spinor_part(mu, d.theta, 0.0), f);
        const std::size_t r0 = static_cast<std::size_t>((mu - 1) * 6);
        const std::size_t cI1 = column_index(0, mu, 1), cI2 = column_index(0, mu, 2);
        const std::size_t cII1 = column_index(1, mu, 1), cII2 = column_index(1, mu, 2);
        const std::size_t cIII1 = column_index(2, mu, 1), cIII2 = column_index(2, mu, 2);
        auto& A = sys.matrix;

        // Input junction, phi = 0 vs 2*pi. The spinor part is antiperiodic,
        // which flips the sign of every segment-III contribution.
        A[r0 + 0][cI1] = 1.0;
        A[r0 + 0][cI2] = 1.0;
        A[r0 + 0][cIII1] = E(k1, 2.0 * kPi);
        A[r0 + 0][cIII2] = E(k2, 2.0 * kPi);

        A[r0 + 1][cI1] = kImag * (k1 + ka);
        A[r0 + 1][cI2] = kImag * (k2 + ka);
        A[r0 + 1][cIII1] = kImag * k1 * E(k1, 2.0 * kPi);
        A[r0 + 1][cIII2] = kImag * k2 * E(k2, 2.0 * kPi);
        sys.rhs[r0 + 1] = 2.0 * kImag * ka * fmu;

        // Output junction 1 at gamma1.
        A[r0 + 2][cI1] = E(k1, g1);
        A[r0 + 2][cI2] = E(k2, g1);
        A[r0 + 2][cII1] = -E(k1, g1);
        A[r0 + 2][cII2] = -E(k2, g1);

        A[r0 + 3][cI1] = kImag * (ka - k1) * E(k1, g1);
        A[r0 + 3][cI2] = kImag * (ka - k2) * E(k2, g1);
        A[r0 + 3][cII1] = kImag * k1 * E(k1, g1);
        A[r0 + 3][cII2] = kImag * k2 * E(k2, g1);

        // Output junction 2 at gamma2.
        A[r0 + 4][cII1] = E(k1, g2);
        A[r0 + 4][cII2] = E(k2, g2);
        A[r0 + 4][cIII1] = -E(k1, g2);
        A[r0 + 4][cIII2] = -E(k2, g2);

        A[r0 + 5][cII1] = kImag * (ka - k1) * E(k1, g2);
        A[r0 + 5][cII2] = kImag * (ka - k2) * E(k2, g2);
        A[r0 + 5][cIII1] = kImag * k1 * E(k1, g2);
        A[r0 + 5][cIII2] = kImag * k2 * E(k2, g2);
    }
    return sys;
}

struct OracleSolution {
    transport::RingCoefficients coeffs{};
    Spinor r{};   // reflected amplitude on the input lead
    Spinor t1{};  // outgoing amplitude at gamma1
    Spinor t2{};  // outgoing amplitude at gamma2
    SolveReport report{};
};

inline OracleSolution solve(const JunctionSystem& sys) {
    OracleSolution sol;
    const ColumnVector<12> x = ringpol::solve<12>(sys.matrix, sys.rhs, &sol.report);
    for (int seg = 0; seg < 3; ++seg)
        for (int mu = 1; mu <= 2; ++mu)
            for (int j = 1; j <= 2; ++j)
                sol.coeffs.a[seg][mu - 1][j - 1] = x[column_index(seg, mu, j)];
    sol.r = transport::segment_wave(sol.coeffs, sys.d, 0, 0.0) - sys.f;
    sol.t1 = transport::segment_wave(sol.coeffs, sys.d, 1, sys.geom.gamma1);
    sol.t2 = transport::segment_wave(sol.coeffs, sys.d, 1, sys.geom.gamma2);
    return sol;
}

// ---------------------------------------------------------------------------
// Probability currents
// ---------------------------------------------------------------------------

// Net lead current from counter-propagating amplitudes, in units where a
// plane wave of unit amplitude carries 2*ka. Cross terms average out along
// the lead, leaving the difference of the two intensities.
inline double lead_current(const Spinor& psi_in, const Spinor& psi_out, double ka) {
    return 2.0 * ka * (norm2(psi_in) - norm2(psi_out));
}

// Exact ring current of the full wave at angle phi on a segment:
// J = 2 Re[ Psi^dag ( (so/2) sigma_r Psi - i dPsi/dphi ) ] with sigma_r the
// radial Pauli matrix. Includes every cross-channel term.
inline double ring_current(const transport::RingCoefficients& rc, const DerivedParams& d,
                           int segment, double phi) {
    const Spinor psi = transport::segment_wave(rc, d, segment, phi);
    const Spinor dpsi = transport::channel_wave_derivative(rc, d, segment, 1, phi) +
                        transport::channel_wave_derivative(rc, d, segment, 2, phi);
    const cplx er = std::exp(kImag * phi);
    const Spinor sigma_r_psi{std::conj(er) * psi.down, er * psi.up};
    const cplx val = vdot(psi, Spinor{0.5 * d.so_ratio * sigma_r_psi.up - kImag * dpsi.up,
                                      0.5 * d.so_ratio * sigma_r_psi.down - kImag * dpsi.down});
    return 2.0 * val.real();
}

// Same expression restricted to one spin channel. Independent of phi.
inline double ring_current_channel(const transport::RingCoefficients& rc, const DerivedParams& d,
                                   int segment, int mu, double phi) {
    const Spinor psi = transport::channel_wave(rc, d, segment, mu, phi);
    const Spinor dpsi = transport::channel_wave_derivative(rc, d, segment, mu, phi);
    const cplx er = std::exp(kImag * phi);
    const Spinor sigma_r_psi{std::conj(er) * psi.down, er * psi.up};
    const cplx val = vdot(psi, Spinor{0.5 * d.so_ratio * sigma_r_psi.up - kImag * dpsi.up,
                                      0.5 * d.so_ratio * sigma_r_psi.down - kImag * dpsi.down});
    return 2.0 * val.real();
}

// Closed form for one (mu, j) sub-channel: J = (-1)^(mu+j+1) 2q |a|^2.
// The two j components of a channel always carry opposite signs.
inline double pair_current(const transport::RingCoefficients& rc, const DerivedParams& d,
                           int segment, int mu, int j) {
    const double sign = ((mu + j) % 2 == 0) ? -1.0 : 1.0;  // (-1)^(mu+j+1)
    return sign * 2.0 * d.q * std::norm(rc.a[segment][mu - 1][j - 1]);
}

// Channel current as the sum of its two sub-channel currents,
// 2q (-1)^mu (|a_1|^2 - |a_2|^2); equals ring_current_channel at any phi.
inline double channel_current_formula(const transport::RingCoefficients& rc,
                                      const DerivedParams& d, int segment, int mu) {
    return pair_current(rc, d, segment, mu, 1) + pair_current(rc, d, segment, mu, 2);
}

// Current-conservation residuals at the three junctions, scaled to the
// incident current.
struct JunctionBalance {
    double input{};    // lead 3 vs segments I and III
    double output1{};  // segments I and II vs lead 1
    double output2{};  // segments II and III vs lead 2
    double max() const { return std::max(input, std::max(output1, output2)); }
};

inline JunctionBalance junction_balance(const JunctionSystem& sys, const OracleSolution& sol) {
    const double ka = sys.d.ka;
    const double scale = std::max(1.0, 2.0 * ka * norm2(sys.f));
    JunctionBalance jb;
    const double j_in = lead_current(sys.f, sol.r, ka);
    jb.input = std::abs(j_in - ring_current(sol.coeffs, sys.d, 0, 0.0) +
                        ring_current(sol.coeffs, sys.d, 2, 2.0 * kPi)) / scale;
    jb.output1 = std::abs(ring_current(sol.coeffs, sys.d, 0, sys.geom.gamma1) -
                          ring_current(sol.coeffs, sys.d, 1, sys.geom.gamma1) -
                          2.0 * ka * norm2(sol.t1)) / scale;
    jb.output2 = std::abs(ring_current(sol.coeffs, sys.d, 1, sys.geom.gamma2) -
                          ring_current(sol.coeffs, sys.d, 2, sys.geom.gamma2) -
                          2.0 * ka * norm2(sol.t2)) / scale;
    return jb;
}

}  // namespace ringpol::oracle
