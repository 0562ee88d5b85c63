// Spin-polarizing configurations. A geometry/parameter point polarizes both
// output leads when det(T^(n) T^(n)dag) = 0 for n = 1, 2, which reduces to
// h1 +- h2 = 0 per lead. Two sign patterns are possible; they differ only in
// which ring eigenspinor leaves through which lead, so they are labelled
// case a and case b. This header evaluates the conditions, their equivalent
// trigonometric forms, the one-parameter geometry families that solve them,
// the predicted output spinors and the spin texture along the ring.
#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "ring.hpp"
#include "spin.hpp"
#include "transport.hpp"

namespace ringpol::polar {

enum class PolarizationCase { a, b };

inline std::string to_string(PolarizationCase c) { return c == PolarizationCase::a ? "a" : "b"; }

inline PolarizationCase case_from_string(const std::string& s) {
    if (s == "a" || s == "A") return PolarizationCase::a;
    if (s == "b" || s == "B") return PolarizationCase::b;
    throw std::invalid_argument("polarization case must be 'a' or 'b'");
}

// ---------------------------------------------------------------------------
// Determinant conditions
// ---------------------------------------------------------------------------

// The two complex residuals (h1_1 +- h2_1, h1_2 -+ h2_2) flattened into four
// reals and normalized by the largest h magnitude; machine zero exactly at a
// polarizing point.
inline std::array<double, 4> condition_components(const RingGeometry& geom,
                                                  const DerivedParams& d, PolarizationCase c) {
    const transport::HFunctions h = transport::h_functions(geom, d, d.ka);
    const double sgn = (c == PolarizationCase::a) ? 1.0 : -1.0;
    const cplx r1 = h.h1[0] + sgn * h.h2[0];
    const cplx r2 = h.h1[1] - sgn * h.h2[1];
    double scale = 1e-300;
    for (const cplx& v : {h.h1[0], h.h1[1], h.h2[0], h.h2[1]})
        scale = std::max(scale, std::abs(v));
    return {r1.real() / scale, r1.imag() / scale, r2.real() / scale, r2.imag() / scale};
}

inline double condition_residual(const RingGeometry& geom, const DerivedParams& d,
                                 PolarizationCase c) {
    const auto v = condition_components(geom, d, c);
    return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3]);
}

// Equivalent real trigonometric consistency equations. Each residual is
// normalized by the magnitude of its own largest constituent.
struct TrigResiduals {
    double cos1{}, cos2{};  // spin-independent pair
    double sin1{}, sin2{};  // pair that picks the case
    double max() const {
        return std::max(std::max(cos1, cos2), std::max(sin1, sin2));
    }
};

inline TrigResiduals trig_conditions(const RingGeometry& geom, const DerivedParams& d,
                                     PolarizationCase c) {
    const double q = d.q, w = d.w, ka = d.ka;
    const double g1 = geom.gamma1, g2 = geom.gamma2;
    const double sgn = (c == PolarizationCase::a) ? 1.0 : -1.0;
    const double s1 = std::sin(q * g1);
    const double s2 = std::sin(q * g2);
    const double sb1 = std::sin(q * (2.0 * kPi - g1));
    const double sb2 = std::sin(q * (2.0 * kPi - g2));
    const double s21 = std::sin(q * (g2 - g1));
    const double cw = std::cos(w * kPi), sw = std::sin(w * kPi);

    const auto norm_by = [](double r, double a, double b) {
        return std::abs(r) / std::max({std::abs(a), std::abs(b), 1e-300});
    };
    TrigResiduals t;
    t.cos1 = norm_by(cw * s1 - sb1, cw * s1, sb1);
    t.cos2 = norm_by(cw * sb2 - s2, cw * sb2, s2);
    t.sin1 = norm_by(q * sw * s1 - sgn * ka * sb2 * s21, q * sw * s1, ka * sb2 * s21);
    t.sin2 = norm_by(q * sw * sb2 - sgn * ka * s1 * s21, q * sw * sb2, ka * s1 * s21);
    return t;
}

// ---------------------------------------------------------------------------
// Geometry families
// ---------------------------------------------------------------------------

enum class FamilyAnchor { fixed_gamma2, fixed_gamma1 };

// One-parameter family of candidate polarizing geometries: the free junction
// angle sits at 2*pi - gamma_fixed shifted by an integer number of half ring
// wavelengths pi/q. Returns the full geometry when the constructed angle
// lands strictly inside the valid ordering, otherwise nothing.
inline std::optional<RingGeometry> geometry_family(double gamma_fixed, FamilyAnchor anchor,
                                                   int index, int sign, double q) {
    if (index < 0) throw std::invalid_argument("family index must be >= 0");
    if (sign != 1 && sign != -1) throw std::invalid_argument("family sign must be +1 or -1");
    if (!(q > 0.0)) throw std::invalid_argument("q must be > 0");
    if (!(0.0 < gamma_fixed && gamma_fixed < 2.0 * kPi))
        throw std::invalid_argument("fixed junction angle must lie in (0, 2*pi)");
    const double shifted = 2.0 * kPi - gamma_fixed + sign * index * kPi / q;
    RingGeometry g;
    if (anchor == FamilyAnchor::fixed_gamma2) {
        g.gamma1 = shifted;
        g.gamma2 = gamma_fixed;
    } else {
        g.gamma1 = gamma_fixed;
        g.gamma2 = shifted;
    }
    if (!(0.0 < g.gamma1 && g.gamma1 < g.gamma2 && g.gamma2 < 2.0 * kPi)) return std::nullopt;
    return g;
}

// ---------------------------------------------------------------------------
// Output spinors
// ---------------------------------------------------------------------------

struct OutputSpinors {
    Spinor lead1{};
    Spinor lead2{};
};

// At a polarizing point each output lead emits a single ring eigenspinor
// evaluated at its junction angle; the two cases swap which channel goes
// where.
inline OutputSpinors output_spinors(PolarizationCase c, const RingGeometry& geom, double theta) {
    OutputSpinors out;
    if (c == PolarizationCase::a) {
        out.lead1 = spinor_part(2, theta, geom.gamma1);
        out.lead2 = spinor_part(1, theta, geom.gamma2);
    } else {
        out.lead1 = spinor_part(1, theta, geom.gamma1);
        out.lead2 = spinor_part(2, theta, geom.gamma2);
    }
    return out;
}

// |det(T)|^2 scaled by the squared mean intensity; zero iff T is rank one.
inline double normalized_det(const Mat2& t) {
    const double scale = 0.5 * frob2(t);
    return std::norm(det(t)) / std::max(scale * scale, 1e-300);
}

// Overlap |<evec(T T^dag)|predicted>|^2 between the dominant emitted spinor
// and the predicted eigenspinor; 1 at an exact polarizing point.
inline double output_fidelity(const Mat2& t, const Spinor& predicted) {
    const HermitianEigen e = eigen_hermitian(t * adjoint(t));
    return std::norm(vdot(e.evec_hi, normalized(predicted)));
}

// ---------------------------------------------------------------------------
// Refined polarizing points
// ---------------------------------------------------------------------------

struct PolarizationPoint {
    PolarizationCase case_tag{};
    RingParams params{};
    RingGeometry geom{};
    double residual{};     // condition residual after refinement
    double eta1{}, eta2{};
    double reflect_prob{};
    double ndet1{}, ndet2{};
    double fidelity1{}, fidelity2{};
    OutputSpinors out{};
};

// Fills every derived field of a point from its case/params/geometry.
inline PolarizationPoint evaluate_point(PolarizationCase c, const RingParams& p,
                                        const RingGeometry& geom) {
    const DerivedParams d = derive(p);
    PolarizationPoint pt;
    pt.case_tag = c;
    pt.params = p;
    pt.geom = geom;
    pt.residual = condition_residual(geom, d, c);
    const transport::ScatteringSolution sol = transport::solve_scattering(geom, d);
    pt.eta1 = sol.eta[0];
    pt.eta2 = sol.eta[1];
    pt.reflect_prob = sol.reflect_prob;
    pt.ndet1 = normalized_det(sol.tr.t[0]);
    pt.ndet2 = normalized_det(sol.tr.t[1]);
    pt.out = output_spinors(c, geom, d.theta);
    pt.fidelity1 = output_fidelity(sol.tr.t[0], pt.out.lead1);
    pt.fidelity2 = output_fidelity(sol.tr.t[1], pt.out.lead2);
    return pt;
}

// ---------------------------------------------------------------------------
// Spin texture along the ring
// ---------------------------------------------------------------------------

enum class InputKind { eigen_mixture, sz_mixture, pure_state };

struct InputMode {
    InputKind kind{InputKind::eigen_mixture};
    Spinor state{1.0, 0.0};  // only read for pure_state
};

struct TextureSample {
    double phi{};
    int segment{};
    double prob[2]{};  // weight carried by each ring spin channel
    BlochVector bloch{};
    double purity{};
};

inline int segment_of(const RingGeometry& geom, double phi) {
    if (phi <= geom.gamma1) return 0;
    if (phi <= geom.gamma2) return 1;
    return 2;
}

// Density matrix resolved along the ring: for the mixture modes the input
// is an incoherent 50/50 pair, for pure_state a single spinor. Angles must
// lie inside [0, 2*pi].
inline std::vector<TextureSample> spin_texture(const RingGeometry& geom, const DerivedParams& d,
                                               const InputMode& mode,
                                               const std::vector<double>& angles) {
    validate(geom);
    for (double phi : angles)
        if (!(0.0 <= phi && phi <= 2.0 * kPi))
            throw std::invalid_argument("texture angles must lie in [0, 2*pi]");

    struct WeightedInput {
        double weight;
        Spinor f;
    };
    std::vector<WeightedInput> inputs;
    double channel_mult = 1.0;
    switch (mode.kind) {
        case InputKind::eigen_mixture:
            inputs = {{0.5, spinor_part(1, d.theta, 0.0)}, {0.5, spinor_part(2, d.theta, 0.0)}};
            channel_mult = 2.0;
            break;
        case InputKind::sz_mixture:
            inputs = {{0.5, {1.0, 0.0}}, {0.5, {0.0, 1.0}}};
            channel_mult = 2.0;
            break;
        case InputKind::pure_state:
            inputs = {{1.0, normalized(mode.state)}};
            break;
    }

    std::vector<transport::RingCoefficients> coeffs;
    coeffs.reserve(inputs.size());
    for (const auto& in : inputs)
        coeffs.push_back(transport::ring_coefficients(geom, d, d.ka, in.f));

    std::vector<TextureSample> out;
    out.reserve(angles.size());
    for (double phi : angles) {
        TextureSample s;
        s.phi = phi;
        s.segment = segment_of(geom, phi);
        DensityMatrix rho{};
        for (std::size_t k = 0; k < inputs.size(); ++k) {
            const Spinor psi = transport::segment_wave(coeffs[k], d, s.segment, phi);
            const Mat2 contrib = outer(psi, psi);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    rho.m[i][j] += inputs[k].weight * contrib.m[i][j];
        }
        for (int mu = 1; mu <= 2; ++mu) {
            const Spinor chi = spinor_part(mu, d.theta, phi);
            s.prob[mu - 1] = channel_mult * vdot(chi, rho * chi).real();
        }
        s.bloch = bloch_vector(rho);
        s.purity = purity(rho);
        out.push_back(s);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Interference diagnostics
// ---------------------------------------------------------------------------

// Per-segment current bookkeeping for one input spinor: the four (mu, j)
// sub-channel currents, the per-channel sums, the residual between the sum
// and a direct evaluation of the current expression, and which channel
// currents vanish.
struct SegmentCurrents {
    double pair[3][2][2]{};       // pair[segment][mu-1][j-1]
    double channel[3][2]{};       // channel[segment][mu-1]
    double cross_residual[3][2]{};
    bool vanishing[3][2]{};
};

inline SegmentCurrents interference_diagnostics(const transport::RingCoefficients& rc,
                                                const RingGeometry& geom,
                                                const DerivedParams& d) {
    SegmentCurrents sc;
    const double probes[3] = {0.5 * geom.gamma1, 0.5 * (geom.gamma1 + geom.gamma2),
                              0.5 * (geom.gamma2 + 2.0 * kPi)};
    double scale = 1e-300;
    for (int seg = 0; seg < 3; ++seg)
        for (int mu = 1; mu <= 2; ++mu)
            for (int j = 1; j <= 2; ++j) {
                sc.pair[seg][mu - 1][j - 1] = oracle::pair_current(rc, d, seg, mu, j);
                scale = std::max(scale, std::abs(sc.pair[seg][mu - 1][j - 1]));
            }
    for (int seg = 0; seg < 3; ++seg)
        for (int mu = 1; mu <= 2; ++mu) {
            sc.channel[seg][mu - 1] = oracle::channel_current_formula(rc, d, seg, mu);
            const double direct = oracle::ring_current_channel(rc, d, seg, mu, probes[seg]);
            sc.cross_residual[seg][mu - 1] =
                std::abs(direct - sc.channel[seg][mu - 1]) / std::max(1.0, scale);
            sc.vanishing[seg][mu - 1] =
                std::abs(sc.channel[seg][mu - 1]) < 1e-8 * std::max(1.0, scale);
        }
    return sc;
}

}  // namespace ringpol::polar
