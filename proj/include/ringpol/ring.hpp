// Core model of a one-dimensional ballistic ring with Rashba spin-orbit
// coupling and three attached leads.
//
// Everything downstream works with two dimensionless knobs:
//   so_ratio = omega/Omega  (Rashba frequency over the kinetic scale hbar/(2 m a^2))
//   ka                      (wavenumber of the incident electron times ring radius)
// plus the two junction angles gamma1 < gamma2 measured from the input lead.
//
// derive() turns the knobs into the quantities every formula needs: the
// effective frequency ratio w, the ring wavenumber parameter q, the
// spinor tilt angle theta, the two Aharonov-Casher phases and the four
// propagation constants kappa[mu][j].
#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "spin.hpp"

namespace ringpol {

// CODATA 2018 values, SI.
inline constexpr double kHbar = 1.054571817e-34;
inline constexpr double kElementaryCharge = 1.602176634e-19;
inline constexpr double kElectronMass = 9.1093837015e-31;
inline constexpr double kSpeedOfLight = 2.99792458e8;

// ---------------------------------------------------------------------------
// Input structs
// ---------------------------------------------------------------------------

struct RingParams {
    double so_ratio{};  // omega/Omega, >= 0
    double ka{};        // > 0
};

inline void validate(const RingParams& p) {
    if (!(p.so_ratio >= 0.0) || !std::isfinite(p.so_ratio))
        throw std::invalid_argument("so_ratio must be finite and >= 0");
    if (!(p.ka > 0.0) || !std::isfinite(p.ka))
        throw std::invalid_argument("ka must be finite and > 0");
}

// Junction angles. The input lead sits at angle 0 == 2*pi; the two output
// leads at gamma1 and gamma2, strictly ordered and strictly inside (0, 2*pi).
struct RingGeometry {
    double gamma1{};
    double gamma2{};
};

inline void validate(const RingGeometry& g) {
    if (!std::isfinite(g.gamma1) || !std::isfinite(g.gamma2))
        throw std::invalid_argument("junction angles must be finite");
    if (!(0.0 < g.gamma1 && g.gamma1 < g.gamma2 && g.gamma2 < 2.0 * kPi))
        throw std::invalid_argument("junction angles must satisfy 0 < gamma1 < gamma2 < 2*pi");
}

// Physical ring for converting between SI quantities and the two knobs.
struct PhysicalContext {
    double ring_radius{};      // a, meters
    double effective_mass{};   // kg
    double electric_field{};   // E_z, V/m (perpendicular confinement field)
};

inline void validate(const PhysicalContext& c) {
    if (!(c.ring_radius > 0.0)) throw std::invalid_argument("ring radius must be > 0");
    if (!(c.effective_mass > 0.0)) throw std::invalid_argument("effective mass must be > 0");
    if (!(c.electric_field >= 0.0)) throw std::invalid_argument("electric field must be >= 0");
}

// ---------------------------------------------------------------------------
// Derived quantities
// ---------------------------------------------------------------------------

struct DerivedParams {
    double so_ratio{};
    double ka{};
    double w{};            // sqrt(1 + so_ratio^2)
    double q{};            // sqrt((so_ratio/2)^2 + ka^2)
    double theta{};        // spinor tilt, in (-pi/2, 0]
    double ac_phase[2]{};  // Aharonov-Casher phase per spin channel mu = 1, 2
    double kappa[2][2]{};  // kappa[mu-1][j-1], propagation constants
};

inline DerivedParams derive(const RingParams& p) {
    validate(p);
    DerivedParams d;
    d.so_ratio = p.so_ratio;
    d.ka = p.ka;
    d.w = std::sqrt(1.0 + p.so_ratio * p.so_ratio);
    d.q = std::sqrt(0.25 * p.so_ratio * p.so_ratio + p.ka * p.ka);
    d.theta = -std::atan(p.so_ratio);
    for (int mu = 1; mu <= 2; ++mu) {
        const double s = (mu == 1) ? -1.0 : 1.0;  // (-1)^mu
        d.ac_phase[mu - 1] = -kPi * (1.0 + s * d.w);
        for (int j = 1; j <= 2; ++j) {
            const double sj = (j == 1) ? -1.0 : 1.0;  // (-1)^j
            d.kappa[mu - 1][j - 1] = -s * (0.5 * d.w + sj * d.q);
        }
    }
    return d;
}

// ---------------------------------------------------------------------------
// Ring eigenstates
// ---------------------------------------------------------------------------

// Position-dependent spinor part of the ring eigenstates. mu = 1 rides the
// local spin-up direction of the tilted field, mu = 2 the spin-down one;
// both are antiperiodic: chi(phi + 2*pi) = -chi(phi).
inline Spinor spinor_part(int mu, double theta, double phi) {
    if (mu != 1 && mu != 2) throw std::invalid_argument("spin channel must be 1 or 2");
    const cplx em = std::exp(-kImag * (0.5 * phi));
    const cplx ep = std::exp(kImag * (0.5 * phi));
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    if (mu == 1) return {em * c, ep * s};
    return {em * s, -(ep * c)};
}

// Full ring eigenfunction value e^{i kappa phi} chi^mu(phi) for one of the
// four (mu, j) channels.
inline Spinor eigenstate(const DerivedParams& d, int mu, int j, double phi) {
    if (j != 1 && j != 2) throw std::invalid_argument("channel index j must be 1 or 2");
    const cplx ph = std::exp(kImag * (d.kappa[mu - 1][j - 1] * phi));
    return ph * spinor_part(mu, d.theta, phi);
}

// d/dphi of the spinor part; used for exact ring currents.
inline Spinor spinor_part_derivative(int mu, double theta, double phi) {
    const Spinor chi = spinor_part(mu, theta, phi);
    return {-kImag * 0.5 * chi.up, kImag * 0.5 * chi.down};
}

// ---------------------------------------------------------------------------
// SI conversions
// ---------------------------------------------------------------------------

// Kinetic energy scale hbar * Omega = hbar^2 / (2 m a^2), joules.
inline double kinetic_scale(const PhysicalContext& c) {
    validate(c);
    return kHbar * kHbar / (2.0 * c.effective_mass * c.ring_radius * c.ring_radius);
}

// Map a physical ring plus incident energy (joules) to the dimensionless
// knobs: ka = sqrt(E / (hbar Omega)), so_ratio = e E_z a / (m c^2).
inline RingParams dimensionless_from_physical(const PhysicalContext& c, double energy) {
    validate(c);
    if (!(energy > 0.0)) throw std::invalid_argument("incident energy must be > 0");
    RingParams p;
    p.ka = std::sqrt(energy / kinetic_scale(c));
    p.so_ratio = kElementaryCharge * c.electric_field * c.ring_radius /
                 (c.effective_mass * kSpeedOfLight * kSpeedOfLight);
    return p;
}

// Inverse of the energy half of the map above.
inline double energy_from_ka(const PhysicalContext& c, double ka) {
    if (!(ka > 0.0)) throw std::invalid_argument("ka must be > 0");
    return kinetic_scale(c) * ka * ka;
}

}  // namespace ringpol
