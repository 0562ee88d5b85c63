#include <catch2/catch_amalgamated.hpp>

#include <ringpol/random.hpp>
#include <ringpol/ring.hpp>

using namespace ringpol;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("derive at zero spin-orbit strength") {
    const DerivedParams d = derive({0.0, 1.0});
    CHECK(d.w == 1.0);
    CHECK(d.q == 1.0);
    CHECK(d.theta == 0.0);
    CHECK_THAT(d.ac_phase[0], WithinAbs(0.0, 0.0));
    CHECK_THAT(d.ac_phase[1], WithinAbs(-2.0 * kPi, 1e-15));
    CHECK_THAT(d.kappa[0][0], WithinAbs(-0.5, 0.0));
    CHECK_THAT(d.kappa[0][1], WithinAbs(1.5, 0.0));
    CHECK_THAT(d.kappa[1][0], WithinAbs(0.5, 0.0));
    CHECK_THAT(d.kappa[1][1], WithinAbs(-1.5, 0.0));
}

TEST_CASE("derive regression values") {
    const DerivedParams d = derive({2.27, 10.0});
    CHECK_THAT(d.w, WithinRel(2.48050398104901, 1e-12));
    CHECK_THAT(d.q, WithinRel(10.0642051350318, 1e-12));
    CHECK_THAT(d.theta, WithinRel(-1.15584664781101, 1e-12));
}

TEST_CASE("propagation constant identities") {
    DeterministicRng rng(11);
    for (int i = 0; i < 50; ++i) {
        const DerivedParams d = derive({rng.uniform(0.0, 5.0), rng.uniform(0.2, 12.0)});
        CHECK_THAT(d.kappa[0][0] + d.kappa[0][1], WithinAbs(d.w, 1e-12));
        CHECK_THAT(d.kappa[1][0] + d.kappa[1][1], WithinAbs(-d.w, 1e-12));
        CHECK_THAT(d.kappa[0][1] - d.kappa[0][0], WithinAbs(2.0 * d.q, 1e-12));
        CHECK_THAT(d.kappa[1][0] - d.kappa[1][1], WithinAbs(2.0 * d.q, 1e-12));
        CHECK_THAT(d.ac_phase[0] + d.ac_phase[1], WithinAbs(-2.0 * kPi, 1e-12));
        // both spin channels acquire the same phase factor up to conjugation
        CHECK_THAT(std::cos(d.ac_phase[0]) - std::cos(d.ac_phase[1]), WithinAbs(0.0, 1e-12));
        CHECK_THAT(std::cos(d.ac_phase[0]) + std::cos(d.w * kPi), WithinAbs(0.0, 1e-12));
        CHECK_THAT(std::sin(d.ac_phase[0]) + std::sin(d.w * kPi), WithinAbs(0.0, 1e-12));
        CHECK_THAT(std::sin(d.ac_phase[1]) - std::sin(d.w * kPi), WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("spinor tilt identity") {
    DeterministicRng rng(12);
    for (int i = 0; i < 100; ++i) {
        const double so = rng.uniform(1e-3, 10.0);
        const DerivedParams d = derive({so, 1.0});
        CHECK_THAT(so * std::tan(0.5 * d.theta), WithinAbs(1.0 - d.w, 1e-12));
    }
}

TEST_CASE("derive rejects bad parameters") {
    CHECK_THROWS_AS(derive({-0.1, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(derive({1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(derive({1.0, -2.0}), std::invalid_argument);
    CHECK_THROWS_AS(derive({std::nan(""), 1.0}), std::invalid_argument);
}

TEST_CASE("geometry validation") {
    CHECK_NOTHROW(validate(RingGeometry{1.0, 2.0}));
    CHECK_THROWS_AS(validate(RingGeometry{0.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(RingGeometry{2.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(RingGeometry{2.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(RingGeometry{1.0, 2.0 * kPi}), std::invalid_argument);
}

TEST_CASE("ring eigenspinors") {
    const DerivedParams d = derive({2.27, 10.0});
    DeterministicRng rng(13);
    for (int i = 0; i < 30; ++i) {
        const double phi = rng.uniform(0.0, 2.0 * kPi);
        const Spinor c1 = spinor_part(1, d.theta, phi);
        const Spinor c2 = spinor_part(2, d.theta, phi);
        CHECK_THAT(norm2(c1), WithinAbs(1.0, 1e-14));
        CHECK_THAT(norm2(c2), WithinAbs(1.0, 1e-14));
        CHECK_THAT(std::abs(vdot(c1, c2)), WithinAbs(0.0, 1e-14));

        // antiperiodicity
        const Spinor c1w = spinor_part(1, d.theta, phi + 2.0 * kPi);
        CHECK_THAT(std::abs(c1w.up + c1.up), WithinAbs(0.0, 1e-14));
        CHECK_THAT(std::abs(c1w.down + c1.down), WithinAbs(0.0, 1e-14));

        // analytic derivative against a central difference
        const double h = 1e-6;
        const Spinor dnum = (1.0 / (2.0 * h)) * (spinor_part(1, d.theta, phi + h) -
                                                 spinor_part(1, d.theta, phi - h));
        const Spinor dana = spinor_part_derivative(1, d.theta, phi);
        CHECK_THAT(std::abs(dnum.up - dana.up), WithinAbs(0.0, 1e-9));
        CHECK_THAT(std::abs(dnum.down - dana.down), WithinAbs(0.0, 1e-9));
    }
    CHECK_THROWS_AS(spinor_part(3, d.theta, 0.0), std::invalid_argument);
}

TEST_CASE("eigenstate carries the propagation phase") {
    const DerivedParams d = derive({1.3, 4.2});
    const double phi = 0.77;
    const Spinor s = eigenstate(d, 2, 1, phi);
    const Spinor expect = std::exp(kImag * (d.kappa[1][0] * phi)) * spinor_part(2, d.theta, phi);
    CHECK_THAT(std::abs(s.up - expect.up), WithinAbs(0.0, 0.0));
    CHECK_THAT(std::abs(s.down - expect.down), WithinAbs(0.0, 0.0));
    CHECK_THROWS_AS(eigenstate(d, 1, 3, 0.0), std::invalid_argument);
}

TEST_CASE("physical to dimensionless mapping") {
    PhysicalContext ctx;
    ctx.ring_radius = 250e-9;
    ctx.effective_mass = 0.023 * kElectronMass;
    ctx.electric_field = 0.0;

    SECTION("energy equal to the kinetic scale gives ka = 1") {
        const double e0 = kinetic_scale(ctx);
        CHECK_THAT(e0, WithinRel(4.2464447408562e-24, 1e-12));
        const RingParams p = dimensionless_from_physical(ctx, e0);
        CHECK_THAT(p.ka, WithinAbs(1.0, 1e-14));
        CHECK(p.so_ratio == 0.0);
    }
    SECTION("round trip through energy_from_ka") {
        const double e = energy_from_ka(ctx, 1.38);
        CHECK_THAT(e, WithinRel(8.08692936448655e-24, 1e-12));
        CHECK_THAT(dimensionless_from_physical(ctx, e).ka, WithinRel(1.38, 1e-14));
    }
    SECTION("field strength sets the spin-orbit ratio") {
        ctx.electric_field = 3e6;
        const RingParams p = dimensionless_from_physical(ctx, kinetic_scale(ctx));
        const double expected = kElementaryCharge * 3e6 * 250e-9 /
                                (ctx.effective_mass * kSpeedOfLight * kSpeedOfLight);
        CHECK_THAT(p.so_ratio, WithinRel(expected, 1e-15));
    }
    SECTION("rejects nonpositive energy and bad context") {
        CHECK_THROWS_AS(dimensionless_from_physical(ctx, 0.0), std::invalid_argument);
        PhysicalContext bad = ctx;
        bad.ring_radius = 0.0;
        CHECK_THROWS_AS(dimensionless_from_physical(bad, 1e-24), std::invalid_argument);
    }
}
