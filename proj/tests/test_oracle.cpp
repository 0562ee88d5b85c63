#include <catch2/catch_amalgamated.hpp>

#include <ringpol/oracle.hpp>
#include <ringpol/random.hpp>

using namespace ringpol;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("boundary system is block diagonal in the spin channel") {
    DeterministicRng rng(31);
    const auto tup = rng.scattering_tuple();
    const auto sys = oracle::assemble(tup.geom, derive(tup.params), tup.f);
    for (std::size_t row = 0; row < 12; ++row) {
        const int row_mu = row < 6 ? 1 : 2;
        for (int seg = 0; seg < 3; ++seg)
            for (int mu = 1; mu <= 2; ++mu)
                for (int j = 1; j <= 2; ++j)
                    if (mu != row_mu)
                        CHECK(std::abs(sys.matrix[row][oracle::column_index(seg, mu, j)]) == 0.0);
    }
}

TEST_CASE("solve reports a small residual and a sane condition number") {
    DeterministicRng rng(32);
    for (int i = 0; i < 20; ++i) {
        const auto tup = rng.scattering_tuple();
        const auto sys = oracle::assemble(tup.geom, derive(tup.params), tup.f);
        const auto sol = oracle::solve(sys);
        CHECK(sol.report.residual < 1e-12);
        CHECK(sol.report.condition >= 1.0);
        CHECK(sol.report.condition < 1e9);
    }
}

TEST_CASE("zero input gives the zero solution") {
    const RingGeometry g{1.2, 3.9};
    const auto sys = oracle::assemble(g, derive({1.7, 6.1}), Spinor{});
    const auto sol = oracle::solve(sys);
    for (int seg = 0; seg < 3; ++seg)
        for (int mu = 0; mu < 2; ++mu)
            for (int j = 0; j < 2; ++j) CHECK(std::abs(sol.coeffs.a[seg][mu][j]) == 0.0);
    CHECK(std::abs(sol.r.up) == 0.0);
    CHECK(std::abs(sol.t2.down) == 0.0);
}

TEST_CASE("oracle junction currents balance") {
    DeterministicRng rng(33);
    for (int i = 0; i < 40; ++i) {
        const auto tup = rng.scattering_tuple();
        const auto sys = oracle::assemble(tup.geom, derive(tup.params), tup.f);
        const auto sol = oracle::solve(sys);
        CHECK(oracle::junction_balance(sys, sol).max() < 1e-10);
    }
}

TEST_CASE("ring current is independent of the evaluation angle") {
    DeterministicRng rng(34);
    const auto tup = rng.scattering_tuple();
    const DerivedParams d = derive(tup.params);
    const auto cf = transport::ring_coefficients(tup.geom, d, d.ka, tup.f);
    const double ends[4] = {0.0, tup.geom.gamma1, tup.geom.gamma2, 2.0 * kPi};
    for (int seg = 0; seg < 3; ++seg) {
        const double lo = ends[seg], hi = ends[seg + 1];
        const double ref = oracle::ring_current(cf, d, seg, lo);
        for (double t : {0.25, 0.5, 0.75, 1.0})
            CHECK_THAT(oracle::ring_current(cf, d, seg, lo + t * (hi - lo)), WithinAbs(ref, 1e-10));
    }
}

TEST_CASE("channel currents match their closed form") {
    DeterministicRng rng(35);
    for (int i = 0; i < 25; ++i) {
        const auto tup = rng.scattering_tuple();
        const DerivedParams d = derive(tup.params);
        const auto cf = transport::ring_coefficients(tup.geom, d, d.ka, tup.f);
        for (int seg = 0; seg < 3; ++seg) {
            const double mids[3] = {0.5 * tup.geom.gamma1,
                                    0.5 * (tup.geom.gamma1 + tup.geom.gamma2),
                                    0.5 * (tup.geom.gamma2 + 2.0 * kPi)};
            double total = 0.0;
            for (int mu = 1; mu <= 2; ++mu) {
                const double direct = oracle::ring_current_channel(cf, d, seg, mu, mids[seg]);
                const double formula = oracle::channel_current_formula(cf, d, seg, mu);
                CHECK_THAT(direct, WithinAbs(formula, 1e-10));
                // the two j components always flow against each other
                const double j1 = oracle::pair_current(cf, d, seg, mu, 1);
                const double j2 = oracle::pair_current(cf, d, seg, mu, 2);
                CHECK(j1 * j2 <= 0.0);
                CHECK_THAT(formula, WithinAbs(j1 + j2, 1e-12));
                total += formula;
            }
            // channel currents add up to the full current, cross terms cancel
            CHECK_THAT(oracle::ring_current(cf, d, seg, mids[seg]), WithinAbs(total, 1e-10));
        }
    }
}

TEST_CASE("lead current convention") {
    const Spinor unit{1.0, 0.0};
    CHECK_THAT(oracle::lead_current(unit, Spinor{}, 3.0), WithinAbs(6.0, 1e-15));
    CHECK_THAT(oracle::lead_current(unit, unit, 3.0), WithinAbs(0.0, 1e-15));
    CHECK_THAT(oracle::lead_current(Spinor{}, unit, 0.5), WithinAbs(-1.0, 1e-15));
}

TEST_CASE("eigenspinor input stays in its channel through the oracle") {
    const DerivedParams d = derive({1.9, 7.3});
    const RingGeometry g{0.9, 4.4};
    for (int mu = 1; mu <= 2; ++mu) {
        const auto sys = oracle::assemble(g, d, spinor_part(mu, d.theta, 0.0));
        const auto sol = oracle::solve(sys);
        const int other = mu == 1 ? 2 : 1;
        for (int seg = 0; seg < 3; ++seg)
            for (int j = 1; j <= 2; ++j)
                CHECK(std::abs(sol.coeffs.a[seg][other - 1][j - 1]) < 1e-13);
    }
}

TEST_CASE("linear solver rejects singular systems") {
    SquareMatrix<3> a{};
    a[0][0] = 1.0;
    a[1][1] = 1.0;  // third row all zero
    ColumnVector<3> b{cplx{1.0, 0.0}, cplx{1.0, 0.0}, cplx{1.0, 0.0}};
    CHECK_THROWS_AS(ringpol::solve<3>(a, b), resonance_error);
}

TEST_CASE("linear solver recovers a known solution") {
    DeterministicRng rng(36);
    SquareMatrix<5> a{};
    ColumnVector<5> x_true{};
    for (std::size_t i = 0; i < 5; ++i) {
        x_true[i] = cplx{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        for (std::size_t j = 0; j < 5; ++j)
            a[i][j] = cplx{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    }
    ColumnVector<5> b{};
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 5; ++j) b[i] += a[i][j] * x_true[j];
    SolveReport rep{};
    const auto x = ringpol::solve<5>(a, b, &rep);
    for (std::size_t i = 0; i < 5; ++i) CHECK(std::abs(x[i] - x_true[i]) < 1e-12);
    CHECK(rep.residual < 1e-14);
}
