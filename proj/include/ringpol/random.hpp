// Deterministic random sampling for the consistency checks. Doubles are
// built from raw mt19937_64 output instead of std::uniform_real_distribution,
// whose results vary across standard library implementations; a fixed seed
// therefore produces identical draws (and identical reports) everywhere.
#pragma once

#include <cstdint>
#include <random>

#include "ring.hpp"
#include "spin.hpp"

namespace ringpol {

class DeterministicRng {
public:
    explicit DeterministicRng(std::uint64_t seed) : gen_(seed) {}

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Random spin state with components uniform in the complex unit square,
    // normalized.
    Spinor spinor() {
        const Spinor raw{cplx{uniform(-1.0, 1.0), uniform(-1.0, 1.0)},
                         cplx{uniform(-1.0, 1.0), uniform(-1.0, 1.0)}};
        if (norm2(raw) < 1e-12) return {1.0, 0.0};
        return normalized(raw);
    }

    // Well-posed scattering tuple: junction angles keep a small margin from
    // 0, 2*pi and from each other so the boundary system stays far from its
    // resonances for any draw.
    struct Tuple {
        RingParams params{};
        RingGeometry geom{};
        Spinor f{};
    };

    Tuple scattering_tuple() {
        Tuple t;
        t.params.so_ratio = uniform(0.0, 5.0);
        t.params.ka = 12.0 - 11.9 * uniform();  // (0.1, 12]
        t.geom.gamma1 = uniform(0.05, 2.0 * kPi - 0.15);
        t.geom.gamma2 = uniform(t.geom.gamma1 + 0.02, 2.0 * kPi - 0.02);
        t.f = spinor();
        return t;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace ringpol
