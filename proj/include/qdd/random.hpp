#pragma once

// Seeded pseudorandom stream with a hand-rolled Box-Muller transform so test
// fixtures are bit-identical across standard-library implementations.

#include <cmath>
#include <cstdint>
#include <random>

#include "qdd/linalg.hpp"

namespace qdd {

class Prng {
public:
    explicit Prng(std::uint64_t seed) : gen_(seed) {}

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller.
    double gauss() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        while (u1 == 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * M_PI * u2);
        have_spare_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Random Hermitian matrix with standard-normal entries, symmetrized.
inline Matrix random_hermitian(Index dim, Prng& rng) {
    Matrix a(dim, dim);
    for (Index r = 0; r < dim; ++r)
        for (Index c = 0; c < dim; ++c)
            a(r, c) = Complex(rng.gauss(), rng.gauss());
    return 0.5 * (a + a.adjoint()).eval();
}

} // namespace qdd
