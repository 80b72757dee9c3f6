#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace sievelab {

// Seeded generator used for every randomized path (Monte Carlo sampling,
// grid translations, test-case generation).  mt19937_64 has a fully
// specified output sequence, and the derived doubles below avoid
// std::uniform_real_distribution, whose output is implementation-defined;
// together that makes runs reproducible across platforms.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next() { return gen_(); }

    // uniform in [0,1) with 53 random bits
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, n), unbiased (rejection from the top)
    uint64_t below(uint64_t n) {
        if (n == 0) return 0;
        uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % n;
    }

    // uniform point on the unit circle
    std::complex<double> unit_phase() {
        double theta = 2.0 * 3.14159265358979323846 * uniform01();
        return {std::cos(theta), std::sin(theta)};
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace sievelab
