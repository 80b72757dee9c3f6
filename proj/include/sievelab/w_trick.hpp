#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sievelab/local_model.hpp"
#include "sievelab/sieve_core.hpp"
#include "sievelab/truncated_sieve.hpp"

namespace sievelab {

// W = product of all primes strictly below w, with the coprime residues
// b in {1..W}.  Renormalizing n -> (phi(W)/W) * f(Wn + b) strips the
// small-prime bias from Lambda and nu.
struct WContext {
    double w = 0.0;
    uint64_t big_w = 1;  // W
    uint64_t phi_w = 1;  // phi(W)
    std::vector<uint64_t> residues;

    // phi(W)/W, the factor that renormalizes class means back to 1
    double renorm() const { return static_cast<double>(phi_w) / static_cast<double>(big_w); }
    bool coprime(uint64_t b) const;
};

// w >= 2; rejects w whose primorial overflows 2^62 (w <= 53 on 64-bit)
WContext make_w_context(double w);

// Lambda_b(n) = (phi(W)/W) * Lambda(Wn + b), b coprime to W
double renormalized_mangoldt(int64_t n, uint64_t b, const WContext& ctx, const SieveTable& table);

// nu_b(n) = (phi(W)/W) * nu(Wn + b)
double renormalized_sieve(int64_t n, uint64_t b, const WContext& ctx, const TruncationParams& params,
                          const SieveTable& table);

// For every coprime b, modulus q <= q_max and residue a: the deviation
// |E(Lambda_b(n) | n <= N, n = a mod q) - 1|.  Streams Lambda when the
// required range W*(N+1) exceeds the table.
struct UniformityScan {
    struct Row {
        uint64_t b;
        int64_t q;
        int64_t a;
        double mean;
    };
    std::vector<Row> rows;
    double max_deviation = 0.0;
};
UniformityScan residue_uniformity_scan(const WContext& ctx, int64_t n, int64_t q_max, const SieveTable& table);

// E( prod_i nu_{b_i}(psi_i(x)) | x in {1..N}^t ) - 1.  Exhaustive for
// t <= 2; seeded sampling beyond.  Grid points where some form leaves
// {1,..} are dropped (no wraparound).  bs empty means b_i = 1 for all i.
struct LinearFormsReport {
    double average = 0.0;
    double deviation = 0.0;  // |average - 1|
    int64_t points_used = 0;
    int64_t points_total = 0;
    bool exact = true;
};
LinearFormsReport linear_forms_diagnostic(const AffineSystem& system, const WContext& ctx,
                                          const TruncationParams& params, const SieveTable& table, int64_t n,
                                          std::vector<uint64_t> bs = {}, int64_t sample_budget = 1'000'000,
                                          uint64_t seed = 1);

}  // namespace sievelab
