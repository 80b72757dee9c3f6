#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sievelab/cutoff.hpp"
#include "sievelab/sieve_core.hpp"

namespace sievelab {

// Truncation level R plus the cutoff shaping the divisor sum.
struct TruncationParams {
    double r;  // R > 1
    CutoffFunction cutoff;

    TruncationParams(double r_, CutoffFunction cutoff_);
};

// log R * sum_{d|n} mu(d) phi(log d / log R).  Only divisors d <= R
// contribute (phi vanishes outside [-1,1]).
double truncated_mangoldt(int64_t n, const TruncationParams& params, const SieveTable& table);

// truncated_mangoldt(n)^2 / log R; non-negative by construction
double enveloping_sieve(int64_t n, const TruncationParams& params, const SieveTable& table);

// C = (1/phi(0)^2) * (log N / log R); the pointwise majorization constant
double majorization_constant(int64_t n, const TruncationParams& params);

// every n in [1, n_limit] with Lambda(n) > C * nu(n); empty when the
// majorization holds throughout
struct MajorizationScan {
    double constant;
    std::vector<int64_t> violations;
};
MajorizationScan majorization_scan(int64_t n_limit, const TruncationParams& params, const SieveTable& table);

// Batch evaluation over a contiguous range, one sieve-of-divisors pass:
// out[i] = truncated_mangoldt(lo + i).  Needs mu(d) for d <= R from the
// table, nothing else, so the range may extend far beyond table.n_max().
void truncated_mangoldt_range(int64_t lo, int64_t hi, const TruncationParams& params, const SieveTable& mu_table,
                              std::span<double> out);

// Mean diagnostics for the truncated sums and for the enveloping sieve.
// The admissibility window is reported, never enforced: the computation
// runs regardless and window_note explains any violated hypothesis.
struct MeanReport {
    double value = 0.0;
    int64_t n = 0;
    double r = 0.0;
    double theta = 0.0;  // log R / log N
    bool window_ok = true;
    std::string window_note;
};

// (1/N) sum_{n<=N} Lambda_{R,phi}(n); hypothesis: N^eps <= R <= N^(1-eps),
// smooth cutoff with phi(0)=1, phi'(0)=0
MeanReport mean_truncated(int64_t n, const TruncationParams& params, const SieveTable& mu_table);

// (1/N) sum_{n<=N} nu(n); hypothesis: N^eps <= R <= N^(1/2-eps),
// cutoff with integral_0^1 phi'^2 = 1
MeanReport mean_sieve(int64_t n, const TruncationParams& params, const SieveTable& mu_table);

// R = floor(exp(theta * log n)) from an exact rational exponent, the
// convention used by the CLI (avoids float drift in N^theta)
double truncation_level(int64_t n, int64_t theta_num, int64_t theta_den);

}  // namespace sievelab
