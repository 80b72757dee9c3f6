#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace sievelab {

// Exact arithmetic-function tables on {1,...,n_max}:
//   mangoldt(n)  von Mangoldt Lambda(n) = log p at prime powers p^j, else 0
//   moebius(n)   Moebius mu(n) in {-1,0,+1}
//   spf(n)       smallest prime factor, spf(1) = 1 by convention
//
// Lambda values are stored as double-precision natural logs, but prime-power
// detection is done with exact integer arithmetic (repeated spf division),
// never by comparing floats.
//
// Construction runs segment by segment (segment length 2^20) with the
// marking pass parallelized over segments.  The table is immutable after
// construction and safe to share across threads.
class SieveTable {
public:
    explicit SieveTable(int64_t n_max);

    int64_t n_max() const { return n_max_; }

    double mangoldt(int64_t n) const {
        check_range(n);
        return mangoldt_[static_cast<size_t>(n)];
    }
    int moebius(int64_t n) const {
        check_range(n);
        return moebius_[static_cast<size_t>(n)];
    }
    int64_t spf(int64_t n) const {
        check_range(n);
        return spf_[static_cast<size_t>(n)];
    }
    bool is_prime(int64_t n) const { return n >= 2 && spf(n) == n; }

    // prime factorization (p, exponent) pairs, ascending p
    std::vector<std::pair<int64_t, int>> factor(int64_t n) const;

private:
    void check_range(int64_t n) const;

    int64_t n_max_;
    std::vector<double> mangoldt_;
    std::vector<int8_t> moebius_;
    std::vector<uint32_t> spf_;
};

SieveTable build_sieve(int64_t n_max);

// |{1 <= a <= q : gcd(a, q) = 1}| by trial-division factorization
int64_t euler_totient(int64_t q);

// sorted complete divisor list of n, derived from the table's spf data
std::vector<int64_t> divisors(int64_t n, const SieveTable& table);

// ascending primes p < limit (simple sieve; helper for small ranges)
std::vector<int64_t> primes_below(int64_t limit);

// Streaming access for ranges too large to tabulate.  Both walk [lo, hi)
// in ascending order with bounded memory (one 2^20 segment at a time).
// stream_mangoldt invokes fn(n, Lambda(n)) only where Lambda(n) != 0;
// stream_moebius invokes fn(n, mu(n)) for every n in range.
void stream_mangoldt(int64_t lo, int64_t hi, const std::function<void(int64_t, double)>& fn);
void stream_moebius(int64_t lo, int64_t hi, const std::function<void(int64_t, int)>& fn);

}  // namespace sievelab
