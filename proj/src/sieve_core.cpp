#include "sievelab/sieve_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "sievelab/parallel.hpp"

namespace sievelab {

namespace {

constexpr int64_t kSegment = 1 << 20;

int64_t isqrt(int64_t n) {
    if (n < 0) return 0;
    auto r = static_cast<int64_t>(std::sqrt(static_cast<double>(n)));
    while (r > 0 && r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

}  // namespace

std::vector<int64_t> primes_below(int64_t limit) {
    std::vector<int64_t> primes;
    if (limit <= 2) return primes;
    std::vector<char> composite(static_cast<size_t>(limit), 0);
    for (int64_t i = 2; i < limit; ++i) {
        if (composite[static_cast<size_t>(i)]) continue;
        primes.push_back(i);
        for (int64_t j = i * i; j < limit; j += i) composite[static_cast<size_t>(j)] = 1;
    }
    return primes;
}

SieveTable::SieveTable(int64_t n_max) : n_max_(n_max) {
    if (n_max < 1) throw std::invalid_argument("build_sieve: n_max must be >= 1");
    if (n_max > int64_t{UINT32_MAX})
        throw std::invalid_argument("build_sieve: n_max exceeds the 2^32-1 table limit; use the streaming interface");

    size_t size = static_cast<size_t>(n_max) + 1;
    mangoldt_.assign(size, 0.0);
    moebius_.assign(size, 0);
    spf_.assign(size, 0);
    moebius_[1] = 1;
    spf_[1] = 1;

    const auto base = primes_below(isqrt(n_max) + 1);

    // Pass 1: smallest prime factor, first-set-wins with primes ascending.
    // Segments touch disjoint slices, so they run in parallel.
    par::for_each_chunk(2, n_max + 1, kSegment, [&](int64_t s, int64_t e) {
        for (int64_t p : base) {
            int64_t k = (s + p - 1) / p;
            if (k < 1) k = 1;
            for (int64_t m = k * p; m < e; m += p) {
                auto& slot = spf_[static_cast<size_t>(m)];
                if (slot == 0) slot = static_cast<uint32_t>(p);
            }
        }
        for (int64_t n = s; n < e; ++n) {
            auto& slot = spf_[static_cast<size_t>(n)];
            if (slot == 0) slot = static_cast<uint32_t>(n);  // no factor <= sqrt: prime
        }
    });

    // Pass 2: mu and Lambda from spf.  mu(n) references mu(n/p) with
    // n/p < n, so this pass walks segments in ascending order.
    for (int64_t s = 2; s <= n_max; s += kSegment) {
        int64_t e = std::min(s + kSegment, n_max + 1);
        for (int64_t n = s; n < e; ++n) {
            int64_t p = spf_[static_cast<size_t>(n)];
            int64_t m = n / p;
            moebius_[static_cast<size_t>(n)] =
                (m % p == 0) ? int8_t{0} : static_cast<int8_t>(-moebius_[static_cast<size_t>(m)]);
            while (m % p == 0) m /= p;
            if (m == 1) mangoldt_[static_cast<size_t>(n)] = std::log(static_cast<double>(p));
        }
    }
}

void SieveTable::check_range(int64_t n) const {
    if (n < 1 || n > n_max_)
        throw std::out_of_range("SieveTable: n = " + std::to_string(n) + " outside [1, " +
                                std::to_string(n_max_) + "]");
}

std::vector<std::pair<int64_t, int>> SieveTable::factor(int64_t n) const {
    check_range(n);
    std::vector<std::pair<int64_t, int>> out;
    while (n > 1) {
        int64_t p = spf_[static_cast<size_t>(n)];
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.emplace_back(p, e);
    }
    return out;
}

SieveTable build_sieve(int64_t n_max) { return SieveTable(n_max); }

int64_t euler_totient(int64_t q) {
    if (q < 1) throw std::invalid_argument("euler_totient: q must be >= 1");
    int64_t result = q;
    int64_t n = q;
    for (int64_t p = 2; p * p <= n; ++p) {
        if (n % p != 0) continue;
        result -= result / p;
        while (n % p == 0) n /= p;
    }
    if (n > 1) result -= result / n;
    return result;
}

std::vector<int64_t> divisors(int64_t n, const SieveTable& table) {
    auto factors = table.factor(n);
    std::vector<int64_t> divs{1};
    for (auto [p, e] : factors) {
        size_t old = divs.size();
        int64_t pk = 1;
        for (int j = 1; j <= e; ++j) {
            pk *= p;
            for (size_t i = 0; i < old; ++i) divs.push_back(divs[i] * pk);
        }
    }
    std::sort(divs.begin(), divs.end());
    return divs;
}

void stream_mangoldt(int64_t lo, int64_t hi, const std::function<void(int64_t, double)>& fn) {
    if (lo < 1) lo = 1;
    if (hi <= lo) return;
    const auto base = primes_below(isqrt(hi - 1) + 1);
    std::vector<double> lam;
    std::vector<char> composite;
    for (int64_t s = lo; s < hi; s += kSegment) {
        int64_t e = std::min(s + kSegment, hi);
        size_t len = static_cast<size_t>(e - s);
        lam.assign(len, 0.0);
        composite.assign(len, 0);
        for (int64_t p : base) {
            int64_t start = std::max(int64_t{2} * p, ((s + p - 1) / p) * p);
            for (int64_t m = start; m < e; m += p) composite[static_cast<size_t>(m - s)] = 1;
            // prime powers p^j (j >= 2) carry log p
            double logp = std::log(static_cast<double>(p));
            for (int64_t q = p * p; q < e; q *= p) {
                if (q >= s) lam[static_cast<size_t>(q - s)] = logp;
                if (q > (hi - 1) / p) break;  // overflow guard
            }
            if (p >= s && p < e) lam[static_cast<size_t>(p - s)] = logp;
        }
        for (int64_t n = std::max(s, int64_t{2}); n < e; ++n) {
            size_t i = static_cast<size_t>(n - s);
            if (!composite[i] && lam[i] == 0.0) lam[i] = std::log(static_cast<double>(n));
            if (lam[i] != 0.0) fn(n, lam[i]);
        }
    }
}

void stream_moebius(int64_t lo, int64_t hi, const std::function<void(int64_t, int)>& fn) {
    if (lo < 1) lo = 1;
    if (hi <= lo) return;
    const auto base = primes_below(isqrt(hi - 1) + 1);
    std::vector<int64_t> rem;
    std::vector<int8_t> mu;
    for (int64_t s = lo; s < hi; s += kSegment) {
        int64_t e = std::min(s + kSegment, hi);
        size_t len = static_cast<size_t>(e - s);
        rem.resize(len);
        std::iota(rem.begin(), rem.end(), s);
        mu.assign(len, 1);
        for (int64_t p : base) {
            int64_t start = ((s + p - 1) / p) * p;
            for (int64_t m = start; m < e; m += p) {
                size_t i = static_cast<size_t>(m - s);
                rem[i] /= p;
                mu[i] = static_cast<int8_t>(-mu[i]);
            }
            if (p <= (hi - 1) / p) {
                int64_t p2 = p * p;
                for (int64_t m = ((s + p2 - 1) / p2) * p2; m < e; m += p2)
                    mu[static_cast<size_t>(m - s)] = 0;
            }
        }
        for (int64_t n = s; n < e; ++n) {
            size_t i = static_cast<size_t>(n - s);
            int m = (rem[i] > 1) ? -mu[i] : mu[i];  // one leftover prime > sqrt(hi)
            fn(n, n == 1 ? 1 : m);
        }
    }
}

}  // namespace sievelab
