#include "sievelab/w_trick.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sievelab/errors.hpp"
#include "sievelab/parallel.hpp"
#include "sievelab/rng.hpp"

namespace sievelab {

bool WContext::coprime(uint64_t b) const { return b >= 1 && std::gcd(b, big_w) == 1; }

WContext make_w_context(double w) {
    if (!(w >= 2.0)) throw std::invalid_argument("make_w_context: w must be >= 2");
    WContext ctx;
    ctx.w = w;
    constexpr uint64_t kLimit = uint64_t{1} << 62;
    for (int64_t p : primes_below(static_cast<int64_t>(std::ceil(w)))) {
        if (static_cast<double>(p) >= w) break;
        if (ctx.big_w > kLimit / static_cast<uint64_t>(p))
            throw std::invalid_argument(
                "make_w_context: primorial of primes below w exceeds 2^62; largest admissible w is 53");
        ctx.big_w *= static_cast<uint64_t>(p);
        ctx.phi_w *= static_cast<uint64_t>(p - 1);
    }
    ctx.residues.reserve(ctx.phi_w);
    for (uint64_t b = 1; b <= ctx.big_w; ++b)
        if (std::gcd(b, ctx.big_w) == 1) ctx.residues.push_back(b);
    return ctx;
}

namespace {

int64_t renorm_argument(int64_t n, uint64_t b, const WContext& ctx, const SieveTable& table) {
    if (!ctx.coprime(b)) throw std::invalid_argument("renormalized weight: b not coprime to W");
    if (n < 1) throw std::invalid_argument("renormalized weight: n must be >= 1");
    int64_t arg = static_cast<int64_t>(ctx.big_w) * n + static_cast<int64_t>(b);
    if (arg > table.n_max())
        throw std::out_of_range("renormalized weight: W*n + b = " + std::to_string(arg) + " exceeds table range");
    return arg;
}

}  // namespace

double renormalized_mangoldt(int64_t n, uint64_t b, const WContext& ctx, const SieveTable& table) {
    return ctx.renorm() * table.mangoldt(renorm_argument(n, b, ctx, table));
}

double renormalized_sieve(int64_t n, uint64_t b, const WContext& ctx, const TruncationParams& params,
                          const SieveTable& table) {
    return ctx.renorm() * enveloping_sieve(renorm_argument(n, b, ctx, table), params, table);
}

UniformityScan residue_uniformity_scan(const WContext& ctx, int64_t n, int64_t q_max, const SieveTable& table) {
    if (n < 1) throw std::invalid_argument("residue_uniformity_scan: N must be >= 1");
    if (q_max < 1 || static_cast<double>(q_max) > ctx.w)
        throw std::invalid_argument("residue_uniformity_scan: need 1 <= q_max <= w");

    const int64_t big_w = static_cast<int64_t>(ctx.big_w);
    const int64_t hi = big_w * (n + 1);  // arguments Wn+b stay below W(N+1)

    // class sums indexed by (b, q, a); only Lambda != 0 positions contribute
    std::vector<int64_t> coprime_index(static_cast<size_t>(big_w), -1);
    for (size_t i = 0; i < ctx.residues.size(); ++i)
        coprime_index[static_cast<size_t>(ctx.residues[i] % ctx.big_w)] = static_cast<int64_t>(i);

    std::vector<int64_t> q_offset(static_cast<size_t>(q_max) + 1, 0);
    int64_t classes_per_b = 0;
    for (int64_t q = 1; q <= q_max; ++q) {
        q_offset[static_cast<size_t>(q)] = classes_per_b;
        classes_per_b += q;
    }
    std::vector<double> sums(ctx.residues.size() * static_cast<size_t>(classes_per_b), 0.0);

    auto accumulate = [&](int64_t m, double lam) {
        int64_t b = m % big_w;
        int64_t idx = coprime_index[static_cast<size_t>(b)];
        if (idx < 0) return;
        int64_t nn = m / big_w;  // m = W*nn + b with 0 <= b < W
        if (nn < 1 || nn > n) return;
        size_t base = static_cast<size_t>(idx) * static_cast<size_t>(classes_per_b);
        for (int64_t q = 1; q <= q_max; ++q)
            sums[base + static_cast<size_t>(q_offset[static_cast<size_t>(q)] + nn % q)] += lam;
    };

    if (hi <= table.n_max()) {
        for (int64_t m = big_w + 1; m < hi; ++m) {
            double lam = table.mangoldt(m);
            if (lam != 0.0) accumulate(m, lam);
        }
    } else {
        stream_mangoldt(big_w + 1, hi, accumulate);
    }

    UniformityScan scan;
    const double renorm = ctx.renorm();
    for (size_t i = 0; i < ctx.residues.size(); ++i) {
        for (int64_t q = 1; q <= q_max; ++q) {
            for (int64_t a = 0; a < q; ++a) {
                int64_t count = n / q + (a >= 1 && a <= n % q ? 1 : 0);  // |{1<=nn<=N : nn = a mod q}|
                if (a == 0) count = n / q;
                if (count == 0) continue;
                double mean = renorm *
                              sums[i * static_cast<size_t>(classes_per_b) +
                                   static_cast<size_t>(q_offset[static_cast<size_t>(q)] + a)] /
                              static_cast<double>(count);
                scan.rows.push_back({ctx.residues[i], q, a, mean});
                scan.max_deviation = std::max(scan.max_deviation, std::abs(mean - 1.0));
            }
        }
    }
    return scan;
}

LinearFormsReport linear_forms_diagnostic(const AffineSystem& system, const WContext& ctx,
                                          const TruncationParams& params, const SieveTable& table, int64_t n,
                                          std::vector<uint64_t> bs, int64_t sample_budget, uint64_t seed) {
    if (!system.linear_parts_pairwise_independent())
        throw std::invalid_argument("linear_forms_diagnostic: linear parts must be pairwise independent");
    const int m = system.m();
    const int t = system.t();
    if (bs.empty()) bs.assign(static_cast<size_t>(m), 1);
    if (static_cast<int>(bs.size()) != m)
        throw std::invalid_argument("linear_forms_diagnostic: need one residue per form");
    for (uint64_t b : bs)
        if (!ctx.coprime(b)) throw std::invalid_argument("linear_forms_diagnostic: b not coprime to W");

    // precompute nu_b over each form's value range: the grid revisits few
    // distinct arguments, so batch the truncated sums once
    int64_t max_arg = 0;
    for (int i = 0; i < m; ++i) {
        int64_t lo = system.constant(i), hi = system.constant(i);
        for (int j = 0; j < t; ++j) {
            int64_t c = system.coefficient(i, j);
            if (c > 0) hi += c * n; else lo += c * n;
            if (c > 0) lo += c; else hi += c;
        }
        max_arg = std::max(max_arg, hi);
    }
    const int64_t big_w = static_cast<int64_t>(ctx.big_w);
    int64_t need = big_w * max_arg + big_w;
    if (need > table.n_max())
        throw std::out_of_range("linear_forms_diagnostic: table must cover W*max(psi) + W = " + std::to_string(need));

    std::vector<double> lam_r(static_cast<size_t>(max_arg) * static_cast<size_t>(big_w) + static_cast<size_t>(big_w),
                              0.0);
    truncated_mangoldt_range(1, static_cast<int64_t>(lam_r.size()), params, table,
                             std::span<double>(lam_r.data() + 1, lam_r.size() - 1));
    const double log_r = std::log(params.r);
    const double renorm = ctx.renorm();
    auto nu_b = [&](int64_t v, uint64_t b) {
        double lam = lam_r[static_cast<size_t>(big_w * v + static_cast<int64_t>(b))];
        return renorm * lam * lam / log_r;
    };

    LinearFormsReport report;
    double grid = std::pow(static_cast<double>(n), t);
    std::vector<int64_t> x(static_cast<size_t>(t), 1);
    auto product_at = [&](std::span<const int64_t> pt, bool& ok) {
        double prod = 1.0;
        ok = true;
        for (int i = 0; i < m; ++i) {
            int64_t v = system.evaluate(i, pt);
            if (v < 1) {
                ok = false;
                return 0.0;
            }
            prod *= nu_b(v, bs[static_cast<size_t>(i)]);
        }
        return prod;
    };

    if (t <= 2 && grid <= 1e9) {
        struct Acc {
            double sum = 0.0;
            int64_t used = 0;
            Acc operator+(const Acc& o) const { return {sum + o.sum, used + o.used}; }
        };
        Acc acc = par::reduce_chunked(
            int64_t{1}, n + 1, std::max<int64_t>(1, n / 256),
            [&](int64_t lo, int64_t hi) {
                Acc part;
                std::vector<int64_t> pt(static_cast<size_t>(t), 1);
                for (int64_t x1 = lo; x1 < hi; ++x1) {
                    pt[0] = x1;
                    if (t == 1) {
                        bool ok;
                        double v = product_at(pt, ok);
                        if (ok) {
                            part.sum += v;
                            ++part.used;
                        }
                    } else {
                        for (int64_t x2 = 1; x2 <= n; ++x2) {
                            pt[1] = x2;
                            bool ok;
                            double v = product_at(pt, ok);
                            if (ok) {
                                part.sum += v;
                                ++part.used;
                            }
                        }
                    }
                }
                return part;
            },
            Acc{});
        report.average = acc.sum / grid;
        report.points_used = acc.used;
        report.points_total = static_cast<int64_t>(grid);
        report.exact = true;
    } else {
        Rng rng(seed);
        double sum = 0.0;
        int64_t used = 0;
        for (int64_t s = 0; s < sample_budget; ++s) {
            for (int j = 0; j < t; ++j)
                x[static_cast<size_t>(j)] = static_cast<int64_t>(rng.below(static_cast<uint64_t>(n))) + 1;
            bool ok;
            double v = product_at(x, ok);
            if (ok) {
                sum += v;
                ++used;
            }
        }
        report.average = sum / static_cast<double>(sample_budget);
        report.points_used = used;
        report.points_total = sample_budget;
        report.exact = false;
    }
    report.deviation = std::abs(report.average - 1.0);
    return report;
}

}  // namespace sievelab
