#include "sievelab/truncated_sieve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sievelab/errors.hpp"
#include "sievelab/parallel.hpp"

namespace sievelab {

TruncationParams::TruncationParams(double r_, CutoffFunction cutoff_) : r(r_), cutoff(std::move(cutoff_)) {
    if (!(r > 1.0)) throw std::invalid_argument("TruncationParams: R must be > 1");
}

double truncated_mangoldt(int64_t n, const TruncationParams& params, const SieveTable& table) {
    const double log_r = std::log(params.r);
    double sum = 0.0;
    for (int64_t d : divisors(n, table)) {
        int mu = table.moebius(d);
        if (mu == 0) continue;
        sum += mu * params.cutoff(std::log(static_cast<double>(d)) / log_r);
    }
    return log_r * sum;
}

double enveloping_sieve(int64_t n, const TruncationParams& params, const SieveTable& table) {
    double lam = truncated_mangoldt(n, params, table);
    return lam * lam / std::log(params.r);
}

double majorization_constant(int64_t n, const TruncationParams& params) {
    double phi0 = params.cutoff.value_at_zero();
    if (phi0 == 0.0) throw degenerate_cutoff_error("majorization_constant: phi(0) = 0");
    if (params.r > static_cast<double>(n))
        throw std::invalid_argument("majorization_constant: requires R <= N");
    return (1.0 / (phi0 * phi0)) * (std::log(static_cast<double>(n)) / std::log(params.r));
}

MajorizationScan majorization_scan(int64_t n_limit, const TruncationParams& params, const SieveTable& table) {
    MajorizationScan scan;
    scan.constant = majorization_constant(n_limit, params);
    const double log_r = std::log(params.r);
    std::vector<double> lam(static_cast<size_t>(n_limit) + 1, 0.0);
    truncated_mangoldt_range(1, n_limit + 1, params, table,
                             std::span<double>(lam.data() + 1, static_cast<size_t>(n_limit)));
    for (int64_t n = 1; n <= n_limit; ++n) {
        double nu = lam[static_cast<size_t>(n)] * lam[static_cast<size_t>(n)] / log_r;
        if (table.mangoldt(n) > scan.constant * nu) scan.violations.push_back(n);
    }
    return scan;
}

void truncated_mangoldt_range(int64_t lo, int64_t hi, const TruncationParams& params, const SieveTable& mu_table,
                              std::span<double> out) {
    if (hi <= lo) return;
    if (out.size() < static_cast<size_t>(hi - lo))
        throw std::invalid_argument("truncated_mangoldt_range: output span too small");
    const int64_t r_floor = static_cast<int64_t>(params.r);
    if (r_floor > mu_table.n_max())
        throw std::out_of_range("truncated_mangoldt_range: need mu up to R <= table.n_max");

    const double log_r = std::log(params.r);
    // weight per divisor d <= R; exact zero beyond R by the cutoff support
    std::vector<double> weight(static_cast<size_t>(r_floor) + 1, 0.0);
    for (int64_t d = 1; d <= r_floor; ++d) {
        int mu = mu_table.moebius(d);
        if (mu == 0) continue;
        weight[static_cast<size_t>(d)] = mu * params.cutoff(std::log(static_cast<double>(d)) / log_r);
    }

    std::fill(out.begin(), out.begin() + static_cast<size_t>(hi - lo), 0.0);
    // segment-parallel: each chunk owns a disjoint slice of out
    par::for_each_chunk(lo, hi, int64_t{1} << 20, [&](int64_t s, int64_t e) {
        for (int64_t d = 1; d <= r_floor; ++d) {
            double w = weight[static_cast<size_t>(d)];
            if (w == 0.0) continue;
            for (int64_t m = ((s + d - 1) / d) * d; m < e; m += d) out[static_cast<size_t>(m - lo)] += w;
        }
        for (int64_t n = s; n < e; ++n) out[static_cast<size_t>(n - lo)] *= log_r;
    });
}

namespace {

MeanReport mean_over_range(int64_t n, const TruncationParams& params, const SieveTable& mu_table, bool square) {
    if (n < 1) throw std::invalid_argument("mean: N must be >= 1");
    const double log_r = std::log(params.r);
    const int64_t seg = int64_t{1} << 20;
    double total = par::reduce_chunked(
        int64_t{1}, n + 1, seg,
        [&](int64_t s, int64_t e) {
            thread_local std::vector<double> local;
            local.assign(static_cast<size_t>(e - s), 0.0);
            truncated_mangoldt_range(s, e, params, mu_table, local);
            double part = 0.0;
            for (double v : local) part += square ? v * v / log_r : v;
            return part;
        },
        0.0);

    MeanReport rep;
    rep.value = total / static_cast<double>(n);
    rep.n = n;
    rep.r = params.r;
    rep.theta = std::log(params.r) / std::log(static_cast<double>(n));
    return rep;
}

}  // namespace

MeanReport mean_truncated(int64_t n, const TruncationParams& params, const SieveTable& mu_table) {
    MeanReport rep = mean_over_range(n, params, mu_table, /*square=*/false);
    if (!(rep.theta > 0.0 && rep.theta < 1.0)) {
        rep.window_ok = false;
        rep.window_note = "R outside (1, N): theta = " + std::to_string(rep.theta);
    }
    if (params.cutoff.kind() != CutoffKind::smooth_unit) {
        rep.window_ok = false;
        if (!rep.window_note.empty()) rep.window_note += "; ";
        rep.window_note += "cutoff '" + params.cutoff.name() + "' lacks the phi(0)=1, phi'(0)=0 guarantee";
    }
    return rep;
}

MeanReport mean_sieve(int64_t n, const TruncationParams& params, const SieveTable& mu_table) {
    MeanReport rep = mean_over_range(n, params, mu_table, /*square=*/true);
    if (!(rep.theta > 0.0 && rep.theta < 0.5)) {
        rep.window_ok = false;
        rep.window_note = "R outside (1, sqrt(N)): theta = " + std::to_string(rep.theta);
    }
    if (params.cutoff.kind() != CutoffKind::smooth_l2normalized) {
        rep.window_ok = false;
        if (!rep.window_note.empty()) rep.window_note += "; ";
        if (params.cutoff.kind() == CutoffKind::triangle)
            rep.window_note += "triangle cutoff: L2 normalization happens to hold but smoothness does not";
        else
            rep.window_note += "cutoff '" + params.cutoff.name() + "' is not L2-normalized";
    }
    return rep;
}

double truncation_level(int64_t n, int64_t theta_num, int64_t theta_den) {
    if (theta_den <= 0 || theta_num <= 0) throw std::invalid_argument("truncation_level: exponent must be positive");
    double theta = static_cast<double>(theta_num) / static_cast<double>(theta_den);
    // the nudge keeps exact integer powers (e.g. 10^6 at theta = 1/3) from
    // flooring one below N^theta
    return std::floor(std::exp(theta * std::log(static_cast<double>(n))) * (1.0 + 1e-12));
}

}  // namespace sievelab
