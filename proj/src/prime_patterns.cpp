#include "sievelab/prime_patterns.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <nlohmann/json.hpp>
#include <stdexcept>

#include "sievelab/errors.hpp"
#include "sievelab/parallel.hpp"
#include "sievelab/rng.hpp"

namespace sievelab {

Weighting weighting_from_name(const std::string& name) {
    if (name == "mangoldt") return Weighting::mangoldt;
    if (name == "sieve") return Weighting::sieve;
    if (name == "renormalized_mangoldt") return Weighting::renormalized_mangoldt;
    if (name == "renormalized_sieve") return Weighting::renormalized_sieve;
    if (name == "indicator") return Weighting::indicator;
    throw std::invalid_argument("unknown weighting '" + name + "'");
}

std::string weighting_name(Weighting w) {
    switch (w) {
        case Weighting::mangoldt: return "mangoldt";
        case Weighting::sieve: return "sieve";
        case Weighting::renormalized_mangoldt: return "renormalized_mangoldt";
        case Weighting::renormalized_sieve: return "renormalized_sieve";
        case Weighting::indicator: return "indicator";
    }
    return "?";
}

namespace {

bool is_renormalized(Weighting w) {
    return w == Weighting::renormalized_mangoldt || w == Weighting::renormalized_sieve;
}
bool needs_params(Weighting w) { return w == Weighting::sieve || w == Weighting::renormalized_sieve; }

// Tabulated weight over arguments 1..limit.  Values at arguments beyond the
// table (or below 1) read as a drop of the whole grid point.
class WeightTable {
public:
    WeightTable(Weighting w, int64_t limit, const SieveTable& table, const CorrelationOptions& opt) {
        const WContext* ctx = opt.ctx;
        const TruncationParams* params = opt.params;
        if (is_renormalized(w) && !ctx) throw std::invalid_argument("renormalized weighting requires a WContext");
        if (needs_params(w) && !params) throw std::invalid_argument("sieve weighting requires TruncationParams");

        int64_t big_w = is_renormalized(w) ? static_cast<int64_t>(ctx->big_w) : 1;
        int64_t b = is_renormalized(w) ? static_cast<int64_t>(opt.b) : 0;
        int64_t max_arg = is_renormalized(w) ? big_w * limit + b : limit;
        if (max_arg > table.n_max())
            throw std::out_of_range("weight table: need sieve data up to " + std::to_string(max_arg));

        values_.assign(static_cast<size_t>(limit) + 1, 0.0);
        if (w == Weighting::sieve || w == Weighting::renormalized_sieve) {
            // batch the truncated sums over the whole argument range
            std::vector<double> lam(static_cast<size_t>(max_arg) + 1, 0.0);
            truncated_mangoldt_range(1, max_arg + 1, *params, table,
                                     std::span<double>(lam.data() + 1, static_cast<size_t>(max_arg)));
            double log_r = std::log(params->r);
            double renorm = is_renormalized(w) ? ctx->renorm() : 1.0;
            for (int64_t m = 1; m <= limit; ++m) {
                int64_t arg = big_w * m + b;
                double v = lam[static_cast<size_t>(arg)];
                values_[static_cast<size_t>(m)] = renorm * v * v / log_r;
            }
        } else {
            double renorm = is_renormalized(w) ? ctx->renorm() : 1.0;
            for (int64_t m = 1; m <= limit; ++m) {
                int64_t arg = big_w * m + b;
                double v;
                if (w == Weighting::indicator) v = table.is_prime(arg) ? 1.0 : 0.0;
                else v = table.mangoldt(arg);
                values_[static_cast<size_t>(m)] = renorm * v;
            }
        }
    }

    // weight at argument m; m < 1 contributes the Lambda convention 0
    double operator()(int64_t m) const {
        if (m < 1 || m >= static_cast<int64_t>(values_.size())) return 0.0;
        return values_[static_cast<size_t>(m)];
    }
    int64_t limit() const { return static_cast<int64_t>(values_.size()) - 1; }

private:
    std::vector<double> values_;
};

}  // namespace

CorrelationResult correlation_experiment(const AffineSystem& system, int64_t n, Weighting weighting,
                                         const SieveTable& table, const CorrelationOptions& options) {
    auto started = std::chrono::steady_clock::now();
    if (n < 1) throw std::invalid_argument("correlation_experiment: N must be >= 1");
    const int m = system.m();
    const int t = system.t();

    // maximum form value over the grid corners
    int64_t max_value = 1;
    for (int i = 0; i < m; ++i) {
        int64_t hi = system.constant(i);
        for (int j = 0; j < t; ++j) {
            int64_t c = system.coefficient(i, j);
            hi += c > 0 ? c * n : c;
        }
        max_value = std::max(max_value, hi);
    }

    WeightTable weight(weighting, max_value, table, options);

    auto product_at = [&](std::span<const int64_t> x) {
        double prod = 1.0;
        for (int i = 0; i < m; ++i) {
            prod *= weight(system.evaluate(i, x));
            if (prod == 0.0) return 0.0;
        }
        return prod;
    };

    CorrelationResult result;
    result.system = system.to_string();
    result.n = n;
    result.weighting = weighting;

    double grid = std::pow(static_cast<double>(n), t);
    if (t <= 2 && grid <= static_cast<double>(options.grid_budget)) {
        double sum;
        if (t == 1) {
            sum = par::reduce_chunked(
                int64_t{1}, n + 1, par::kDefaultChunk,
                [&](int64_t lo, int64_t hi) {
                    double part = 0.0;
                    int64_t x[1];
                    for (int64_t v = lo; v < hi; ++v) {
                        x[0] = v;
                        part += product_at(x);
                    }
                    return part;
                },
                0.0);
        } else {
            sum = par::reduce_chunked(
                int64_t{1}, n + 1, std::max<int64_t>(1, n / 256),
                [&](int64_t lo, int64_t hi) {
                    double part = 0.0;
                    int64_t x[2];
                    for (int64_t v = lo; v < hi; ++v) {
                        x[0] = v;
                        for (int64_t u = 1; u <= n; ++u) {
                            x[1] = u;
                            part += product_at(x);
                        }
                    }
                    return part;
                },
                0.0);
        }
        result.lhs = sum / grid;
        result.exact = true;
    } else {
        Rng rng(options.seed);
        std::vector<int64_t> x(static_cast<size_t>(t));
        double sum = 0.0, sum_sq = 0.0;
        for (int64_t s = 0; s < options.sample_budget; ++s) {
            for (int j = 0; j < t; ++j)
                x[static_cast<size_t>(j)] = static_cast<int64_t>(rng.below(static_cast<uint64_t>(n))) + 1;
            double v = product_at(x);
            sum += v;
            sum_sq += v * v;
        }
        double count = static_cast<double>(options.sample_budget);
        result.lhs = sum / count;
        double var = std::max(sum_sq / count - result.lhs * result.lhs, 0.0);
        result.std_error = std::sqrt(var / count);
        result.exact = false;
    }

    // prediction from the local model
    if (is_renormalized(weighting)) {
        result.prediction = 1.0;  // small-prime factors stripped by the W-trick
        result.note = "prediction 1: local factors below w removed";
    } else {
        int64_t p_max = options.p_max;
        if (p_max == 0) p_max = t == 1 ? 10007 : (t == 2 ? 499 : 199);  // alpha_p exhausts p^t points
        LocalDensityReport series = singular_series(system, p_max, options.alpha_p_budget);
        double infinity = 1.0;
        if (weighting != Weighting::sieve) {
            // nu extends to the negative integers: no density at infinity
            infinity = alpha_infinity(system, n, options.sample_budget, options.seed).value;
        }
        result.prediction = infinity * series.partial_product;
        if (weighting == Weighting::indicator) {
            double logn = std::log(static_cast<double>(n));
            result.prediction /= std::pow(logn, m);
            result.note = "heuristic: singular series with log factors divided out at scale log N";
        }
    }
    result.conjectural = (weighting == Weighting::mangoldt || weighting == Weighting::renormalized_mangoldt ||
                          weighting == Weighting::indicator) &&
                         m > t;
    result.relative_deviation = std::abs(result.lhs - result.prediction) / std::max(result.prediction, 1e-12);
    result.runtime_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started).count();
    return result;
}

CensusResult ap_census(int k, int64_t n, Weighting weighting, const SieveTable& table, const CensusOptions& options) {
    if (k < 1 || k > 5) throw std::invalid_argument("ap_census: need 1 <= k <= 5");
    if (n < 1) throw std::invalid_argument("ap_census: N must be >= 1");

    CorrelationOptions wopt;
    wopt.ctx = options.ctx;
    wopt.params = options.params;
    wopt.b = options.b;
    int64_t reach = static_cast<int64_t>(k) * n;  // largest progression entry
    if (options.ctx && is_renormalized(weighting)) {
        // weight table range capped by the sieve table
        int64_t cap = (table.n_max() - static_cast<int64_t>(options.b)) / static_cast<int64_t>(options.ctx->big_w);
        reach = std::min(reach, cap);
    } else {
        reach = std::min(reach, table.n_max());
    }
    WeightTable weight(weighting, reach, table, wopt);

    CensusResult result;
    if (n <= options.exhaustive_cap) {
        double sum = par::reduce_chunked(
            int64_t{1}, n + 1, std::max<int64_t>(1, n / 256),
            [&](int64_t lo, int64_t hi) {
                double part = 0.0;
                for (int64_t r = lo; r < hi; ++r) {
                    for (int64_t a = 1; a <= n; ++a) {
                        int64_t top = a + static_cast<int64_t>(k - 1) * r;
                        if (top > weight.limit()) break;  // a ascending: rest of row exceeds too
                        double prod = 1.0;
                        for (int j = 0; j < k; ++j) {
                            prod *= weight(a + j * r);
                            if (prod == 0.0) break;
                        }
                        part += prod;
                    }
                }
                return part;
            },
            0.0);
        result.value = sum / (static_cast<double>(n) * static_cast<double>(n));
        result.exact = true;
    } else {
        Rng rng(options.seed);
        double sum = 0.0, sum_sq = 0.0;
        for (int64_t s = 0; s < options.sample_budget; ++s) {
            int64_t a = static_cast<int64_t>(rng.below(static_cast<uint64_t>(n))) + 1;
            int64_t r = static_cast<int64_t>(rng.below(static_cast<uint64_t>(n))) + 1;
            double prod = 1.0;
            if (a + static_cast<int64_t>(k - 1) * r > weight.limit()) prod = 0.0;
            for (int j = 0; j < k && prod != 0.0; ++j) prod *= weight(a + j * r);
            sum += prod;
            sum_sq += prod * prod;
        }
        double count = static_cast<double>(options.sample_budget);
        result.value = sum / count;
        double var = std::max(sum_sq / count - result.value * result.value, 0.0);
        result.std_error = std::sqrt(var / count);
        result.exact = false;
    }
    return result;
}

double roth_count_oracle(const ResidueFunction& f) {
    const int64_t n = f.modulus;
    for (const cplx& v : f.values) {
        if (std::abs(v.imag()) > 1e-12) throw std::invalid_argument("roth_count_oracle: f must be real");
        if (v.real() < -1e-12) throw std::invalid_argument("roth_count_oracle: f must be non-negative");
    }

    double sum = par::reduce_chunked(
        int64_t{0}, n, std::max<int64_t>(1, n / 64),
        [&](int64_t lo, int64_t hi) {
            double part = 0.0;
            for (int64_t r = lo; r < hi; ++r) {
                for (int64_t a = 0; a < n; ++a) {
                    int64_t a1 = a + r;
                    if (a1 >= n) a1 -= n;
                    int64_t a2 = a1 + r;
                    if (a2 >= n) a2 -= n;
                    part += f.values[static_cast<size_t>(a)].real() * f.values[static_cast<size_t>(a1)].real() *
                            f.values[static_cast<size_t>(a2)].real();
                }
            }
            return part;
        },
        0.0);
    return sum / (static_cast<double>(n) * static_cast<double>(n));
}

ResidueFunction lambda_b_grid(int64_t n, uint64_t b, const WContext& ctx, const SieveTable& table) {
    ResidueFunction f = ResidueFunction::zeros(n);
    double renorm = ctx.renorm();
    for (int64_t i = 0; i < n; ++i) {
        int64_t arg = static_cast<int64_t>(ctx.big_w) * i + static_cast<int64_t>(b);
        f.values[static_cast<size_t>(i)] = renorm * table.mangoldt(arg);
    }
    return f;
}

ResidueFunction nu_b_grid(int64_t n, uint64_t b, const WContext& ctx, const TruncationParams& params,
                          const SieveTable& table) {
    const int64_t big_w = static_cast<int64_t>(ctx.big_w);
    int64_t max_arg = big_w * (n - 1) + static_cast<int64_t>(b);
    std::vector<double> lam(static_cast<size_t>(max_arg) + 1, 0.0);
    truncated_mangoldt_range(1, max_arg + 1, params, table,
                             std::span<double>(lam.data() + 1, static_cast<size_t>(max_arg)));
    double log_r = std::log(params.r);
    double renorm = ctx.renorm();
    ResidueFunction f = ResidueFunction::zeros(n);
    for (int64_t i = 0; i < n; ++i) {
        double v = lam[static_cast<size_t>(big_w * i + static_cast<int64_t>(b))];
        f.values[static_cast<size_t>(i)] = renorm * v * v / log_r;
    }
    return f;
}

PipelineReport decomposition_pipeline(int64_t n_prime, int k, double epsilon, double w, int64_t theta_num,
                                      int64_t theta_den, uint64_t seed, const PipelineOptions& options) {
    if (!is_prime_int(n_prime) || n_prime > 5003)
        throw std::invalid_argument("decomposition_pipeline: N must be a prime <= 5003");
    if (k < 3 || k > 4) throw std::invalid_argument("decomposition_pipeline: need k in {3, 4}");

    PipelineReport rep;
    rep.n = n_prime;
    rep.k = k;
    rep.w = w;
    rep.epsilon = epsilon;
    rep.seed = seed;
    rep.b = options.b;

    WContext ctx = make_w_context(w);
    rep.big_w = ctx.big_w;
    const int64_t big_w = static_cast<int64_t>(ctx.big_w);
    const int64_t top = big_w * n_prime + big_w;  // covers every Wn + b on the grid
    SieveTable table(top);

    double r = truncation_level(big_w * n_prime, theta_num, theta_den);
    TruncationParams params(r, CutoffFunction::make(options.cutoff));
    rep.r = r;
    rep.theta = std::log(r) / std::log(static_cast<double>(big_w) * static_cast<double>(n_prime));

    ResidueFunction lam_b = lambda_b_grid(n_prime, options.b, ctx, table);
    ResidueFunction nu_b = nu_b_grid(n_prime, options.b, ctx, params, table);
    rep.majorant_mean = nu_b.mean().real();

    // f = c Lambda_b <= nu_b; c from the majorization constant, tightened
    // if the scan finds pointwise violations (possible when log R << log N)
    double c = 1.0 / majorization_constant(big_w * n_prime, params);
    double max_ratio = 0.0;
    for (int64_t i = 0; i < n_prime; ++i) {
        double l = lam_b.values[static_cast<size_t>(i)].real();
        if (l <= 0.0) continue;
        max_ratio = std::max(max_ratio, c * l / nu_b.values[static_cast<size_t>(i)].real());
    }
    if (max_ratio > 1.0) c /= max_ratio * (1.0 + 1e-12);
    rep.c_normalization = c;

    ResidueFunction f = ResidueFunction::zeros(n_prime);
    for (int64_t i = 0; i < n_prime; ++i) f.values[static_cast<size_t>(i)] = c * lam_b.values[static_cast<size_t>(i)];
    rep.f_mean = f.mean().real();

    StructureOptions sopt;
    sopt.max_iter = options.max_iter;
    sopt.shift_seed = seed;
    sopt.atom_cap = options.atom_cap;
    Decomposition d = structure_decompose(f, k, epsilon, nu_b, sopt);
    rep.iterations = d.iterations;
    rep.terminated = d.terminated;
    rep.final_gowers = d.final_gowers;
    rep.energy_trace = d.energy_trace;
    rep.exceptional_mass = d.exceptional_mass;
    rep.f_uperp_max = d.f_uperp.max_abs();

    // expand (f_U + f_Uperp)^k into 2^k progression averages
    std::vector<ResidueFunction> slot(static_cast<size_t>(k));
    double total = 0.0;
    for (int mask = 0; mask < (1 << k); ++mask) {
        std::string label;
        for (int j = 0; j < k; ++j) {
            slot[static_cast<size_t>(j)] = (mask >> j & 1) ? d.f_u : d.f_uperp;
            label += (mask >> j & 1) ? "U" : "Uperp";
            if (j + 1 < k) label += ",";
        }
        double value = ap_average(slot).real();
        total += value;
        if (mask == 0) {
            rep.f_uperp_ap_average = value;
        } else {
            rep.cross_terms.push_back(std::abs(value));
            rep.cross_labels.push_back(label);
            rep.max_cross_term = std::max(rep.max_cross_term, std::abs(value));
        }
    }

    // the split zeroes f on the exceptional atom, so audit the expansion
    // against the recombined f_U + f_Uperp
    ResidueFunction sum_parts = ResidueFunction::zeros(n_prime);
    for (int64_t i = 0; i < n_prime; ++i)
        sum_parts.values[static_cast<size_t>(i)] =
            d.f_u.values[static_cast<size_t>(i)] + d.f_uperp.values[static_cast<size_t>(i)];
    std::vector<ResidueFunction> recombined(static_cast<size_t>(k), sum_parts);
    rep.multilinearity_residual = std::abs(total - ap_average(recombined).real());

    std::vector<ResidueFunction> lam_tuple(static_cast<size_t>(k), lam_b);
    rep.lambda_b_ap_average = ap_average(lam_tuple).real();

    double cross_sum = 0.0;
    for (double v : rep.cross_terms) cross_sum += v;
    rep.assembled_lower_bound = (rep.f_uperp_ap_average - cross_sum) / std::pow(c, k);
    return rep;
}

std::string PipelineReport::to_json() const {
    nlohmann::ordered_json j;
    j["experiment"] = "pipeline";
    j["N"] = n;
    j["k"] = k;
    j["w"] = w;
    j["W"] = big_w;
    j["b"] = b;
    j["R"] = r;
    j["theta"] = theta;
    j["epsilon"] = epsilon;
    j["seed"] = seed;
    j["c_normalization"] = c_normalization;
    j["majorant_mean"] = majorant_mean;
    j["f_mean"] = f_mean;
    j["iterations"] = iterations;
    j["terminated"] = terminated;
    j["final_gowers"] = final_gowers;
    j["energy_trace"] = energy_trace;
    j["exceptional_mass"] = exceptional_mass;
    j["f_uperp_max"] = f_uperp_max;
    j["f_uperp_ap_average"] = f_uperp_ap_average;
    j["cross_labels"] = cross_labels;
    j["cross_terms"] = cross_terms;
    j["max_cross_term"] = max_cross_term;
    j["multilinearity_residual"] = multilinearity_residual;
    j["lambda_b_ap_average"] = lambda_b_ap_average;
    j["assembled_lower_bound"] = assembled_lower_bound;
    return j.dump();
}

}  // namespace sievelab
