#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "sievelab/sieve_core.hpp"

namespace sievelab {

// Affine-linear forms psi_i(x) = sum_j L[i][j] x_j + b[i] on Z^t.
// Construction rejects constant forms and pairs of forms that are rational
// multiples of each other (2x2 minor test on the rows (L_i, b_i)).
class AffineSystem {
public:
    AffineSystem(std::vector<std::vector<int64_t>> coefficients, std::vector<int64_t> constants);

    // grammar: semicolon-separated affine expressions with integer
    // coefficients in variables x (t = 1) or x1..x4, e.g.
    //   "x; x+2"         twin pattern
    //   "x1; x1+x2; x1+2*x2"   3-term progressions
    static AffineSystem parse(const std::string& forms);

    int m() const { return static_cast<int>(coeff_.size()); }
    int t() const { return static_cast<int>(coeff_.empty() ? 0 : coeff_[0].size()); }

    int64_t coefficient(int i, int j) const { return coeff_[static_cast<size_t>(i)][static_cast<size_t>(j)]; }
    int64_t constant(int i) const { return const_[static_cast<size_t>(i)]; }

    int64_t evaluate(int i, std::span<const int64_t> x) const;

    // the stricter independence predicate on the linear parts alone
    // (constants excluded), required by the linear-forms diagnostics
    bool linear_parts_pairwise_independent() const;

    std::string to_string() const;

private:
    std::vector<std::vector<int64_t>> coeff_;  // m x t
    std::vector<int64_t> const_;               // m
};

// local von Mangoldt on Z/qZ: q/phi(q) when gcd(a, q) = 1, else 0
double local_mangoldt(int64_t a, int64_t q);

// alpha_p = E( prod_i Lambda_{Z/pZ}(psi_i(x)) | x in (Z/pZ)^t ), computed by
// exhausting the p^t grid.  Throws budget_error when p^t exceeds the budget.
double alpha_p(const AffineSystem& system, int64_t p, int64_t budget = 100'000'000);

// Partial singular series prod_{p <= p_max} alpha_p with per-prime values.
struct LocalDensityReport {
    std::vector<std::pair<int64_t, double>> alpha_p_values;  // ascending p
    int64_t p_max = 0;
    double partial_product = 1.0;
    std::string tail_note;  // empirical convergence indicator
};
LocalDensityReport singular_series(const AffineSystem& system, int64_t p_max, int64_t budget = 100'000'000);

// Density at infinity: E( prod_i 1_{psi_i(x) > 0} | x in {1..N}^t ).
// Exact when N^t fits the budget, otherwise a seeded Monte Carlo estimate.
struct DensityAtInfinity {
    double value = 0.0;
    double std_error = 0.0;  // 0 when exact
    bool exact = true;
};
DensityAtInfinity alpha_infinity(const AffineSystem& system, int64_t n, int64_t sample_budget, uint64_t seed);

// tau(a) = prod over prime divisors p > w of |a| of (1 + 1/p); a != 0
double tau_weight(int64_t a, double w);

// (1/N) sum_{a<=N} tau(a)^q, via spf factorization when a table covering N
// is supplied, trial division otherwise
double tau_moment(int64_t n, double w, int q, const SieveTable* table = nullptr);

}  // namespace sievelab
