#include "sievelab/local_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "sievelab/errors.hpp"
#include "sievelab/parallel.hpp"
#include "sievelab/rng.hpp"

namespace sievelab {

namespace {

constexpr int kMaxVariables = 4;

// all 2x2 minors of the 2x(k) matrix (u; v) vanish <=> rows proportional
bool rows_proportional(std::span<const int64_t> u, std::span<const int64_t> v) {
    for (size_t s = 0; s < u.size(); ++s)
        for (size_t t = s + 1; t < u.size(); ++t)
            if (u[s] * v[t] - u[t] * v[s] != 0) return false;
    return true;
}

}  // namespace

AffineSystem::AffineSystem(std::vector<std::vector<int64_t>> coefficients, std::vector<int64_t> constants)
    : coeff_(std::move(coefficients)), const_(std::move(constants)) {
    if (coeff_.empty()) throw std::invalid_argument("AffineSystem: no forms");
    if (coeff_.size() != const_.size()) throw std::invalid_argument("AffineSystem: m mismatch between L and b");
    size_t t = coeff_[0].size();
    if (t == 0 || t > kMaxVariables) throw std::invalid_argument("AffineSystem: t must be in [1, 4]");
    for (const auto& row : coeff_) {
        if (row.size() != t) throw std::invalid_argument("AffineSystem: ragged coefficient matrix");
        if (std::all_of(row.begin(), row.end(), [](int64_t c) { return c == 0; }))
            throw std::invalid_argument("AffineSystem: constant form (zero linear part)");
    }
    // no two forms rational multiples of each other: minor test on (L_i, b_i)
    for (size_t i = 0; i < coeff_.size(); ++i) {
        for (size_t j = i + 1; j < coeff_.size(); ++j) {
            std::vector<int64_t> u = coeff_[i];
            u.push_back(const_[i]);
            std::vector<int64_t> v = coeff_[j];
            v.push_back(const_[j]);
            if (rows_proportional(u, v))
                throw std::invalid_argument("AffineSystem: forms " + std::to_string(i) + " and " +
                                            std::to_string(j) + " are rational multiples of each other");
        }
    }
}

int64_t AffineSystem::evaluate(int i, std::span<const int64_t> x) const {
    const auto& row = coeff_[static_cast<size_t>(i)];
    int64_t v = const_[static_cast<size_t>(i)];
    for (size_t j = 0; j < row.size(); ++j) v += row[j] * x[j];
    return v;
}

bool AffineSystem::linear_parts_pairwise_independent() const {
    for (size_t i = 0; i < coeff_.size(); ++i)
        for (size_t j = i + 1; j < coeff_.size(); ++j)
            if (rows_proportional(coeff_[i], coeff_[j])) return false;
    return true;
}

std::string AffineSystem::to_string() const {
    std::ostringstream out;
    for (int i = 0; i < m(); ++i) {
        if (i) out << "; ";
        bool first = true;
        for (int j = 0; j < t(); ++j) {
            int64_t c = coefficient(i, j);
            if (c == 0) continue;
            if (!first) out << (c > 0 ? "+" : "-");
            else if (c < 0) out << "-";
            int64_t a = std::abs(c);
            if (a != 1) out << a << "*";
            if (t() == 1) out << "x";
            else out << "x" << (j + 1);
            first = false;
        }
        int64_t b = constant(i);
        if (b != 0 || first) {
            if (!first && b >= 0) out << "+";
            out << b;
        }
    }
    return out.str();
}

namespace {

// recursive-descent parser for one affine expression
struct FormParser {
    const std::string& s;
    size_t pos = 0;

    explicit FormParser(const std::string& str) : s(str) {}

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    int64_t parse_integer() {
        skip_ws();
        size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start) throw std::invalid_argument("forms: expected integer near '" + s.substr(start) + "'");
        return std::stoll(s.substr(start, pos - start));
    }

    // returns variable index (0-based) or -1 for a pure constant term
    int parse_variable() {
        skip_ws();
        if (pos >= s.size() || s[pos] != 'x') return -1;
        ++pos;
        if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            int idx = s[pos] - '0';
            ++pos;
            if (idx < 1 || idx > kMaxVariables)
                throw std::invalid_argument("forms: variable index out of range (x1..x4)");
            return idx - 1;
        }
        return 0;  // bare "x" is x1
    }

    // term := [integer ['*']] [variable] | integer
    void parse_term(int sign, std::vector<int64_t>& coeff, int64_t& constant, int& max_var) {
        skip_ws();
        int64_t value = 1;
        bool saw_number = false;
        if (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            value = parse_integer();
            saw_number = true;
            eat('*');
        }
        int var = parse_variable();
        if (var < 0) {
            if (!saw_number) throw std::invalid_argument("forms: expected term near '" + s.substr(pos) + "'");
            constant += sign * value;
        } else {
            coeff[static_cast<size_t>(var)] += sign * value;
            max_var = std::max(max_var, var + 1);
        }
    }

    void parse_expression(std::vector<int64_t>& coeff, int64_t& constant, int& max_var) {
        int sign = 1;
        if (eat('-')) sign = -1;
        else eat('+');
        parse_term(sign, coeff, constant, max_var);
        for (;;) {
            skip_ws();
            if (eat('+')) sign = 1;
            else if (eat('-')) sign = -1;
            else break;
            parse_term(sign, coeff, constant, max_var);
        }
        skip_ws();
        if (pos != s.size()) throw std::invalid_argument("forms: trailing input '" + s.substr(pos) + "'");
    }
};

}  // namespace

AffineSystem AffineSystem::parse(const std::string& forms) {
    std::vector<std::vector<int64_t>> coeff;
    std::vector<int64_t> constants;
    int max_var = 0;
    std::stringstream ss(forms);
    std::string piece;
    while (std::getline(ss, piece, ';')) {
        if (piece.find_first_not_of(" \t") == std::string::npos) continue;
        std::vector<int64_t> row(kMaxVariables, 0);
        int64_t b = 0;
        FormParser parser(piece);
        parser.parse_expression(row, b, max_var);
        coeff.push_back(std::move(row));
        constants.push_back(b);
    }
    if (coeff.empty()) throw std::invalid_argument("forms: empty system");
    if (max_var == 0) max_var = 1;
    for (auto& row : coeff) row.resize(static_cast<size_t>(max_var));
    return AffineSystem(std::move(coeff), std::move(constants));
}

double local_mangoldt(int64_t a, int64_t q) {
    if (q < 1) throw std::invalid_argument("local_mangoldt: q must be >= 1");
    int64_t r = ((a % q) + q) % q;
    if (std::gcd(r, q) != 1) return 0.0;
    return static_cast<double>(q) / static_cast<double>(euler_totient(q));
}

double alpha_p(const AffineSystem& system, int64_t p, int64_t budget) {
    if (p < 2) throw std::invalid_argument("alpha_p: p must be prime");
    const int t = system.t();
    const int m = system.m();

    double points = std::pow(static_cast<double>(p), t);
    if (points > static_cast<double>(budget))
        throw budget_error("alpha_p: p^t = " + std::to_string(p) + "^" + std::to_string(t) +
                           " exceeds the evaluation budget of " + std::to_string(budget));

    // residues of coefficients and constants
    std::vector<std::vector<int64_t>> lmod(static_cast<size_t>(m), std::vector<int64_t>(static_cast<size_t>(t)));
    std::vector<int64_t> bmod(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < t; ++j) lmod[i][j] = ((system.coefficient(i, j) % p) + p) % p;
        bmod[i] = ((system.constant(i) % p) + p) % p;
    }

    // count x with every psi_i(x) != 0 mod p; parallel over the first
    // coordinate (integer counts, so reduction order is immaterial)
    auto count_slice = [&](int64_t x0_lo, int64_t x0_hi) -> int64_t {
        std::vector<int64_t> x(static_cast<size_t>(t), 0);
        std::vector<int64_t> val(static_cast<size_t>(m), 0);
        int64_t good = 0;
        for (int64_t x0 = x0_lo; x0 < x0_hi; ++x0) {
            x[0] = x0;
            // odometer over the remaining coordinates with incremental
            // updates along the last one
            std::fill(x.begin() + 1, x.end(), 0);
            for (;;) {
                for (int i = 0; i < m; ++i) {
                    int64_t v = bmod[i];
                    for (int j = 0; j < t; ++j) v += lmod[i][j] * x[static_cast<size_t>(j)];
                    val[i] = v % p;
                }
                // inner walk along the last coordinate
                int last = t - 1;
                for (int64_t step = 0;; ++step) {
                    bool ok = true;
                    for (int i = 0; i < m; ++i) {
                        if (val[i] == 0) {
                            ok = false;
                            break;
                        }
                    }
                    if (ok) ++good;
                    if (step + 1 >= p) break;
                    for (int i = 0; i < m; ++i) {
                        val[i] += lmod[i][static_cast<size_t>(last)];
                        if (val[i] >= p) val[i] -= p;
                    }
                }
                if (t == 1) break;
                // advance the odometer over coordinates 1..t-2
                int j = t - 2;
                while (j >= 1 && ++x[static_cast<size_t>(j)] == p) {
                    x[static_cast<size_t>(j)] = 0;
                    --j;
                }
                if (j < 1) break;
            }
            if (t == 1) break;
        }
        return good;
    };

    int64_t good;
    if (t == 1) {
        good = count_slice(0, 1);
    } else {
        good = par::reduce_chunked(
            int64_t{0}, p, std::max<int64_t>(1, p / 64), [&](int64_t a, int64_t b) { return count_slice(a, b); },
            int64_t{0});
    }

    double density = static_cast<double>(good) / points;
    return std::pow(static_cast<double>(p) / static_cast<double>(p - 1), m) * density;
}

LocalDensityReport singular_series(const AffineSystem& system, int64_t p_max, int64_t budget) {
    if (p_max < 2) throw std::invalid_argument("singular_series: p_max must be >= 2");
    LocalDensityReport report;
    report.p_max = p_max;
    for (int64_t p : primes_below(p_max + 1)) {
        double a = alpha_p(system, p, budget);
        report.alpha_p_values.emplace_back(p, a);
        report.partial_product *= a;
    }
    if (!report.alpha_p_values.empty()) {
        auto [p, a] = report.alpha_p_values.back();
        double dev = a > 0.0 ? std::abs(std::log(a)) : std::numeric_limits<double>::infinity();
        report.tail_note = "|log alpha_p| = " + std::to_string(dev) + " at p = " + std::to_string(p) +
                           " (empirical only; alpha_p = 1 + O(1/p^2))";
    }
    return report;
}

DensityAtInfinity alpha_infinity(const AffineSystem& system, int64_t n, int64_t sample_budget, uint64_t seed) {
    if (n < 1) throw std::invalid_argument("alpha_infinity: N must be >= 1");
    if (sample_budget < 1) throw std::invalid_argument("alpha_infinity: sample budget must be >= 1");
    const int t = system.t();
    const int m = system.m();

    double grid = std::pow(static_cast<double>(n), t);
    DensityAtInfinity out;
    std::vector<int64_t> x(static_cast<size_t>(t), 1);
    auto positive = [&]() {
        for (int i = 0; i < m; ++i)
            if (system.evaluate(i, x) <= 0) return false;
        return true;
    };

    if (grid <= static_cast<double>(sample_budget)) {
        int64_t good = 0;
        for (;;) {
            if (positive()) ++good;
            int j = t - 1;
            while (j >= 0 && ++x[static_cast<size_t>(j)] > n) {
                x[static_cast<size_t>(j)] = 1;
                --j;
            }
            if (j < 0) break;
        }
        out.value = static_cast<double>(good) / grid;
        out.exact = true;
        return out;
    }

    Rng rng(seed);
    int64_t good = 0;
    for (int64_t s = 0; s < sample_budget; ++s) {
        for (int j = 0; j < t; ++j) x[static_cast<size_t>(j)] = static_cast<int64_t>(rng.below(static_cast<uint64_t>(n))) + 1;
        if (positive()) ++good;
    }
    double phat = static_cast<double>(good) / static_cast<double>(sample_budget);
    out.value = phat;
    out.std_error = std::sqrt(std::max(phat * (1.0 - phat), 0.0) / static_cast<double>(sample_budget));
    out.exact = false;
    return out;
}

double tau_weight(int64_t a, double w) {
    if (a == 0) throw std::invalid_argument("tau_weight: a must be nonzero");
    int64_t n = std::abs(a);
    double result = 1.0;
    for (int64_t p = 2; p * p <= n; ++p) {
        if (n % p != 0) continue;
        if (static_cast<double>(p) > w) result *= 1.0 + 1.0 / static_cast<double>(p);
        while (n % p == 0) n /= p;
    }
    if (n > 1 && static_cast<double>(n) > w) result *= 1.0 + 1.0 / static_cast<double>(n);
    return result;
}

double tau_moment(int64_t n, double w, int q, const SieveTable* table) {
    if (n < 1) throw std::invalid_argument("tau_moment: N must be >= 1");
    if (q < 1) throw std::invalid_argument("tau_moment: q must be >= 1");
    double sum = par::reduce_chunked(
        int64_t{1}, n + 1, par::kDefaultChunk,
        [&](int64_t lo, int64_t hi) {
            double part = 0.0;
            for (int64_t a = lo; a < hi; ++a) {
                double tau;
                if (table && a <= table->n_max()) {
                    tau = 1.0;
                    int64_t v = a;
                    while (v > 1) {
                        int64_t p = table->spf(v);
                        if (static_cast<double>(p) > w) tau *= 1.0 + 1.0 / static_cast<double>(p);
                        while (v % p == 0) v /= p;
                    }
                } else {
                    tau = tau_weight(a, w);
                }
                part += std::pow(tau, q);
            }
            return part;
        },
        0.0);
    return sum / static_cast<double>(n);
}

}  // namespace sievelab
