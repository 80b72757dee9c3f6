#include "sievelab/cyclic_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sievelab/errors.hpp"
#include "sievelab/fft.hpp"
#include "sievelab/parallel.hpp"

namespace sievelab {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr int64_t kDirectApCap = int64_t{1} << 13;

void require_modulus(int64_t n) {
    if (n < 1) throw std::invalid_argument("ResidueFunction: modulus must be >= 1");
}

// multiplicative derivative (T^h f) conj(f)
ResidueFunction derivative(const ResidueFunction& f, int64_t h) {
    ResidueFunction g = ResidueFunction::zeros(f.modulus);
    for (int64_t n = 0; n < f.modulus; ++n)
        g.values[static_cast<size_t>(n)] = f.at(n + h) * std::conj(f.values[static_cast<size_t>(n)]);
    return g;
}

double u2_power_fourier(const ResidueFunction& f) {
    SpectrumView s = dft(f);
    double sum = 0.0;
    for (const cplx& c : s.coefficients) {
        double m2 = std::norm(c);
        sum += m2 * m2;
    }
    return sum;
}

// ||g||_{U^d}^{2^d} by the recursion P_1(g) = |E g|^2,
// P_{d+1}(g) = E_h P_d((T^h g) conj g)
double gowers_power_recursive(const ResidueFunction& g, int d) {
    if (d == 1) {
        return std::norm(g.mean());
    }
    double sum = 0.0;
    for (int64_t h = 0; h < g.modulus; ++h) sum += gowers_power_recursive(derivative(g, h), d - 1);
    return sum / static_cast<double>(g.modulus);
}

// production path for P_d with FFT at the U^2 layer once N is large
double gowers_power(const ResidueFunction& f, int d) {
    const int64_t n = f.modulus;
    switch (d) {
        case 1:
            return std::norm(f.mean());
        case 2:
            if (n <= 2048) return gowers_power_recursive(f, 2);
            return u2_power_fourier(f);
        case 3: {
            const bool fft_inner = n > 256;
            return par::reduce_chunked(
                int64_t{0}, n, std::max<int64_t>(1, n / 64),
                [&](int64_t lo, int64_t hi) {
                    double part = 0.0;
                    for (int64_t h = lo; h < hi; ++h) {
                        ResidueFunction g = derivative(f, h);
                        part += fft_inner ? u2_power_fourier(g) : gowers_power_recursive(g, 2);
                    }
                    return part;
                },
                0.0) /
                   static_cast<double>(n);
        }
        case 4: {
            if (n > 512)
                throw budget_error("gowers_norm: U^4 capped at N <= 512 (got N = " + std::to_string(n) + ")");
            double sum = 0.0;
            for (int64_t h = 0; h < n; ++h) sum += gowers_power(derivative(f, h), 3);
            return sum / static_cast<double>(n);
        }
        default:
            throw std::invalid_argument("gowers_norm: unsupported order d = " + std::to_string(d));
    }
}

double finish_root(double power, int d, const char* who) {
    // pre-root value is a 2^d-th norm power: real and non-negative
    if (power < -1e-9) throw std::logic_error(std::string(who) + ": pre-root average negative: " + std::to_string(power));
    if (power < 0.0) power = 0.0;
    return std::pow(power, 1.0 / static_cast<double>(int64_t{1} << d));
}

std::vector<cplx> roots_of_unity(int64_t n, int sign) {
    std::vector<cplx> w(static_cast<size_t>(n));
    for (int64_t k = 0; k < n; ++k) {
        double theta = sign * 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
        w[static_cast<size_t>(k)] = {std::cos(theta), std::sin(theta)};
    }
    return w;
}

}  // namespace

ResidueFunction::ResidueFunction(int64_t n, std::vector<cplx> v) : modulus(n), values(std::move(v)) {
    require_modulus(n);
    if (static_cast<int64_t>(values.size()) != n)
        throw std::invalid_argument("ResidueFunction: value count != modulus");
}

ResidueFunction ResidueFunction::zeros(int64_t n) {
    require_modulus(n);
    ResidueFunction f;
    f.modulus = n;
    f.values.assign(static_cast<size_t>(n), cplx{0.0, 0.0});
    return f;
}

ResidueFunction ResidueFunction::constant(int64_t n, cplx c) {
    ResidueFunction f = zeros(n);
    std::fill(f.values.begin(), f.values.end(), c);
    return f;
}

cplx ResidueFunction::mean() const {
    cplx sum{0.0, 0.0};
    for (const cplx& v : values) sum += v;
    return sum / static_cast<double>(modulus);
}

double ResidueFunction::max_abs() const {
    double m = 0.0;
    for (const cplx& v : values) m = std::max(m, std::abs(v));
    return m;
}

bool ResidueFunction::finite() const {
    for (const cplx& v : values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

SpectrumView dft(const ResidueFunction& f) {
    SpectrumView s;
    s.modulus = f.modulus;
    s.coefficients = f.values;
    fft::forward(s.coefficients);
    double inv = 1.0 / static_cast<double>(f.modulus);
    for (cplx& c : s.coefficients) c *= inv;
    return s;
}

ResidueFunction idft(const SpectrumView& s) {
    ResidueFunction f;
    f.modulus = s.modulus;
    f.values = s.coefficients;
    fft::backward(f.values);
    return f;
}

cplx inner_product(const ResidueFunction& f, const ResidueFunction& g) {
    if (f.modulus != g.modulus) throw std::invalid_argument("inner_product: modulus mismatch");
    cplx sum{0.0, 0.0};
    for (int64_t n = 0; n < f.modulus; ++n)
        sum += f.values[static_cast<size_t>(n)] * std::conj(g.values[static_cast<size_t>(n)]);
    return sum / static_cast<double>(f.modulus);
}

cplx ap_average(std::span<const ResidueFunction> fs) {
    size_t k = fs.size();
    if (k < 2 || k > 8) throw std::invalid_argument("ap_average: need 2 <= k <= 8 functions");
    int64_t n = fs[0].modulus;
    for (const auto& f : fs)
        if (f.modulus != n) throw std::invalid_argument("ap_average: modulus mismatch");

    if (k == 3) {
        // E(f(a) g(a+r) h(a+2r)) = sum_xi fhat(xi) ghat(-2xi) hhat(xi)
        SpectrumView fh = dft(fs[0]), gh = dft(fs[1]), hh = dft(fs[2]);
        cplx sum{0.0, 0.0};
        for (int64_t xi = 0; xi < n; ++xi) {
            int64_t m2 = ((-2 * xi) % n + n) % n;
            sum += fh.coefficients[static_cast<size_t>(xi)] * gh.coefficients[static_cast<size_t>(m2)] *
                   hh.coefficients[static_cast<size_t>(xi)];
        }
        return sum;
    }

    if (n > kDirectApCap)
        throw budget_error("ap_average: direct k != 3 evaluation capped at N <= 8192 (got N = " + std::to_string(n) +
                           ")");
    cplx total = par::reduce_chunked(
        int64_t{0}, n, std::max<int64_t>(1, n / 64),
        [&](int64_t lo, int64_t hi) {
            cplx part{0.0, 0.0};
            for (int64_t r = lo; r < hi; ++r) {
                for (int64_t a = 0; a < n; ++a) {
                    cplx prod = fs[0].values[static_cast<size_t>(a)];
                    int64_t pos = a;
                    for (size_t j = 1; j < k; ++j) {
                        pos += r;
                        if (pos >= n) pos -= n;
                        prod *= fs[j].values[static_cast<size_t>(pos)];
                    }
                    part += prod;
                }
            }
            return part;
        },
        cplx{0.0, 0.0});
    return total / (static_cast<double>(n) * static_cast<double>(n));
}

double gowers_norm(const ResidueFunction& f, int d) {
    if (d < 1 || d > 4) throw std::invalid_argument("gowers_norm: unsupported order d = " + std::to_string(d));
    if (d == 1) return std::abs(f.mean());
    return finish_root(gowers_power(f, d), d, "gowers_norm");
}

double gowers_norm_direct(const ResidueFunction& f, int d) {
    if (d < 1 || d > 4) throw std::invalid_argument("gowers_norm_direct: unsupported order d = " + std::to_string(d));
    static constexpr int64_t caps[5] = {0, int64_t{1} << 20, 8192, 512, 64};
    if (f.modulus > caps[d])
        throw budget_error("gowers_norm_direct: N = " + std::to_string(f.modulus) + " too large for the O(N^" +
                           std::to_string(d) + ") nested sums");
    if (d == 1) return std::abs(f.mean());
    return finish_root(gowers_power_recursive(f, d), d, "gowers_norm_direct");
}

double gowers_u2_fourier(const ResidueFunction& f) { return std::pow(u2_power_fourier(f), 0.25); }

ResidueFunction dual_function(const ResidueFunction& f, int d) {
    if (d < 1 || d > 3) throw std::invalid_argument("dual_function: unsupported order d = " + std::to_string(d));
    const int64_t n = f.modulus;

    if (d == 1) return ResidueFunction::constant(n, f.mean());

    if (d == 2) {
        // D_2 f(n) = sum_xi |fhat(xi)|^2 fhat(xi) e(n xi / N)
        SpectrumView s = dft(f);
        for (cplx& c : s.coefficients) c *= std::norm(c);
        return idft(s);
    }

    // D_3 f = E_h( D_2(f conj(T^h f)) T^h f )
    struct VecSum {
        std::vector<cplx> v;
        VecSum operator+(const VecSum& o) const {
            if (v.empty()) return o;
            if (o.v.empty()) return *this;
            VecSum out = *this;
            for (size_t i = 0; i < v.size(); ++i) out.v[i] += o.v[i];
            return out;
        }
    };
    VecSum total = par::reduce_chunked(
        int64_t{0}, n, std::max<int64_t>(1, n / 64),
        [&](int64_t lo, int64_t hi) {
            VecSum part;
            part.v.assign(static_cast<size_t>(n), cplx{0.0, 0.0});
            ResidueFunction g = ResidueFunction::zeros(n);
            for (int64_t h = lo; h < hi; ++h) {
                for (int64_t m = 0; m < n; ++m)
                    g.values[static_cast<size_t>(m)] = f.values[static_cast<size_t>(m)] * std::conj(f.at(m + h));
                ResidueFunction d2 = dual_function(g, 2);
                for (int64_t m = 0; m < n; ++m)
                    part.v[static_cast<size_t>(m)] += d2.values[static_cast<size_t>(m)] * f.at(m + h);
            }
            return part;
        },
        VecSum{});
    ResidueFunction out = ResidueFunction::zeros(n);
    for (int64_t m = 0; m < n; ++m) out.values[static_cast<size_t>(m)] = total.v[static_cast<size_t>(m)] / static_cast<double>(n);
    return out;
}

bool is_prime_int(int64_t n) {
    if (n < 2) return false;
    for (int64_t p = 2; p * p <= n; ++p)
        if (n % p == 0) return false;
    return true;
}

std::pair<cplx, cplx> quadratic_obstruction_demo(const ResidueFunction& f, int64_t alpha_index) {
    const int64_t n = f.modulus;
    if (n % 2 == 0 || !is_prime_int(n))
        throw std::invalid_argument("quadratic_obstruction_demo: modulus must be an odd prime");
    int64_t idx = ((alpha_index % n) + n) % n;
    const auto w = roots_of_unity(n, +1);
    auto phase = [&](int64_t coeff, int64_t value) {  // e(coeff * alpha * value^2), exact integer phase
        int64_t v = ((value % n) + n) % n;
        int64_t sq = (v * v) % n;
        int64_t e = (((coeff % n) * ((sq * idx) % n)) % n + n) % n;
        return w[static_cast<size_t>(e)];
    };

    cplx lhs = par::reduce_chunked(
        int64_t{0}, n, std::max<int64_t>(1, n / 64),
        [&](int64_t lo, int64_t hi) {
            cplx part{0.0, 0.0};
            for (int64_t a = lo; a < hi; ++a) {
                for (int64_t r = 0; r < n; ++r) {
                    cplx term = f.values[static_cast<size_t>(a)];
                    term *= phase(-3, a + r);
                    term *= phase(3, a + 2 * r);
                    term *= phase(-1, a + 3 * r);
                    part += term;
                }
            }
            return part;
        },
        cplx{0.0, 0.0});
    lhs /= static_cast<double>(n) * static_cast<double>(n);

    cplx rhs{0.0, 0.0};
    for (int64_t m = 0; m < n; ++m) rhs += f.values[static_cast<size_t>(m)] * phase(-1, m);
    rhs /= static_cast<double>(n);

    return {lhs, rhs};
}

VonNeumannReport von_neumann_check(std::span<const ResidueFunction> fs) {
    size_t k = fs.size();
    if (k < 3 || k > 5) throw std::invalid_argument("von_neumann_check: need 3 <= k <= 5 functions");
    int64_t n = fs[0].modulus;
    if (n < static_cast<int64_t>(k) - 1 || !is_prime_int(n))
        throw std::invalid_argument("von_neumann_check: modulus must be a prime >= k-1");
    for (const auto& f : fs) {
        if (f.modulus != n) throw std::invalid_argument("von_neumann_check: modulus mismatch");
        if (f.max_abs() > 1.0 + 1e-12)
            throw std::invalid_argument("von_neumann_check: inputs must be bounded by 1 in magnitude");
    }

    VonNeumannReport rep;
    rep.ap_magnitude = std::abs(ap_average(fs));
    rep.min_gowers = gowers_norm(fs[0], static_cast<int>(k) - 1);
    for (size_t j = 1; j < k; ++j) rep.min_gowers = std::min(rep.min_gowers, gowers_norm(fs[j], static_cast<int>(k) - 1));
    rep.slack = rep.min_gowers - rep.ap_magnitude;
    if (rep.slack < -1e-9)
        throw std::logic_error("von_neumann_check: inequality violated, slack = " + std::to_string(rep.slack));
    return rep;
}

}  // namespace sievelab
