#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace sievelab {

using cplx = std::complex<double>;

// A function Z/NZ -> C, indexed by n in [0, N).
struct ResidueFunction {
    int64_t modulus = 0;
    std::vector<cplx> values;

    ResidueFunction() = default;
    ResidueFunction(int64_t n, std::vector<cplx> v);

    static ResidueFunction zeros(int64_t n);
    static ResidueFunction constant(int64_t n, cplx c);

    cplx at(int64_t i) const {  // wraps mod N
        int64_t r = i % modulus;
        if (r < 0) r += modulus;
        return values[static_cast<size_t>(r)];
    }
    cplx mean() const;
    double max_abs() const;
    bool finite() const;  // no NaN/Inf
};

// Fourier coefficients under the 1/N-normalized convention
// fhat(xi) = E( f(n) e(-xi n / N) ).
struct SpectrumView {
    int64_t modulus = 0;
    std::vector<cplx> coefficients;
};

SpectrumView dft(const ResidueFunction& f);
ResidueFunction idft(const SpectrumView& s);  // f(n) = sum_xi fhat(xi) e(n xi / N)

// E( f(n) conj(g(n)) )
cplx inner_product(const ResidueFunction& f, const ResidueFunction& g);

// E( f0(a) f1(a+r) ... f_{k-1}(a+(k-1)r) | a, r in Z/NZ ) for 2 <= k <= 8.
// k = 3 goes through the spectral identity sum fhat(xi) ghat(-2xi) hhat(xi);
// every other k is the direct O(N^2) double loop (N capped at 2^13).
cplx ap_average(std::span<const ResidueFunction> fs);

// Gowers uniformity norm U^d for 1 <= d <= 4, via the recursive
// multiplicative-derivative expansion with FFT inner evaluation where the
// size makes the pure recursion too slow.  The value before the final
// 2^d-th root must be real and non-negative to 1e-9; larger deviations
// indicate a bug and throw.
double gowers_norm(const ResidueFunction& f, int d);

// Same value through pure nested derivative sums, no Fourier path at any
// level.  Slow; intended as the independent route for cross-checks.
double gowers_norm_direct(const ResidueFunction& f, int d);

// (sum_xi |fhat(xi)|^4)^(1/4), the spectral form of U^2
double gowers_u2_fourier(const ResidueFunction& f);

// Dual function D_d f for 1 <= d <= 3:
//   D_0 f = 1,  D_{d+1} f = E( D_d(f conj(T^h f)) T^h f | h ).
// Pairs with f through <f, D_{k-1} f> = ||f||_{U^{k-1}}^{2^{k-1}}.
ResidueFunction dual_function(const ResidueFunction& f, int d);

// Both sides of the quadratic-phase obstruction identity
//   E( f(a) e(-3a(a+r)^2 ...) ... ) = E( f(n) e(-alpha n^2) )
// with alpha = alpha_index / N, each computed by its own direct sum.
// Requires odd prime modulus.
std::pair<cplx, cplx> quadratic_obstruction_demo(const ResidueFunction& f, int64_t alpha_index);

// Generalized von Neumann inequality check for 1-bounded inputs:
// |ap_average| <= min_j ||f_j||_{U^{k-1}}.  Throws if the inequality
// fails beyond 1e-9 slack (that would contradict the theorem).
struct VonNeumannReport {
    double ap_magnitude = 0.0;
    double min_gowers = 0.0;
    double slack = 0.0;  // min_gowers - ap_magnitude
};
VonNeumannReport von_neumann_check(std::span<const ResidueFunction> fs);

bool is_prime_int(int64_t n);

}  // namespace sievelab
