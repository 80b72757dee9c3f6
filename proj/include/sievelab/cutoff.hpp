#pragma once

#include <cstdint>
#include <string>

namespace sievelab {

// Cutoff shapes for the truncated divisor sums.  Every kind is supported on
// [-1, 1] and evaluates to exactly 0.0 outside, so divisor sums may iterate
// all divisors and still agree bit-for-bit with a d <= R restriction.
enum class CutoffKind {
    triangle,             // max(1 - |x|, 0)
    smooth_unit,          // C-infinity bump scaled so phi(0) = 1, phi'(0) = 0
    smooth_l2normalized,  // same bump scaled so integral_0^1 phi'(x)^2 dx = 1
};

class CutoffFunction {
public:
    static CutoffFunction make(CutoffKind kind);
    static CutoffFunction make(const std::string& name);  // enum names as strings

    double operator()(double x) const;

    CutoffKind kind() const { return kind_; }
    double value_at_zero() const { return value_at_zero_; }
    double derivative_at_zero() const { return derivative_at_zero_; }  // NaN for triangle
    double l2_derivative_norm() const { return l2_derivative_norm_; }  // sqrt(int_0^1 phi'^2)

    std::string name() const;

private:
    explicit CutoffFunction(CutoffKind kind);

    CutoffKind kind_;
    double value_at_zero_;
    double derivative_at_zero_;
    double l2_derivative_norm_;
};

// integral_0^1 phi'(x)^2 dx for an arbitrary cutoff, by adaptive quadrature
// to 1e-8 absolute error (independent route used by tests)
double cutoff_l2_derivative_sq(const CutoffFunction& phi);

}  // namespace sievelab
