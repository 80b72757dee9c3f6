#include "sievelab/cutoff.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sievelab {

namespace {

// Divisor sums only see x = log d / log R >= 0, and the mean of the
// truncated sum converges to -phi'(0+), not to phi(0) (write the main term
// as (1 - d/dx)(e^x phi(x))|_0 = -phi'(0) and check against the classical
// triangle value 1).  The shapes below are calibrated accordingly:
//
//   smooth_unit        (1-x) carried by a C-infinity plateau taper:
//                      phi(0) = 1, phi'(0) = -1, so the truncated mean
//                      tends to 1.
//   smooth_l2norm...   (2 sqrt 2 / 3) (1-x)^(3/2) (left-tapered), the
//                      exact unit-L2-derivative normalization demanded by
//                      the enveloping-sieve mean; the convex profile keeps
//                      the finite-R mean close to its limit at small R.

constexpr double kTaperStart = 0.7;
const double kPowerScale = 2.0 * std::sqrt(2.0) / 3.0;  // (int_0^1 |phi'|^2)^{-1/2} for (1-x)^(3/2)

// C-infinity descent from 1 (t <= 0) to 0 (t >= 1)
double smoothstep_down(double t) {
    if (t <= 0.0) return 1.0;
    if (t >= 1.0) return 0.0;
    double e0 = std::exp(-1.0 / t);
    double e1 = std::exp(-1.0 / (1.0 - t));
    return e1 / (e0 + e1);
}

double taper(double t) { return smoothstep_down((t - kTaperStart) / (1.0 - kTaperStart)); }

double smooth_unit_shape(double x) {
    if (x <= -1.0 || x >= 1.0) return 0.0;
    return (1.0 - x) * taper(x) * taper(-x);
}

double power_shape(double x) {
    if (x <= -1.0 || x >= 1.0) return 0.0;
    return kPowerScale * std::pow(1.0 - x, 1.5) * taper(-x);
}

}  // namespace

CutoffFunction::CutoffFunction(CutoffKind kind) : kind_(kind) {
    switch (kind_) {
        case CutoffKind::triangle:
            value_at_zero_ = 1.0;
            derivative_at_zero_ = std::numeric_limits<double>::quiet_NaN();  // kink at 0
            l2_derivative_norm_ = 1.0;                                       // phi' = -1 on (0,1)
            break;
        case CutoffKind::smooth_unit: {
            value_at_zero_ = 1.0;
            derivative_at_zero_ = -1.0;
            static const double unit_norm = [] {
                auto dphi_sq = [](double x) {
                    const double h = 1e-6;
                    double d = (smooth_unit_shape(x + h) - smooth_unit_shape(x - h)) / (2.0 * h);
                    return d * d;
                };
                return std::sqrt(
                    boost::math::quadrature::gauss_kronrod<double, 31>::integrate(dphi_sq, 0.0, 1.0, 15, 1e-9));
            }();
            l2_derivative_norm_ = unit_norm;
            break;
        }
        case CutoffKind::smooth_l2normalized:
            value_at_zero_ = kPowerScale;
            derivative_at_zero_ = -1.5 * kPowerScale;
            l2_derivative_norm_ = 1.0;  // closed form: scale^2 * 9/8 = 1
            break;
    }
}

CutoffFunction CutoffFunction::make(CutoffKind kind) { return CutoffFunction(kind); }

CutoffFunction CutoffFunction::make(const std::string& name) {
    if (name == "triangle") return make(CutoffKind::triangle);
    if (name == "smooth_unit") return make(CutoffKind::smooth_unit);
    if (name == "smooth_l2normalized") return make(CutoffKind::smooth_l2normalized);
    throw std::invalid_argument("CutoffFunction: unknown kind '" + name + "'");
}

double CutoffFunction::operator()(double x) const {
    switch (kind_) {
        case CutoffKind::triangle: {
            double v = 1.0 - std::abs(x);
            return v > 0.0 ? v : 0.0;
        }
        case CutoffKind::smooth_unit:
            return smooth_unit_shape(x);
        case CutoffKind::smooth_l2normalized:
            return power_shape(x);
    }
    return 0.0;
}

std::string CutoffFunction::name() const {
    switch (kind_) {
        case CutoffKind::triangle:
            return "triangle";
        case CutoffKind::smooth_unit:
            return "smooth_unit";
        case CutoffKind::smooth_l2normalized:
            return "smooth_l2normalized";
    }
    return "?";
}

double cutoff_l2_derivative_sq(const CutoffFunction& phi) {
    // central differences + adaptive quadrature: no analytic derivative, so
    // this can serve as an independent cross-check of the stored norms
    auto dphi_sq = [&](double x) {
        const double h = 1e-6;
        double d = (phi(x + h) - phi(x - h)) / (2.0 * h);
        return d * d;
    };
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(dphi_sq, 0.0, 1.0, 15, 1e-9);
}

}  // namespace sievelab
