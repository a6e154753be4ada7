#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "incv/errors.hpp"

namespace incv::numerics {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934;
inline constexpr double kInvSqrt2 = 0.707106781186547524400844362105;

inline double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

/// Standard normal CDF. erfc keeps full relative accuracy in the lower tail.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

/// Upper tail 1 - Phi(x), accurate where normal_cdf(x) rounds to 1.
inline double normal_sf(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

namespace detail {

template <std::size_t N>
double horner(double x, const std::array<double, N>& c) {
    double r = 0.0;
    for (double v : c) r = r * x + v;
    return r;
}

} // namespace detail

/// Inverse of the standard normal CDF.
///
/// Acklam's rational approximation (relative error ~1e-9) followed by one
/// Halley step against the erfc-based CDF, which brings the result to
/// double precision over the whole open interval.
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw InputError("normal_quantile: p must lie strictly inside (0, 1)");

    static constexpr std::array<double, 6> a = {-3.969683028665376e+01, 2.209460984245205e+02,
                                                -2.759285104469687e+02, 1.383577518672690e+02,
                                                -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr std::array<double, 6> b = {-5.447609879822406e+01, 1.615858368580409e+02,
                                                -1.556989798598866e+02, 6.680131188771972e+01,
                                                -1.328068155288572e+01, 1.0};
    static constexpr std::array<double, 6> c = {-7.784894002430293e-03, -3.223964580411365e-01,
                                                -2.400758277161838e+00, -2.549732539343734e+00,
                                                4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr std::array<double, 5> d = {7.784695709041462e-03, 3.224671290700398e-01,
                                                2.445134137142996e+00, 3.754408661907416e+00, 1.0};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = detail::horner(q, c) / detail::horner(q, d);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = q * detail::horner(r, a) / detail::horner(r, b);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -detail::horner(q, c) / detail::horner(q, d);
    }

    // Halley refinement. Work with the smaller tail so the residual keeps
    // its relative precision.
    const double e = (x <= 0.0) ? normal_cdf(x) - p : (1.0 - p) - normal_sf(x);
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

} // namespace incv::numerics
