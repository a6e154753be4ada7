#pragma once

#include <cmath>
#include <limits>
#include <utility>

#include "incv/errors.hpp"
#include "incv/numerics/solver_report.hpp"

namespace incv::numerics {

struct RootResult {
    double root;
    SolverReport report;
};

/// Brent's method on a sign-changing bracket.
///
/// Stops when |f(root)| <= tol or the bracket has shrunk below tol.
/// A bracket without a sign change is an InputError.
template <class F>
RootResult find_root(const F& f, double lo, double hi, double tol = 1e-12, int max_iter = 200) {
    if (!(lo < hi)) throw InputError("find_root: bracket must satisfy lo < hi");
    if (!(tol > 0.0)) throw InputError("find_root: tolerance must be positive");

    double a = lo, b = hi;
    double fa = f(a), fb = f(b);
    if (!std::isfinite(fa) || !std::isfinite(fb)) throw NumericalError("find_root: function not finite at bracket ends");
    if (fa == 0.0) return {a, {true, 0, 0.0}};
    if (fb == 0.0) return {b, {true, 0, 0.0}};
    if ((fa > 0.0) == (fb > 0.0)) throw InputError("find_root: no sign change in bracket");

    double c = a, fc = fa;
    double d = b - a, e = d;
    constexpr double eps = std::numeric_limits<double>::epsilon();

    for (int iter = 1; iter <= max_iter; ++iter) {
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol1 = 2.0 * eps * std::abs(b) + 0.5 * tol;
        const double m = 0.5 * (c - b);
        if (std::abs(fb) <= tol || std::abs(m) <= tol1 || fb == 0.0) {
            return {b, {true, iter, std::abs(fb)}};
        }
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            // Inverse quadratic interpolation, or secant when only two points differ.
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                const double qa = fa / fc, r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * m * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol1) ? d : (m > 0.0 ? tol1 : -tol1);
        fb = f(b);
        if (!std::isfinite(fb)) throw NumericalError("find_root: function not finite inside bracket");
    }
    throw SolverError("find_root: iteration limit reached", {false, max_iter, std::abs(fb)});
}

} // namespace incv::numerics
