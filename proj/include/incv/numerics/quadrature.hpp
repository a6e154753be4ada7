#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <queue>
#include <string>
#include <type_traits>
#include <vector>

#include "incv/errors.hpp"

namespace incv::numerics {

/// Accuracy controls shared by the 1-D and 2-D integrators.
///
/// `truncation` is the half-width used when a caller integrates a
/// standard-normal-weighted function over the whole line or plane; the mass
/// of phi beyond 8 is below 1.3e-15.
struct QuadratureSpec {
    double abs_tol = 1e-9;
    double rel_tol = 1e-12;
    double truncation = 8.0;
    int max_subdivisions = 4000;
    int initial_panels = 4;  ///< per dimension

    void validate() const {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw InputError("QuadratureSpec: tolerances must be positive");
        if (!(truncation >= 6.0)) throw InputError("QuadratureSpec: truncation bound must be at least 6");
        if (max_subdivisions < 1 || initial_panels < 1) throw InputError("QuadratureSpec: panel counts must be positive");
    }

    static QuadratureSpec one_dim() { return {}; }
    static QuadratureSpec two_dim() { return {1e-8, 1e-12, 8.0, 4000, 4}; }
};

struct Box {
    double x_lo, x_hi, y_lo, y_hi;
};

// ---------------------------------------------------------------------------
// Value types: a scalar or a fixed-size array of reals.

template <class V>
struct QuadValue;

template <>
struct QuadValue<double> {
    static double zero() { return 0.0; }
    static double norm(double v) { return std::abs(v); }
    static bool finite(double v) { return std::isfinite(v); }
    static std::vector<double> flatten(double v) { return {v}; }
};

template <std::size_t N>
struct QuadValue<std::array<double, N>> {
    using V = std::array<double, N>;
    static V zero() { return V{}; }
    static double norm(const V& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    }
    static bool finite(const V& v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
    }
    static std::vector<double> flatten(const V& v) { return {v.begin(), v.end()}; }
};

template <class V>
concept Integrable = requires { QuadValue<V>::zero(); };

namespace detail {

template <class V>
void axpy(V& acc, double w, const V& v) {
    if constexpr (std::is_same_v<V, double>) {
        acc += w * v;
    } else {
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * v[i];
    }
}

template <class V>
V diff(const V& a, const V& b) {
    if constexpr (std::is_same_v<V, double>) {
        return a - b;
    } else {
        V r;
        for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
        return r;
    }
}

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
// Nodes in descending order; index 7 is the centre. Odd indices are Gauss nodes.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

/// Full 15-point node set on [-1, 1] with Kronrod and Gauss weights
/// (Gauss weight 0 on the Kronrod-only nodes).
struct Rule15 {
    std::array<double, 15> x{};
    std::array<double, 15> wk{};
    std::array<double, 15> wg{};
};

inline constexpr Rule15 make_rule15() {
    Rule15 r;
    for (int j = 0; j < 7; ++j) {
        r.x[j] = -kXgk[j];
        r.x[14 - j] = kXgk[j];
        r.wk[j] = r.wk[14 - j] = kWgk[j];
        const double g = (j % 2 == 1) ? kWg[j / 2] : 0.0;
        r.wg[j] = r.wg[14 - j] = g;
    }
    r.x[7] = 0.0;
    r.wk[7] = kWgk[7];
    r.wg[7] = kWg[3];
    return r;
}

inline constexpr Rule15 kRule15 = make_rule15();

template <class V>
struct Panel1 {
    double a, b;
    V value;
    double error;
    bool operator<(const Panel1& o) const { return error < o.error; }
};

template <class V, class F>
Panel1<V> gk15(const F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    V k = QuadValue<V>::zero();
    V g = QuadValue<V>::zero();
    for (int i = 0; i < 15; ++i) {
        const V v = f(c + h * kRule15.x[i]);
        axpy(k, h * kRule15.wk[i], v);
        if (kRule15.wg[i] != 0.0) axpy(g, h * kRule15.wg[i], v);
    }
    return {a, b, k, QuadValue<V>::norm(diff(k, g))};
}

template <class V>
struct Rect {
    Box box;
    V value;
    double error;
    bool split_x;
    bool operator<(const Rect& o) const { return error < o.error; }
};

// Tensor-product Kronrod rule on a rectangle. The error estimate compares the
// full K x K result against G x G; the split direction is whichever axis
// loses more accuracy when its Kronrod rule is replaced by the Gauss rule.
template <class V, class F>
Rect<V> gk15x15(const F& f, const Box& box) {
    const double cx = 0.5 * (box.x_lo + box.x_hi), hx = 0.5 * (box.x_hi - box.x_lo);
    const double cy = 0.5 * (box.y_lo + box.y_hi), hy = 0.5 * (box.y_hi - box.y_lo);
    V kk = QuadValue<V>::zero(), gg = QuadValue<V>::zero();
    V gk = QuadValue<V>::zero(), kg = QuadValue<V>::zero();
    for (int i = 0; i < 15; ++i) {
        const double x = cx + hx * kRule15.x[i];
        V row_k = QuadValue<V>::zero(), row_g = QuadValue<V>::zero();
        for (int j = 0; j < 15; ++j) {
            const V v = f(x, cy + hy * kRule15.x[j]);
            axpy(row_k, kRule15.wk[j], v);
            if (kRule15.wg[j] != 0.0) axpy(row_g, kRule15.wg[j], v);
        }
        axpy(kk, kRule15.wk[i], row_k);
        axpy(kg, kRule15.wk[i], row_g);
        if (kRule15.wg[i] != 0.0) {
            axpy(gk, kRule15.wg[i], row_k);
            axpy(gg, kRule15.wg[i], row_g);
        }
    }
    const double area = hx * hy;
    V value = QuadValue<V>::zero();
    axpy(value, area, kk);
    const double err = area * QuadValue<V>::norm(diff(kk, gg));
    const double err_x = QuadValue<V>::norm(diff(kk, gk));
    const double err_y = QuadValue<V>::norm(diff(kk, kg));
    return {box, value, err, err_x >= err_y};
}

template <class Queue, class V>
V sum_values(Queue q, double& total_err) {
    V s = QuadValue<V>::zero();
    total_err = 0.0;
    while (!q.empty()) {
        axpy(s, 1.0, q.top().value);
        total_err += q.top().error;
        q.pop();
    }
    return s;
}

} // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
///
/// f may return a double or a std::array<double, N>; for arrays the
/// tolerance applies to the largest component error. Throws QuadratureError
/// (with the partial estimate) when the subdivision budget is exhausted.
template <class F, class V = std::invoke_result_t<const F&, double>>
    requires Integrable<V>
V integrate_1d(const F& f, double a, double b, const QuadratureSpec& spec = QuadratureSpec::one_dim()) {
    spec.validate();
    if (!(a < b)) throw InputError("integrate_1d: requires a < b");

    std::priority_queue<detail::Panel1<V>> panels;
    V total = QuadValue<V>::zero();
    double total_err = 0.0;
    const int n0 = spec.initial_panels;
    for (int i = 0; i < n0; ++i) {
        const double lo = a + (b - a) * i / n0;
        const double hi = (i + 1 == n0) ? b : a + (b - a) * (i + 1) / n0;
        auto p = detail::gk15<V>(f, lo, hi);
        detail::axpy(total, 1.0, p.value);
        total_err += p.error;
        panels.push(p);
    }
    if (!QuadValue<V>::finite(total)) throw NumericalError("integrate_1d: integrand is not finite on the domain");

    int splits = 0;
    while (total_err > std::max(spec.abs_tol, spec.rel_tol * QuadValue<V>::norm(total))) {
        if (splits >= spec.max_subdivisions) {
            throw QuadratureError("integrate_1d: subdivision limit reached (error estimate " +
                                      std::to_string(total_err) + ")",
                                  QuadValue<V>::flatten(total), total_err);
        }
        const auto worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        auto left = detail::gk15<V>(f, worst.a, mid);
        auto right = detail::gk15<V>(f, mid, worst.b);
        detail::axpy(total, -1.0, worst.value);
        detail::axpy(total, 1.0, left.value);
        detail::axpy(total, 1.0, right.value);
        total_err += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++splits;
        // Incremental bookkeeping drifts; resynchronise now and then.
        if (splits % 64 == 0) total = detail::sum_values<decltype(panels), V>(panels, total_err);
    }
    return detail::sum_values<decltype(panels), V>(panels, total_err);
}

/// Globally adaptive cubature over a rectangle using the tensor-product
/// 15-point Kronrod rule, bisecting the worst rectangle along its worse axis.
template <class F, class V = std::invoke_result_t<const F&, double, double>>
    requires Integrable<V>
V integrate_2d(const F& f, const Box& box, const QuadratureSpec& spec = QuadratureSpec::two_dim()) {
    spec.validate();
    if (!(box.x_lo < box.x_hi) || !(box.y_lo < box.y_hi)) throw InputError("integrate_2d: degenerate box");

    std::priority_queue<detail::Rect<V>> rects;
    V total = QuadValue<V>::zero();
    double total_err = 0.0;
    const int n0 = spec.initial_panels;
    const double wx = (box.x_hi - box.x_lo) / n0, wy = (box.y_hi - box.y_lo) / n0;
    for (int i = 0; i < n0; ++i) {
        for (int j = 0; j < n0; ++j) {
            const Box b{box.x_lo + i * wx, i + 1 == n0 ? box.x_hi : box.x_lo + (i + 1) * wx,
                        box.y_lo + j * wy, j + 1 == n0 ? box.y_hi : box.y_lo + (j + 1) * wy};
            auto r = detail::gk15x15<V>(f, b);
            detail::axpy(total, 1.0, r.value);
            total_err += r.error;
            rects.push(r);
        }
    }
    if (!QuadValue<V>::finite(total)) throw NumericalError("integrate_2d: integrand is not finite on the domain");

    int splits = 0;
    while (total_err > std::max(spec.abs_tol, spec.rel_tol * QuadValue<V>::norm(total))) {
        if (splits >= spec.max_subdivisions) {
            throw QuadratureError("integrate_2d: subdivision limit reached (error estimate " +
                                      std::to_string(total_err) + ")",
                                  QuadValue<V>::flatten(total), total_err);
        }
        const auto worst = rects.top();
        rects.pop();
        Box lo = worst.box, hi = worst.box;
        if (worst.split_x) {
            lo.x_hi = hi.x_lo = 0.5 * (worst.box.x_lo + worst.box.x_hi);
        } else {
            lo.y_hi = hi.y_lo = 0.5 * (worst.box.y_lo + worst.box.y_hi);
        }
        auto r1 = detail::gk15x15<V>(f, lo);
        auto r2 = detail::gk15x15<V>(f, hi);
        detail::axpy(total, -1.0, worst.value);
        detail::axpy(total, 1.0, r1.value);
        detail::axpy(total, 1.0, r2.value);
        total_err += r1.error + r2.error - worst.error;
        rects.push(r1);
        rects.push(r2);
        ++splits;
        if (splits % 64 == 0) total = detail::sum_values<decltype(rects), V>(rects, total_err);
    }
    return detail::sum_values<decltype(rects), V>(rects, total_err);
}

/// Square box [-t, t]^2 for standard-normal-weighted integrands.
inline Box normal_box(const QuadratureSpec& spec) {
    return {-spec.truncation, spec.truncation, -spec.truncation, spec.truncation};
}

} // namespace incv::numerics
