#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "incv/errors.hpp"
#include "incv/numerics/solver_report.hpp"

namespace incv::numerics {

using Vec = std::vector<double>;

struct SystemResult {
    Vec solution;
    SolverReport report;
};

struct NewtonOptions {
    int max_iterations = 100;
    int max_backtracks = 30;
    int max_restarts = 4;
    double fd_step = 1e-6;  ///< relative: h_i = fd_step * (1 + |x_i|)
};

namespace detail {

inline double inf_norm(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline bool all_finite(const Vec& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

} // namespace detail

/// Damped Newton iteration with a forward-difference Jacobian.
///
/// Solves g(v) = 0 for v in R^n to ||g||_inf <= tol. Steps are halved until
/// the residual norm decreases. A singular or non-finite Jacobian triggers a
/// deterministic perturbation of the current iterate (at most
/// `max_restarts` times); after that a SolverError is thrown. Never returns
/// a non-finite solution.
template <class G>
SystemResult solve_system(const G& g, Vec start, double tol, const NewtonOptions& opt = {}) {
    if (start.empty()) throw InputError("solve_system: empty start vector");
    if (!(tol > 0.0)) throw InputError("solve_system: tolerance must be positive");
    const std::size_t n = start.size();

    Vec x = std::move(start);
    Vec gx = g(x);
    if (gx.size() != n) throw InputError("solve_system: g must map R^n to R^n");
    if (!detail::all_finite(gx)) throw SolverError("solve_system: residual not finite at start", {false, 0, INFINITY});
    double norm = detail::inf_norm(gx);
    int restarts = 0;

    for (int iter = 0; iter < opt.max_iterations; ++iter) {
        if (norm <= tol) return {x, {true, iter, norm}};

        Eigen::MatrixXd jac(n, n);
        Eigen::VectorXd rhs(n);
        for (std::size_t i = 0; i < n; ++i) rhs(i) = -gx[i];
        bool jac_ok = true;
        for (std::size_t j = 0; j < n && jac_ok; ++j) {
            Vec xp = x;
            const double h = opt.fd_step * (1.0 + std::abs(x[j]));
            xp[j] += h;
            const Vec gp = g(xp);
            for (std::size_t i = 0; i < n; ++i) jac(i, j) = (gp[i] - gx[i]) / h;
            jac_ok = detail::all_finite(gp);
        }

        Eigen::FullPivLU<Eigen::MatrixXd> lu;
        if (jac_ok) {
            lu.compute(jac);
            lu.setThreshold(1e-12);
        }
        if (!jac_ok || !lu.isInvertible()) {
            if (restarts++ >= opt.max_restarts) {
                throw SolverError("solve_system: singular Jacobian", {false, iter, norm});
            }
            for (std::size_t i = 0; i < n; ++i) {
                x[i] += 1e-3 * (1.0 + std::abs(x[i])) * (i % 2 == 0 ? 1.0 : -1.0) * (restarts + 1);
            }
            gx = g(x);
            if (!detail::all_finite(gx)) throw SolverError("solve_system: residual not finite after perturbation", {false, iter, norm});
            norm = detail::inf_norm(gx);
            continue;
        }
        const Eigen::VectorXd step = lu.solve(rhs);

        double lambda = 1.0;
        bool accepted = false;
        for (int k = 0; k <= opt.max_backtracks; ++k, lambda *= 0.5) {
            Vec trial = x;
            for (std::size_t i = 0; i < n; ++i) trial[i] += lambda * step(i);
            Vec gt = g(trial);
            if (!detail::all_finite(gt)) continue;
            const double tn = detail::inf_norm(gt);
            if (tn < norm || tn <= tol) {
                x = std::move(trial);
                gx = std::move(gt);
                norm = tn;
                accepted = true;
                break;
            }
        }
        if (!accepted) throw SolverError("solve_system: line search failed to reduce the residual", {false, iter + 1, norm});
    }
    if (norm <= tol) return {x, {true, opt.max_iterations, norm}};
    throw SolverError("solve_system: iteration limit reached", {false, opt.max_iterations, norm});
}

} // namespace incv::numerics
