#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "incv/distributions.hpp"
#include "incv/errors.hpp"
#include "incv/numerics/quadrature.hpp"

namespace incv::analytic {

using numerics::QuadratureSpec;

inline QuadratureSpec default_spec() { return {1e-10, 1e-12, 8.0, 4000, 8}; }

/// Precision among subjects scoring above c:
/// pi S1 / (pi S1 + (1 - pi) S0), written as [1 + k S0/S1]^{-1}.
inline double ppv_from_tails(double pi, double event_sf, double nonevent_sf) {
    const double num = pi * event_sf;
    const double den = num + (1.0 - pi) * nonevent_sf;
    return den > 0.0 ? num / den : 0.0;
}

// ---------------------------------------------------------------------------
// AUC

/// AUC = integral of F0(c) dF1(c) over the score axis.
inline double auc(const ScoreDistributionPair& d, const QuadratureSpec& spec = default_spec()) {
    const auto s = d.support();
    return numerics::integrate_1d([&](double c) { return d.nonevent_cdf(c) * d.event_pdf(c); }, s.lo, s.hi, spec);
}

/// AUC = integral over alpha in (0, 1) of F0(q_alpha).
inline double auc_alpha_domain(const ScoreDistributionPair& d, const QuadratureSpec& spec = default_spec()) {
    return numerics::integrate_1d([&](double a) { return d.nonevent_cdf(d.event_quantile(a)); }, 0.0, 1.0, spec);
}

// ---------------------------------------------------------------------------
// AP

/// AP as the expected PPV at an event's own score, integrated over the
/// score axis against f1. Integration stops at `c_max` when given.
inline double ap(const ScoreDistributionPair& d, const QuadratureSpec& spec = default_spec(),
                 double c_max = INFINITY) {
    const auto s = d.support();
    const double pi = d.event_rate();
    const double hi = std::min(s.hi, c_max);
    return numerics::integrate_1d(
        [&](double c) { return ppv_from_tails(pi, d.event_sf(c), d.nonevent_sf(c)) * d.event_pdf(c); }, s.lo, hi,
        spec);
}

/// AP = integral over alpha of {1 + (1/pi - 1)/(1 - alpha) [1 - F0(q_alpha)]}^{-1}.
inline double ap_alpha_domain(const ScoreDistributionPair& d, const QuadratureSpec& spec = default_spec(),
                              double alpha_max = 1.0) {
    const double k = 1.0 / d.event_rate() - 1.0;
    return numerics::integrate_1d(
        [&](double a) {
            const double s0 = d.nonevent_sf(d.event_quantile(a));
            return 1.0 / (1.0 + k / (1.0 - a) * s0);
        },
        0.0, alpha_max, spec);
}

// ---------------------------------------------------------------------------
// Incremental value decomposition

/// Delta(alpha) = F_new0(q_new,alpha) - F_old0(q_old,alpha), computed as a
/// difference of survival functions so it stays accurate as alpha -> 1.
inline double delta_alpha(const ScoreDistributionPair& old_d, const ScoreDistributionPair& new_d, double alpha) {
    return old_d.nonevent_sf(old_d.event_quantile(alpha)) - new_d.nonevent_sf(new_d.event_quantile(alpha));
}

inline double ap_weight(const ScoreDistributionPair& old_d, const ScoreDistributionPair& new_d, double alpha) {
    const double k = 1.0 / old_d.event_rate() - 1.0;
    const double u = k / (1.0 - alpha);
    const double s_new = new_d.nonevent_sf(new_d.event_quantile(alpha));
    const double s_old = old_d.nonevent_sf(old_d.event_quantile(alpha));
    return u / ((1.0 + u * s_new) * (1.0 + u * s_old));
}

struct AnalyticIncV {
    double delta_auc = 0.0;
    double delta_ap = 0.0;
    std::vector<double> alpha;
    std::vector<double> delta;     ///< Delta(alpha)
    std::vector<double> ap_weight; ///< w_AP(alpha)
    std::vector<double> weighted;  ///< w_AP(alpha) * Delta(alpha)
};

namespace detail {

inline void require_same_rate(const ScoreDistributionPair& a, const ScoreDistributionPair& b) {
    if (std::abs(a.event_rate() - b.event_rate()) > 1e-12) {
        throw InputError("incremental value needs both score distributions at the same event rate");
    }
}

} // namespace detail

/// Trapezoid integral of a curve tabulated on an interior alpha grid, with
/// the end values held constant out to alpha = 0 and alpha = 1.
inline double integrate_on_grid(std::span<const double> alpha, std::span<const double> y) {
    if (alpha.empty() || alpha.size() != y.size()) throw InputError("integrate_on_grid: size mismatch");
    double s = alpha.front() * y.front() + (1.0 - alpha.back()) * y.back();
    for (std::size_t i = 0; i + 1 < alpha.size(); ++i) s += 0.5 * (alpha[i + 1] - alpha[i]) * (y[i] + y[i + 1]);
    return s;
}

/// Delta AUC and Delta AP from the metric integrals, plus Delta(alpha),
/// w_AP(alpha) and their product tabulated on `grid`.
inline AnalyticIncV incv(const ScoreDistributionPair& old_d, const ScoreDistributionPair& new_d,
                         std::span<const double> grid, const QuadratureSpec& spec = default_spec()) {
    detail::require_same_rate(old_d, new_d);
    AnalyticIncV r;
    r.delta_auc = auc(new_d, spec) - auc(old_d, spec);
    r.delta_ap = ap(new_d, spec) - ap(old_d, spec);
    r.alpha.assign(grid.begin(), grid.end());
    for (double a : grid) {
        if (!(a > 0.0 && a < 1.0)) throw InputError("alpha grid must lie strictly inside (0, 1)");
        const double dl = delta_alpha(old_d, new_d, a);
        const double w = ap_weight(old_d, new_d, a);
        r.delta.push_back(dl);
        r.ap_weight.push_back(w);
        r.weighted.push_back(w * dl);
    }
    return r;
}

enum class Weight { Auc, Ap };

/// Integral over (0, 1) of w(alpha) Delta(alpha), with w = 1 for AUC and
/// w = w_AP for AP. Reproduces the metric differences.
inline double weighted_delta_integral(const ScoreDistributionPair& old_d, const ScoreDistributionPair& new_d, Weight w,
                                      const QuadratureSpec& spec = default_spec()) {
    detail::require_same_rate(old_d, new_d);
    return numerics::integrate_1d(
        [&](double a) {
            const double dl = delta_alpha(old_d, new_d, a);
            return w == Weight::Auc ? dl : ap_weight(old_d, new_d, a) * dl;
        },
        0.0, 1.0, spec);
}

// ---------------------------------------------------------------------------
// Brier score

/// BrS from the covariate-plane form
/// E{pi(X,Y)[1 - pi(X,Y)]} + E{[pi(X,Y) - p(X,Y)]^2} for independent
/// standard normal covariates.
template <class TrueRisk, class WorkingRisk>
double brier_covariate_form(const TrueRisk& true_risk, const WorkingRisk& working_risk,
                            const QuadratureSpec& spec = QuadratureSpec::two_dim()) {
    return numerics::integrate_2d(
        [&](double x, double y) {
            const double t = true_risk(x, y);
            const double p = working_risk(x, y);
            return (t * (1.0 - t) + (t - p) * (t - p)) * numerics::normal_pdf(x) * numerics::normal_pdf(y);
        },
        numerics::normal_box(spec), spec);
}

/// BrS from the outcome-conditional form
/// pi E{[1 - p]^2 | D=1} + (1 - pi) E{p^2 | D=0},
/// where the working risk p is a function of the score.
template <class RiskOfScore>
double brier_conditional_form(const ScoreDistributionPair& d, const RiskOfScore& risk,
                              const QuadratureSpec& spec = default_spec()) {
    const auto s = d.support();
    const double pi = d.event_rate();
    return numerics::integrate_1d(
        [&](double c) {
            const double p = risk(c);
            return pi * (1.0 - p) * (1.0 - p) * d.event_pdf(c) + (1.0 - pi) * p * p * d.nonevent_pdf(c);
        },
        s.lo, s.hi, spec);
}

inline double scaled_brier(double brier, double pi) {
    if (!(pi > 0.0 && pi < 1.0)) throw InputError("scaled Brier needs an event rate in (0, 1)");
    return 1.0 - brier / (pi * (1.0 - pi));
}

} // namespace incv::analytic
