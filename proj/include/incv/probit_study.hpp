#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "incv/analytic.hpp"
#include "incv/distributions.hpp"
#include "incv/errors.hpp"
#include "incv/numerics/newton.hpp"
#include "incv/numerics/normal.hpp"
#include "incv/numerics/quadrature.hpp"
#include "incv/numerics/roots.hpp"

// Population-level probit study: two independent standard normal markers X
// and Y, outcome D ~ Bernoulli(Phi(b0 + b1 X + b2 Y + b3 X Y)), and two
// misspecified probit working models (X only; X and Y additively) fitted by
// their limiting estimating equations. Every quantity here is a population
// value; nothing is estimated from samples.

namespace incv::probit {

using numerics::normal_cdf;
using numerics::normal_pdf;
using numerics::normal_sf;
using numerics::QuadratureSpec;

/// Numerical settings for one scenario.
struct StudySettings {
    QuadratureSpec event_rate{1e-14, 1e-13, 8.0, 4000, 8};
    QuadratureSpec estimating_equation{1e-11, 1e-12, 8.0, 4000, 4};
    QuadratureSpec one_marker_equation{1e-13, 1e-13, 8.0, 4000, 8};
    QuadratureSpec density{1e-13, 1e-10, 8.0, 4000, 4};
    QuadratureSpec brier{1e-11, 1e-12, 8.0, 4000, 4};
    QuadratureSpec metrics = analytic::default_spec();
    double beta0_tol = 1e-13;
    double ee_tol = 1e-9;
    int density_nodes = 2001;
};

/// (beta1, beta2, beta3, pi) with the intercept beta0 solved so that
/// Pr(D = 1) = pi.
struct ScenarioSpec {
    double beta1 = 0.0;
    double beta2 = 0.0;
    double beta3 = 0.0;
    double pi = 0.5;
    double beta0 = std::numeric_limits<double>::quiet_NaN();

    double linear_predictor(double x, double y) const { return beta0 + beta1 * x + beta2 * y + beta3 * x * y; }
};

inline double true_risk(double x, double y, const ScenarioSpec& s) { return normal_cdf(s.linear_predictor(x, y)); }

/// E_Y[Phi(a + b Y)] = Phi(a / sqrt(1 + b^2)) for Y standard normal: the
/// true risk averaged over Y at fixed X = x.
inline double risk_given_x(double x, const ScenarioSpec& s) {
    const double b = s.beta2 + s.beta3 * x;
    return normal_cdf((s.beta0 + s.beta1 * x) / std::sqrt(1.0 + b * b));
}
inline double nonrisk_given_x(double x, const ScenarioSpec& s) {
    const double b = s.beta2 + s.beta3 * x;
    return normal_sf((s.beta0 + s.beta1 * x) / std::sqrt(1.0 + b * b));
}

/// Marginal Pr(D = 1), reduced to a single integral over X.
inline double event_rate(const ScenarioSpec& s, const QuadratureSpec& q = StudySettings{}.event_rate) {
    const double t = q.truncation;
    return numerics::integrate_1d([&](double x) { return risk_given_x(x, s) * normal_pdf(x); }, -t, t, q);
}

/// Marginal Pr(D = 1) as the double integral over the covariate plane.
inline double event_rate_2d(const ScenarioSpec& s, const QuadratureSpec& q = QuadratureSpec::two_dim()) {
    return numerics::integrate_2d(
        [&](double x, double y) { return true_risk(x, y, s) * normal_pdf(x) * normal_pdf(y); },
        numerics::normal_box(q), q);
}

/// Intercept that calibrates the true model to event rate pi.
inline double solve_beta0(double beta1, double beta2, double beta3, double pi, const StudySettings& st = {}) {
    if (!(pi > 0.0 && pi < 1.0)) throw InputError("event rate pi must lie strictly inside (0, 1)");
    ScenarioSpec s{beta1, beta2, beta3, pi, 0.0};
    auto f = [&](double b0) {
        s.beta0 = b0;
        return event_rate(s, st.event_rate) - pi;
    };
    if (f(-10.0) > 0.0 || f(10.0) < 0.0) throw NumericalError("solve_beta0: root not bracketed by [-10, 10]");
    return numerics::find_root(f, -10.0, 10.0, st.beta0_tol).root;
}

inline ScenarioSpec make_scenario(double beta1, double beta2, double beta3, double pi, const StudySettings& st = {}) {
    for (double b : {beta1, beta2, beta3}) {
        if (!std::isfinite(b)) throw InputError("scenario coefficients must be finite");
    }
    return {beta1, beta2, beta3, pi, solve_beta0(beta1, beta2, beta3, pi, st)};
}

// ---------------------------------------------------------------------------
// Working models

enum class WorkingModel { OneMarker, TwoMarker };

inline const char* to_string(WorkingModel m) { return m == WorkingModel::OneMarker ? "one-marker" : "two-marker"; }

struct WorkingModelFit {
    WorkingModel kind = WorkingModel::OneMarker;
    std::vector<double> gamma;  ///< (g0, g1) or (g0, g1, g2)
    numerics::SolverReport report;

    double score(double x, double y) const {
        return gamma[0] + gamma[1] * x + (gamma.size() > 2 ? gamma[2] * y : 0.0);
    }
    double risk(double x, double y) const { return normal_cdf(score(x, y)); }
};

namespace detail {

/// phi(t) / (Phi(t) (1 - Phi(t))), the probit score weight.
inline double probit_weight(double t) { return normal_pdf(t) / (normal_cdf(t) * normal_sf(t)); }

/// Phi(eta) - Phi(t), evaluated on the tail that keeps precision.
inline double phi_difference(double eta, double t) {
    return t > 0.0 ? normal_sf(t) - normal_sf(eta) : normal_cdf(eta) - normal_cdf(t);
}

} // namespace detail

/// Population estimating function E{U w(g'U) [D - Phi(g'U)]}.
///
/// For the one-marker model the expectation over Y is done in closed form;
/// the two-marker model integrates over the covariate plane.
inline std::vector<double> estimating_equation(WorkingModel kind, const std::vector<double>& gamma,
                                               const ScenarioSpec& s, const StudySettings& st = {}) {
    if (kind == WorkingModel::OneMarker) {
        if (gamma.size() != 2) throw InputError("one-marker model has two coefficients");
        const auto& q = st.one_marker_equation;
        const auto v = numerics::integrate_1d(
            [&](double x) {
                const double t = gamma[0] + gamma[1] * x;
                const double m = risk_given_x(x, s);
                const double diff = t > 0.0 ? normal_sf(t) - nonrisk_given_x(x, s) : m - normal_cdf(t);
                const double c = detail::probit_weight(t) * diff * normal_pdf(x);
                return std::array<double, 2>{c, c * x};
            },
            -q.truncation, q.truncation, q);
        return {v[0], v[1]};
    }
    if (gamma.size() != 3) throw InputError("two-marker model has three coefficients");
    const auto& q = st.estimating_equation;
    const auto v = numerics::integrate_2d(
        [&](double x, double y) {
            const double t = gamma[0] + gamma[1] * x + gamma[2] * y;
            const double c = detail::probit_weight(t) * detail::phi_difference(s.linear_predictor(x, y), t) *
                             normal_pdf(x) * normal_pdf(y);
            return std::array<double, 3>{c, c * x, c * y};
        },
        numerics::normal_box(q), q);
    return {v[0], v[1], v[2]};
}

/// Limiting coefficients of a probit working model under the true model.
///
/// Newton from gamma = 0; if that fails, a second attempt starts from the
/// true coefficients with the terms the working model lacks dropped.
inline WorkingModelFit fit_working_model(WorkingModel kind, const ScenarioSpec& s, const StudySettings& st = {}) {
    if (!std::isfinite(s.beta0)) throw InputError("fit_working_model: scenario has no solved beta0");
    const std::size_t n = kind == WorkingModel::OneMarker ? 2 : 3;
    auto g = [&](const std::vector<double>& gamma) { return estimating_equation(kind, gamma, s, st); };
    try {
        auto r = numerics::solve_system(g, std::vector<double>(n, 0.0), st.ee_tol);
        return {kind, r.solution, r.report};
    } catch (const NumericalError&) {
        std::vector<double> start{s.beta0, s.beta1};
        if (n == 3) start.push_back(s.beta2);
        auto r = numerics::solve_system(g, start, st.ee_tol);
        return {kind, r.solution, r.report};
    }
}

// ---------------------------------------------------------------------------
// Conditional score densities

enum class ConditionalForm { IntegrateX, IntegrateY };

struct DensityPair {
    double event;     ///< pi * f1(c)
    double nonevent;  ///< (1 - pi) * f0(c)
};

/// Joint densities of (r = c, D = 1) and (r = c, D = 0) for the working
/// score r = g'U.
///
/// The two-marker model conditions on one marker and integrates it out
/// (the other marker is then fixed by r = c). The integration variable is
/// centred on its conditional mean given r = c with a window of +-T
/// conditional standard deviations. The one-marker score is a function of X
/// alone, so Y is integrated out, in closed form.
inline DensityPair score_density(const WorkingModelFit& fit, const ScenarioSpec& s, double c,
                                 ConditionalForm form = ConditionalForm::IntegrateX, const StudySettings& st = {}) {
    const double g0 = fit.gamma[0], g1 = fit.gamma[1];
    const double g2 = fit.gamma.size() > 2 ? fit.gamma[2] : 0.0;
    if (std::abs(g2) < 1e-10) {
        if (std::abs(g1) < 1e-10) throw NumericalError("score_density: working score is constant");
        const double x = (c - g0) / g1;
        const double f = normal_pdf(x) / std::abs(g1);
        return {f * risk_given_x(x, s), f * nonrisk_given_x(x, s)};
    }
    if (form == ConditionalForm::IntegrateY && std::abs(g1) < 1e-10) form = ConditionalForm::IntegrateX;

    const double s2 = g1 * g1 + g2 * g2;
    const double sd = std::sqrt(s2);
    const auto& q = st.density;
    const double T = q.truncation;
    std::array<double, 2> v;
    if (form == ConditionalForm::IntegrateX) {
        const double mean = g1 * (c - g0) / s2, cond_sd = std::abs(g2) / sd;
        v = numerics::integrate_1d(
            [&](double t) {
                const double x = mean + cond_sd * t;
                const double y = (c - g0 - g1 * x) / g2;
                const double w = normal_pdf(y) / std::abs(g2) * normal_pdf(x) * cond_sd;
                const double eta = s.linear_predictor(x, y);
                return std::array<double, 2>{w * normal_cdf(eta), w * normal_sf(eta)};
            },
            -T, T, q);
    } else {
        const double mean = g2 * (c - g0) / s2, cond_sd = std::abs(g1) / sd;
        v = numerics::integrate_1d(
            [&](double t) {
                const double y = mean + cond_sd * t;
                const double x = (c - g0 - g2 * y) / g1;
                const double w = normal_pdf(x) / std::abs(g1) * normal_pdf(y) * cond_sd;
                const double eta = s.linear_predictor(x, y);
                return std::array<double, 2>{w * normal_cdf(eta), w * normal_sf(eta)};
            },
            -T, T, q);
    }
    return {v[0], v[1]};
}

/// Marginal density of the working score: r ~ N(g0, g1^2 + g2^2).
inline double score_marginal_density(const WorkingModelFit& fit, double c) {
    double s2 = 0.0;
    for (std::size_t i = 1; i < fit.gamma.size(); ++i) s2 += fit.gamma[i] * fit.gamma[i];
    const double sd = std::sqrt(s2);
    return normal_pdf((c - fit.gamma[0]) / sd) / sd;
}

/// Tabulates f1 and f0 on [g0 - T s, g0 + T s], s the score's standard deviation.
inline TabulatedScores score_distribution(const WorkingModelFit& fit, const ScenarioSpec& s,
                                          ConditionalForm form = ConditionalForm::IntegrateX,
                                          const StudySettings& st = {}) {
    double s2 = 0.0;
    for (std::size_t i = 1; i < fit.gamma.size(); ++i) s2 += fit.gamma[i] * fit.gamma[i];
    const double sd = std::sqrt(s2);
    if (!(sd > 0.0)) throw NumericalError("score_distribution: working score is constant");
    const double T = st.density.truncation;
    const double lo = fit.gamma[0] - T * sd, hi = fit.gamma[0] + T * sd;
    const int n = st.density_nodes;
    if (n < 5) throw InputError("score_distribution: need at least five density nodes");
    std::vector<double> f1(n), f0(n);
    for (int i = 0; i < n; ++i) {
        const double c = lo + (hi - lo) * i / (n - 1);
        const auto d = score_density(fit, s, c, form, st);
        f1[i] = d.event / s.pi;
        f0[i] = d.nonevent / (1.0 - s.pi);
    }
    return TabulatedScores(lo, hi, std::move(f1), std::move(f0), s.pi);
}

// ---------------------------------------------------------------------------
// Scenario evaluation

struct ModelMetrics {
    std::vector<double> gamma;
    double auc = 0.0;
    double ap = 0.0;
    double brier = 0.0;
    double sbrs = 0.0;
};

struct ScenarioResult {
    ScenarioSpec spec;
    ModelMetrics one_marker;
    ModelMetrics two_marker;
    double d_auc = 0.0;
    double d_ap = 0.0;
    double d_sbrs = 0.0;
};

/// Brier score of a fitted working model under the true model.
inline double brier(const WorkingModelFit& fit, const ScenarioSpec& s, const StudySettings& st = {}) {
    return analytic::brier_covariate_form([&](double x, double y) { return true_risk(x, y, s); },
                                          [&](double x, double y) { return fit.risk(x, y); }, st.brier);
}

inline ModelMetrics evaluate_model(const WorkingModelFit& fit, const ScenarioSpec& s, const StudySettings& st = {}) {
    const auto dist = score_distribution(fit, s, ConditionalForm::IntegrateX, st);
    ModelMetrics m;
    m.gamma = fit.gamma;
    m.auc = analytic::auc(dist, st.metrics);
    m.ap = analytic::ap(dist, st.metrics);
    m.brier = brier(fit, s, st);
    m.sbrs = analytic::scaled_brier(m.brier, s.pi);
    return m;
}

/// Fits both working models and computes AUC, AP and sBrS for each, with
/// increments taken as two-marker minus one-marker.
inline ScenarioResult evaluate_scenario(const ScenarioSpec& s, const StudySettings& st = {}) {
    if (!(s.pi > 0.0 && s.pi < 1.0)) throw InputError("event rate pi must lie strictly inside (0, 1)");
    ScenarioResult r;
    r.spec = s;
    if (!std::isfinite(r.spec.beta0)) r.spec.beta0 = solve_beta0(s.beta1, s.beta2, s.beta3, s.pi, st);
    const auto one = fit_working_model(WorkingModel::OneMarker, r.spec, st);
    const auto two = fit_working_model(WorkingModel::TwoMarker, r.spec, st);
    r.one_marker = evaluate_model(one, r.spec, st);
    r.two_marker = evaluate_model(two, r.spec, st);
    r.d_auc = r.two_marker.auc - r.one_marker.auc;
    r.d_ap = r.two_marker.ap - r.one_marker.ap;
    r.d_sbrs = r.two_marker.sbrs - r.one_marker.sbrs;
    return r;
}

} // namespace incv::probit
