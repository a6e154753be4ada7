#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "incv/errors.hpp"
#include "incv/probit_study.hpp"

namespace incv::study {

using probit::ScenarioResult;
using probit::ScenarioSpec;
using probit::StudySettings;

struct GridSpec {
    std::vector<double> beta1{0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::vector<double> beta2{0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::vector<double> beta3{-0.5, -0.4, -0.3, -0.2, -0.1, 0.1, 0.2, 0.3, 0.4, 0.5};
    std::vector<double> pi{0.01, 0.05, 0.1, 0.2, 0.5};

    /// 8 x 8 x 10 x 5 = 3200 scenarios with an interaction term.
    static GridSpec standard() { return {}; }

    /// Same grid with beta3 = 0: the two-marker working model is correct.
    static GridSpec no_interaction() {
        GridSpec g;
        g.beta3 = {0.0};
        return g;
    }

    void validate() const {
        if (beta1.empty() || beta2.empty() || beta3.empty() || pi.empty()) {
            throw InputError("grid: every coefficient list and the event-rate list must be non-empty");
        }
        for (double p : pi) {
            if (!(p > 0.0 && p < 1.0)) throw InputError("grid: event rates must lie strictly inside (0, 1)");
        }
        for (const auto* list : {&beta1, &beta2, &beta3}) {
            for (double b : *list) {
                if (!std::isfinite(b)) throw InputError("grid: coefficients must be finite");
            }
        }
    }

    std::size_t size() const { return beta1.size() * beta2.size() * beta3.size() * pi.size(); }

    /// Scenarios in a fixed order: pi slowest, then beta1, beta2, beta3.
    /// beta0 is left unsolved.
    std::vector<ScenarioSpec> scenarios() const {
        std::vector<ScenarioSpec> out;
        out.reserve(size());
        for (double p : pi)
            for (double b1 : beta1)
                for (double b2 : beta2)
                    for (double b3 : beta3) out.push_back({b1, b2, b3, p});
        return out;
    }
};

struct GridEntry {
    ScenarioSpec spec;
    std::optional<ScenarioResult> result;
    std::string error;  ///< empty on success
};

struct RunOptions {
    unsigned threads = 0;  ///< 0: one per hardware thread
    std::function<void(std::size_t done, std::size_t total)> progress;
};

inline std::string describe(const ScenarioSpec& s) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "beta1=%g beta2=%g beta3=%g pi=%g", s.beta1, s.beta2, s.beta3, s.pi);
    return buf;
}

/// Evaluates every scenario of the grid. Failures are recorded per entry and
/// do not stop the run. Results come back in GridSpec::scenarios() order
/// regardless of the number of workers.
inline std::vector<GridEntry> run_grid(const GridSpec& grid, const StudySettings& settings = {},
                                       const RunOptions& opt = {}) {
    grid.validate();
    const auto specs = grid.scenarios();
    std::vector<GridEntry> entries(specs.size());
    for (std::size_t i = 0; i < specs.size(); ++i) entries[i].spec = specs[i];

    std::atomic<std::size_t> next{0}, done{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < entries.size(); i = next++) {
            auto& e = entries[i];
            try {
                e.result = probit::evaluate_scenario(e.spec, settings);
                e.spec = e.result->spec;
            } catch (const std::exception& ex) {
                e.error = describe(e.spec) + ": " + ex.what();
            }
            const std::size_t d = ++done;
            if (opt.progress) opt.progress(d, entries.size());
        }
    };

    unsigned n = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
    n = static_cast<unsigned>(std::min<std::size_t>(n, entries.size()));
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    }
    return entries;
}

// ---------------------------------------------------------------------------
// Summary statistics

inline double pearson(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw InputError("pearson: length mismatch");
    if (xs.size() < 2) throw InputError("pearson: need at least two points");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (!(sxx > 0.0) || !(syy > 0.0)) throw NumericalError("pearson: zero variance");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

/// Values at or below this count as non-positive, so quadrature noise around
/// zero does not decide the sign.
inline constexpr double kSignTolerance = 1e-12;

inline bool is_positive(double v) { return v > kSignTolerance; }

/// (#concordant - #discordant) / n, where a pair is concordant when both
/// values are positive or both are not.
inline double concordance(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) throw InputError("concordance: length mismatch");
    if (xs.empty()) throw InputError("concordance: empty input");
    long score = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) score += is_positive(xs[i]) == is_positive(ys[i]) ? 1 : -1;
    return static_cast<double>(score) / static_cast<double>(xs.size());
}

/// Linear-interpolation sample quantile (h = (n - 1) p).
inline double quantile(std::vector<double> v, double p) {
    if (v.empty()) throw InputError("quantile: empty input");
    if (!(p >= 0.0 && p <= 1.0)) throw InputError("quantile: probability outside [0, 1]");
    std::sort(v.begin(), v.end());
    const double h = (v.size() - 1) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - lo) * (v[hi] - v[lo]);
}

struct FiveNumber {
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
    double iqr() const { return q3 - q1; }
};

inline FiveNumber five_number(const std::vector<double>& v) {
    return {quantile(v, 0.0), quantile(v, 0.25), quantile(v, 0.5), quantile(v, 0.75), quantile(v, 1.0)};
}

/// One statistic for each pair of increments.
struct PairStats {
    double sbrs_ap = 0.0;
    double sbrs_auc = 0.0;
    double auc_ap = 0.0;
};

struct NegativeCounts {
    std::size_t d_auc = 0, d_ap = 0, d_sbrs = 0;
};

struct RateSummary {
    double pi = 0.0;
    std::size_t scenarios = 0;
    FiveNumber d_auc, d_ap, d_sbrs;
    PairStats pearson, concordance;
    NegativeCounts negatives;
};

struct GridSummary {
    std::vector<RateSummary> by_rate;  ///< ascending pi
    NegativeCounts negatives;
    std::size_t scenarios = 0;
    std::vector<std::string> failures;
};

namespace detail {

inline double pearson_or_nan(const std::vector<double>& a, const std::vector<double>& b) {
    try {
        return pearson(a, b);
    } catch (const std::exception&) {
        return std::nan("");
    }
}

} // namespace detail

/// Groups successful scenarios by event rate; failed ones are listed but
/// excluded from every statistic.
inline GridSummary summarize(const std::vector<GridEntry>& entries) {
    if (entries.empty()) throw InputError("summarize: no results");
    GridSummary out;
    std::map<double, std::vector<const ScenarioResult*>> groups;
    for (const auto& e : entries) {
        if (e.result) {
            groups[e.spec.pi].push_back(&*e.result);
        } else {
            out.failures.push_back(e.error);
        }
    }
    for (const auto& [pi, rs] : groups) {
        RateSummary s;
        s.pi = pi;
        s.scenarios = rs.size();
        std::vector<double> auc, ap, sbrs;
        for (const auto* r : rs) {
            auc.push_back(r->d_auc);
            ap.push_back(r->d_ap);
            sbrs.push_back(r->d_sbrs);
            s.negatives.d_auc += r->d_auc < 0.0;
            s.negatives.d_ap += r->d_ap < 0.0;
            s.negatives.d_sbrs += r->d_sbrs < 0.0;
        }
        s.d_auc = five_number(auc);
        s.d_ap = five_number(ap);
        s.d_sbrs = five_number(sbrs);
        s.pearson = {detail::pearson_or_nan(sbrs, ap), detail::pearson_or_nan(sbrs, auc),
                     detail::pearson_or_nan(auc, ap)};
        s.concordance = {concordance(sbrs, ap), concordance(sbrs, auc), concordance(auc, ap)};
        out.negatives.d_auc += s.negatives.d_auc;
        out.negatives.d_ap += s.negatives.d_ap;
        out.negatives.d_sbrs += s.negatives.d_sbrs;
        out.scenarios += s.scenarios;
        out.by_rate.push_back(s);
    }
    return out;
}

} // namespace incv::study
