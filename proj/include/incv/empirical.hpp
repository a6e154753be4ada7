#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "incv/distributions.hpp"
#include "incv/errors.hpp"

namespace incv {

/// Labelled records: one binary outcome and one or more named risk columns.
class Cohort {
public:
    Cohort() = default;
    explicit Cohort(std::vector<int> outcome) : outcome_(std::move(outcome)) {
        for (int d : outcome_) {
            if (d != 0 && d != 1) throw InputError("Cohort: outcomes must be 0 or 1");
        }
    }

    void add_model(const std::string& name, std::vector<double> risk) {
        if (risk.size() != outcome_.size()) throw InputError("Cohort: column '" + name + "' has the wrong length");
        for (double r : risk) {
            if (!std::isfinite(r)) throw InputError("Cohort: column '" + name + "' contains a non-finite value");
        }
        models_[name] = std::move(risk);
    }

    std::size_t size() const noexcept { return outcome_.size(); }
    const std::vector<int>& outcome() const noexcept { return outcome_; }
    std::size_t events() const { return static_cast<std::size_t>(std::count(outcome_.begin(), outcome_.end(), 1)); }
    double event_rate() const { return outcome_.empty() ? 0.0 : static_cast<double>(events()) / static_cast<double>(size()); }

    bool has_model(const std::string& name) const { return models_.contains(name); }
    const std::vector<double>& model(const std::string& name) const {
        auto it = models_.find(name);
        if (it == models_.end()) {
            std::string avail;
            for (const auto& [k, v] : models_) avail += (avail.empty() ? "" : ", ") + k;
            throw InputError("Cohort: no model column '" + name + "' (available: " + avail + ")");
        }
        return it->second;
    }
    std::vector<std::string> model_names() const {
        std::vector<std::string> out;
        for (const auto& [k, v] : models_) out.push_back(k);
        return out;
    }

private:
    std::vector<int> outcome_;
    std::map<std::string, std::vector<double>> models_;
};

struct MetricTriple {
    double auc = 0.0;
    double ap = 0.0;
    double sbrs = 0.0;
    double event_rate = 0.0;
};

struct IncVResult {
    MetricTriple old_model;
    MetricTriple new_model;
    double delta_auc = 0.0;
    double delta_ap = 0.0;
    double delta_sbrs = 0.0;
};

enum class TieRule { Strict, Midrank };

struct CurvePoint {
    double x, y;
};

struct AlphaCurvePoint {
    double alpha, value;
};

namespace empirical {

namespace detail {

inline void require_both_classes(std::span<const int> labels) {
    std::size_t ev = 0;
    for (int d : labels) ev += (d == 1);
    if (ev == 0 || ev == labels.size()) throw InputError("degenerate cohort: need at least one event and one non-event");
}

/// Indices ordered by descending score.
inline std::vector<std::size_t> order_descending(std::span<const double> s) {
    std::vector<std::size_t> idx(s.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s[a] > s[b]; });
    return idx;
}

} // namespace detail

/// Fraction of (event, non-event) pairs in which the event scores strictly
/// higher. Ties count 0 (strict) or 1/2 (midrank).
inline double auc(std::span<const int> labels, std::span<const double> scores, TieRule ties = TieRule::Strict) {
    detail::require_both_classes(labels);
    EmpiricalPair pair(labels, scores);
    const auto& ev = pair.event_scores();
    const auto& ne = pair.nonevent_scores();
    double wins = 0.0;
    std::size_t lo = 0, hi = 0;  // ne[0, lo) < s, ne[0, hi) <= s
    for (double s : ev) {
        while (lo < ne.size() && ne[lo] < s) ++lo;
        while (hi < ne.size() && ne[hi] <= s) ++hi;
        wins += static_cast<double>(lo);
        if (ties == TieRule::Midrank) wins += 0.5 * static_cast<double>(hi - lo);
    }
    return wins / (static_cast<double>(ev.size()) * static_cast<double>(ne.size()));
}

/// Average over events of the empirical PPV at the event's own score, with
/// the threshold set {j : r_j >= r_i}.
inline double ap(std::span<const int> labels, std::span<const double> scores) {
    if (labels.size() != scores.size()) throw InputError("ap: labels and scores differ in length");
    const auto idx = detail::order_descending(scores);
    double total = 0.0;
    std::size_t n_events = 0, above = 0, above_events = 0;
    for (std::size_t g = 0; g < idx.size();) {
        std::size_t e = g, group_events = 0;
        while (e < idx.size() && scores[idx[e]] == scores[idx[g]]) {
            group_events += (labels[idx[e]] == 1);
            ++e;
        }
        above += e - g;
        above_events += group_events;
        total += static_cast<double>(group_events) * static_cast<double>(above_events) / static_cast<double>(above);
        n_events += group_events;
        g = e;
    }
    if (n_events == 0) throw InputError("ap: cohort has no events");
    return total / static_cast<double>(n_events);
}

inline double brier(std::span<const int> labels, std::span<const double> probs) {
    if (labels.size() != probs.size() || labels.empty()) throw InputError("brier: labels and probabilities differ in length");
    double s = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!(probs[i] >= 0.0 && probs[i] <= 1.0)) throw InputError("brier: risk values must be probabilities in [0, 1]");
        const double r = labels[i] - probs[i];
        s += r * r;
    }
    return s / static_cast<double>(labels.size());
}

inline double scaled_brier(std::span<const int> labels, std::span<const double> probs) {
    double events = 0.0;
    for (int d : labels) events += d;
    const double pi = events / static_cast<double>(labels.size());
    if (pi <= 0.0 || pi >= 1.0) throw InputError("scaled_brier: event rate must lie strictly inside (0, 1)");
    return 1.0 - brier(labels, probs) / (pi * (1.0 - pi));
}

/// (FPR, TPR) at every distinct score threshold c, with "positive" meaning
/// r > c, followed by the c = -inf endpoint (1, 1). The first point, at the
/// largest score, is (0, 0).
inline std::vector<CurvePoint> roc_points(std::span<const int> labels, std::span<const double> scores) {
    detail::require_both_classes(labels);
    const auto idx = detail::order_descending(scores);
    double n1 = 0.0;
    for (int d : labels) n1 += d;
    const double n0 = static_cast<double>(labels.size()) - n1;
    std::vector<CurvePoint> pts;
    double tp = 0.0, fp = 0.0;
    for (std::size_t g = 0; g < idx.size();) {
        pts.push_back({fp / n0, tp / n1});  // threshold at this group's score
        std::size_t e = g;
        while (e < idx.size() && scores[idx[e]] == scores[idx[g]]) {
            (labels[idx[e]] == 1 ? tp : fp) += 1.0;
            ++e;
        }
        g = e;
    }
    pts.push_back({1.0, 1.0});
    return pts;
}

/// (TPR, PPV) at the same thresholds as roc_points, skipping the threshold
/// at the largest score where no subject is above it.
inline std::vector<CurvePoint> pr_points(std::span<const int> labels, std::span<const double> scores) {
    detail::require_both_classes(labels);
    const auto idx = detail::order_descending(scores);
    double n1 = 0.0;
    for (int d : labels) n1 += d;
    std::vector<CurvePoint> pts;
    double tp = 0.0, all = 0.0;
    for (std::size_t g = 0; g < idx.size();) {
        std::size_t e = g;
        while (e < idx.size() && scores[idx[e]] == scores[idx[g]]) {
            tp += (labels[idx[e]] == 1);
            all += 1.0;
            ++e;
        }
        pts.push_back({tp / n1, tp / all});
        g = e;
    }
    return pts;
}

namespace detail {

inline void check_alpha_grid(std::span<const double> grid) {
    for (double a : grid) {
        if (!(a > 0.0 && a < 1.0)) throw InputError("alpha grid must lie strictly inside (0, 1)");
    }
}

} // namespace detail

/// Plug-in Delta(alpha) = F_new0(q_new,alpha) - F_old0(q_old,alpha).
inline std::vector<AlphaCurvePoint> delta_alpha_curve(std::span<const int> labels, std::span<const double> old_scores,
                                                      std::span<const double> new_scores, std::span<const double> grid) {
    detail::check_alpha_grid(grid);
    const EmpiricalPair po(labels, old_scores), pn(labels, new_scores);
    std::vector<AlphaCurvePoint> out;
    out.reserve(grid.size());
    for (double a : grid) {
        out.push_back({a, pn.nonevent_cdf(pn.event_quantile(a)) - po.nonevent_cdf(po.event_quantile(a))});
    }
    return out;
}

/// Plug-in AP weight
/// w(alpha) = k/(1-alpha) / ([1 + k (1-F_new0)/(1-alpha)] [1 + k (1-F_old0)/(1-alpha)]), k = 1/pi - 1.
inline std::vector<AlphaCurvePoint> ap_weight_curve(std::span<const int> labels, std::span<const double> old_scores,
                                                    std::span<const double> new_scores, std::span<const double> grid) {
    detail::check_alpha_grid(grid);
    const EmpiricalPair po(labels, old_scores), pn(labels, new_scores);
    const double k = 1.0 / po.event_rate() - 1.0;
    std::vector<AlphaCurvePoint> out;
    out.reserve(grid.size());
    for (double a : grid) {
        const double u = k / (1.0 - a);
        const double sn = 1.0 - pn.nonevent_cdf(pn.event_quantile(a));
        const double so = 1.0 - po.nonevent_cdf(po.event_quantile(a));
        out.push_back({a, u / ((1.0 + u * sn) * (1.0 + u * so))});
    }
    return out;
}

} // namespace empirical

// Cohort-level conveniences.

inline double empirical_auc(const Cohort& c, const std::string& model, TieRule ties = TieRule::Strict) {
    return empirical::auc(c.outcome(), c.model(model), ties);
}
inline double empirical_ap(const Cohort& c, const std::string& model) { return empirical::ap(c.outcome(), c.model(model)); }
inline double brier(const Cohort& c, const std::string& model) { return empirical::brier(c.outcome(), c.model(model)); }
inline double scaled_brier(const Cohort& c, const std::string& model) {
    return empirical::scaled_brier(c.outcome(), c.model(model));
}
inline std::vector<CurvePoint> roc_points(const Cohort& c, const std::string& model) {
    return empirical::roc_points(c.outcome(), c.model(model));
}
inline std::vector<CurvePoint> pr_points(const Cohort& c, const std::string& model) {
    return empirical::pr_points(c.outcome(), c.model(model));
}
inline std::vector<AlphaCurvePoint> delta_alpha_curve(const Cohort& c, const std::string& old_model,
                                                      const std::string& new_model, std::span<const double> grid) {
    return empirical::delta_alpha_curve(c.outcome(), c.model(old_model), c.model(new_model), grid);
}
inline std::vector<AlphaCurvePoint> ap_weight_curve(const Cohort& c, const std::string& old_model,
                                                    const std::string& new_model, std::span<const double> grid) {
    return empirical::ap_weight_curve(c.outcome(), c.model(old_model), c.model(new_model), grid);
}

/// AUC, AP and event rate of one column; sBrS only when the column holds
/// probabilities (otherwise NaN).
inline MetricTriple metric_triple(const Cohort& c, const std::string& model, TieRule ties = TieRule::Strict) {
    const auto& r = c.model(model);
    MetricTriple m;
    m.auc = empirical::auc(c.outcome(), r, ties);
    m.ap = empirical::ap(c.outcome(), r);
    m.event_rate = c.event_rate();
    const bool probs = std::all_of(r.begin(), r.end(), [](double v) { return v >= 0.0 && v <= 1.0; });
    m.sbrs = probs ? empirical::scaled_brier(c.outcome(), r) : std::nan("");
    return m;
}

inline IncVResult incremental_value(const Cohort& c, const std::string& old_model, const std::string& new_model,
                                    TieRule ties = TieRule::Strict) {
    IncVResult r;
    r.old_model = metric_triple(c, old_model, ties);
    r.new_model = metric_triple(c, new_model, ties);
    r.delta_auc = r.new_model.auc - r.old_model.auc;
    r.delta_ap = r.new_model.ap - r.old_model.ap;
    r.delta_sbrs = r.new_model.sbrs - r.old_model.sbrs;
    return r;
}

} // namespace incv
