#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "incv/errors.hpp"
#include "incv/numerics/normal.hpp"
#include "incv/numerics/roots.hpp"

namespace incv {

/// Interval outside of which both conditional densities carry negligible mass.
struct Support {
    double lo, hi;
};

/// Event-conditional (F1) and non-event-conditional (F0) distributions of a
/// risk score, together with the event rate pi.
///
/// Survival functions are part of the interface because the AP integrand
/// needs 1 - F in the upper tail, where computing it as 1 - cdf cancels.
class ScoreDistributionPair {
public:
    virtual ~ScoreDistributionPair() = default;

    virtual double event_pdf(double c) const = 0;
    virtual double event_cdf(double c) const = 0;
    virtual double event_sf(double c) const = 0;
    virtual double nonevent_pdf(double c) const = 0;
    virtual double nonevent_cdf(double c) const = 0;
    virtual double nonevent_sf(double c) const = 0;

    /// q_alpha = F1^{-1}(alpha), alpha in (0, 1).
    virtual double event_quantile(double alpha) const = 0;

    virtual Support support() const = 0;
    virtual double event_rate() const = 0;
};

// ---------------------------------------------------------------------------

struct GaussianPair {
    double event_mean;
    double event_variance;
    double nonevent_mean;
    double nonevent_variance;
    double event_rate;

    void validate() const {
        if (!(event_variance > 0.0) || !(nonevent_variance > 0.0)) {
            throw InputError("GaussianPair: variances must be strictly positive");
        }
        if (!(event_rate > 0.0 && event_rate < 1.0)) throw InputError("GaussianPair: event rate must lie in (0, 1)");
        if (!std::isfinite(event_mean) || !std::isfinite(nonevent_mean)) throw InputError("GaussianPair: means must be finite");
    }
};

/// Normal conditional score distributions. The second argument of N(a, b)
/// is a variance throughout this library.
class GaussianScores final : public ScoreDistributionPair {
public:
    explicit GaussianScores(const GaussianPair& g)
        : g_(g), sd1_(std::sqrt(g.event_variance)), sd0_(std::sqrt(g.nonevent_variance)) {
        g_.validate();
    }

    double event_pdf(double c) const override { return numerics::normal_pdf((c - g_.event_mean) / sd1_) / sd1_; }
    double event_cdf(double c) const override { return numerics::normal_cdf((c - g_.event_mean) / sd1_); }
    double event_sf(double c) const override { return numerics::normal_sf((c - g_.event_mean) / sd1_); }
    double nonevent_pdf(double c) const override {
        return numerics::normal_pdf((c - g_.nonevent_mean) / sd0_) / sd0_;
    }
    double nonevent_cdf(double c) const override { return numerics::normal_cdf((c - g_.nonevent_mean) / sd0_); }
    double nonevent_sf(double c) const override { return numerics::normal_sf((c - g_.nonevent_mean) / sd0_); }
    double event_quantile(double alpha) const override {
        return g_.event_mean + sd1_ * numerics::normal_quantile(alpha);
    }
    Support support() const override {
        return {std::min(g_.event_mean - 8.5 * sd1_, g_.nonevent_mean - 8.5 * sd0_),
                std::max(g_.event_mean + 8.5 * sd1_, g_.nonevent_mean + 8.5 * sd0_)};
    }
    double event_rate() const override { return g_.event_rate; }

    const GaussianPair& parameters() const noexcept { return g_; }

private:
    GaussianPair g_;
    double sd1_, sd0_;
};

inline GaussianScores gaussian_pair_to_distribution(const GaussianPair& g) { return GaussianScores(g); }

// ---------------------------------------------------------------------------

/// Conditional densities tabulated on a uniform score grid.
///
/// Between nodes each density is the cubic Hermite interpolant of the node
/// values (slopes from fourth-order finite differences). CDFs and survival
/// functions are exact integrals of that interpolant, accumulated from the
/// left and from the right respectively, so the upper tail keeps its
/// relative accuracy.
class TabulatedScores final : public ScoreDistributionPair {
public:
    TabulatedScores(double lo, double hi, std::vector<double> event_density, std::vector<double> nonevent_density,
                    double event_rate)
        : lo_(lo), hi_(hi), pi_(event_rate) {
        if (!(lo < hi)) throw InputError("TabulatedScores: empty support");
        if (event_density.size() != nonevent_density.size() || event_density.size() < 5) {
            throw InputError("TabulatedScores: need at least five nodes per density");
        }
        if (!(event_rate > 0.0 && event_rate < 1.0)) throw InputError("TabulatedScores: event rate must lie in (0, 1)");
        h_ = (hi - lo) / static_cast<double>(event_density.size() - 1);
        event_ = Table(std::move(event_density), h_);
        nonevent_ = Table(std::move(nonevent_density), h_);
    }

    double event_pdf(double c) const override { return event_.pdf(locate(c)); }
    double event_cdf(double c) const override { return event_.cdf(locate(c), c < lo_, c > hi_); }
    double event_sf(double c) const override { return event_.sf(locate(c), c < lo_, c > hi_); }
    double nonevent_pdf(double c) const override { return nonevent_.pdf(locate(c)); }
    double nonevent_cdf(double c) const override { return nonevent_.cdf(locate(c), c < lo_, c > hi_); }
    double nonevent_sf(double c) const override { return nonevent_.sf(locate(c), c < lo_, c > hi_); }

    double event_quantile(double alpha) const override {
        if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("event_quantile: alpha must lie in (0, 1)");
        // Search on whichever tail keeps precision.
        const bool upper = alpha > 0.5;
        const double target = upper ? 1.0 - alpha : alpha;
        auto g = [&](double c) { return upper ? target - event_sf(c) : event_cdf(c) - target; };
        const auto& cum = upper ? event_.sf_nodes : event_.cdf_nodes;
        std::size_t k;
        if (upper) {
            // sf_nodes is non-increasing
            auto it = std::partition_point(cum.begin(), cum.end(), [&](double v) { return v > target; });
            k = static_cast<std::size_t>(it - cum.begin());
        } else {
            auto it = std::partition_point(cum.begin(), cum.end(), [&](double v) { return v < target; });
            k = static_cast<std::size_t>(it - cum.begin());
        }
        if (k == 0) return lo_;
        if (k >= cum.size()) return hi_;
        const double a = lo_ + h_ * static_cast<double>(k - 1);
        const double b = lo_ + h_ * static_cast<double>(k);
        if (g(a) >= 0.0) return a;
        if (g(b) <= 0.0) return b;
        return numerics::find_root(g, a, b, 1e-14 * std::max(1.0, std::abs(b))).root;
    }

    Support support() const override { return {lo_, hi_}; }
    double event_rate() const override { return pi_; }

    std::size_t nodes() const noexcept { return event_.f.size(); }
    double node(std::size_t i) const noexcept { return lo_ + h_ * static_cast<double>(i); }
    double event_mass() const noexcept { return event_.cdf_nodes.back(); }
    double nonevent_mass() const noexcept { return nonevent_.cdf_nodes.back(); }

private:
    struct Where {
        std::size_t i;  // interval [node i, node i+1]
        double t;       // position within it, in [0, 1]
        bool outside;
    };

    Where locate(double c) const {
        if (!(c >= lo_) || !(c <= hi_)) return {0, 0.0, true};
        const double u = (c - lo_) / h_;
        std::size_t i = static_cast<std::size_t>(u);
        const std::size_t last = event_.f.size() - 2;
        if (i > last) i = last;
        return {i, u - static_cast<double>(i), false};
    }

    struct Table {
        std::vector<double> f, df, cdf_nodes, sf_nodes;
        double h = 0.0;

        Table() = default;
        Table(std::vector<double> values, double step) : f(std::move(values)), h(step) {
            const std::size_t n = f.size();
            df.assign(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                if (i >= 2 && i + 2 < n) {
                    df[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * h);
                } else if (i < 2) {
                    df[i] = (-25.0 * f[i] + 48.0 * f[i + 1] - 36.0 * f[i + 2] + 16.0 * f[i + 3] - 3.0 * f[i + 4]) /
                            (12.0 * h);
                } else {
                    df[i] = (25.0 * f[i] - 48.0 * f[i - 1] + 36.0 * f[i - 2] - 16.0 * f[i - 3] + 3.0 * f[i - 4]) /
                            (12.0 * h);
                }
            }
            cdf_nodes.assign(n, 0.0);
            sf_nodes.assign(n, 0.0);
            for (std::size_t i = 0; i + 1 < n; ++i) cdf_nodes[i + 1] = cdf_nodes[i] + partial(i, 1.0);
            for (std::size_t i = n - 1; i-- > 0;) sf_nodes[i] = sf_nodes[i + 1] + partial(i, 1.0);
        }

        // Hermite basis on [0,1] and their antiderivatives from 0 to t.
        double value(std::size_t i, double t) const {
            const double t2 = t * t, t3 = t2 * t;
            return (2 * t3 - 3 * t2 + 1) * f[i] + (t3 - 2 * t2 + t) * h * df[i] + (-2 * t3 + 3 * t2) * f[i + 1] +
                   (t3 - t2) * h * df[i + 1];
        }
        double partial(std::size_t i, double t) const {
            const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
            return h * ((0.5 * t4 - t3 + t) * f[i] + (0.25 * t4 - 2.0 / 3.0 * t3 + 0.5 * t2) * h * df[i] +
                        (-0.5 * t4 + t3) * f[i + 1] + (0.25 * t4 - t3 / 3.0) * h * df[i + 1]);
        }

        double pdf(const Where& w) const { return w.outside ? 0.0 : std::max(0.0, value(w.i, w.t)); }
        double cdf(const Where& w, bool below, bool above) const {
            if (below) return 0.0;
            if (above) return cdf_nodes.back();
            return std::clamp(cdf_nodes[w.i] + partial(w.i, w.t), 0.0, cdf_nodes.back());
        }
        double sf(const Where& w, bool below, bool above) const {
            if (below) return sf_nodes.front();
            if (above) return 0.0;
            return std::clamp(sf_nodes[w.i + 1] + (partial(w.i, 1.0) - partial(w.i, w.t)), 0.0, sf_nodes.front());
        }
    };

    double lo_, hi_, h_ = 0.0, pi_;
    Table event_, nonevent_;
};

// ---------------------------------------------------------------------------

/// Step-function conditional distributions from a labelled sample.
class EmpiricalPair {
public:
    EmpiricalPair(std::span<const int> labels, std::span<const double> scores) {
        if (labels.size() != scores.size()) throw InputError("empirical pair: labels and scores differ in length");
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == 1) {
                events_.push_back(scores[i]);
            } else if (labels[i] == 0) {
                nonevents_.push_back(scores[i]);
            } else {
                throw InputError("empirical pair: labels must be 0 or 1");
            }
        }
        if (events_.empty() || nonevents_.empty()) throw InputError("degenerate cohort: need at least one event and one non-event");
        std::sort(events_.begin(), events_.end());
        std::sort(nonevents_.begin(), nonevents_.end());
        pi_ = static_cast<double>(events_.size()) / static_cast<double>(labels.size());
    }

    double event_cdf(double c) const { return fraction_at_or_below(events_, c); }
    double nonevent_cdf(double c) const { return fraction_at_or_below(nonevents_, c); }

    /// Left-continuous inverse: the smallest event score s with F1(s) >= alpha.
    double event_quantile(double alpha) const {
        if (!(alpha > 0.0 && alpha <= 1.0)) throw InputError("event_quantile: alpha must lie in (0, 1]");
        const double m = static_cast<double>(events_.size());
        // Guard against alpha*m landing a hair above an integer.
        auto k = static_cast<std::size_t>(std::ceil(alpha * m - 1e-9 * m));
        k = std::clamp<std::size_t>(k, 1, events_.size());
        return events_[k - 1];
    }

    double event_rate() const noexcept { return pi_; }
    const std::vector<double>& event_scores() const noexcept { return events_; }
    const std::vector<double>& nonevent_scores() const noexcept { return nonevents_; }

private:
    static double fraction_at_or_below(const std::vector<double>& sorted, double c) {
        const auto it = std::upper_bound(sorted.begin(), sorted.end(), c);
        return static_cast<double>(it - sorted.begin()) / static_cast<double>(sorted.size());
    }

    std::vector<double> events_, nonevents_;
    double pi_ = 0.0;
};

inline EmpiricalPair empirical_pair_from_cohort(std::span<const int> labels, std::span<const double> scores) {
    return EmpiricalPair(labels, scores);
}

/// Equally spaced interior grid {1/(n+1), ..., n/(n+1)}; n = 999 gives 0.001 ... 0.999.
inline std::vector<double> alpha_grid(std::size_t n = 999) {
    if (n == 0) throw InputError("alpha grid needs at least one point");
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = static_cast<double>(i + 1) / static_cast<double>(n + 1);
    return a;
}

} // namespace incv
