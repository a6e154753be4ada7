#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "incv/distributions.hpp"
#include "incv/errors.hpp"
#include "incv/io.hpp"
#include "incv/numerics/normal.hpp"
#include "incv/probit_study.hpp"

namespace incv::sim {

/// Seeded uniform and normal draws that do not depend on the standard
/// library's distribution implementations, so files are reproducible across
/// platforms.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on the open interval (0, 1) with 53 random bits.
    double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
    double normal() { return numerics::normal_quantile(uniform()); }
    int bernoulli(double p) { return uniform() < p ? 1 : 0; }

private:
    std::mt19937_64 engine_;
};

struct NamedGaussian {
    std::string name;
    GaussianPair pair;
};

/// Draws n subjects: D ~ Bernoulli(pi), then one score per model from that
/// model's conditional normal given D. Scores of different models are
/// independent given D. All models must share the event rate.
inline io::Table simulate_gaussian(const std::vector<NamedGaussian>& models, std::size_t n, std::uint64_t seed) {
    if (n < 2) throw InputError("simulate: n must be at least 2");
    if (models.empty()) throw InputError("simulate: at least one model is required");
    const double pi = models.front().pair.event_rate;
    for (const auto& m : models) {
        m.pair.validate();
        if (m.pair.event_rate != pi) throw InputError("simulate: models must share one event rate");
    }
    Stream rng(seed);
    io::Table t;
    t.outcome.reserve(n);
    for (const auto& m : models) t.names.push_back(m.name);
    t.columns.assign(models.size(), {});
    for (auto& c : t.columns) c.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int d = rng.bernoulli(pi);
        t.outcome.push_back(d);
        for (std::size_t j = 0; j < models.size(); ++j) {
            const auto& g = models[j].pair;
            const double z = rng.normal();
            t.columns[j].push_back(d ? g.event_mean + std::sqrt(g.event_variance) * z
                                     : g.nonevent_mean + std::sqrt(g.nonevent_variance) * z);
        }
    }
    return t;
}

/// Calls f(x, y, d) for n subjects drawn from the probit scenario.
template <class F>
void draw_scenario(const probit::ScenarioSpec& s, std::size_t n, std::uint64_t seed, F&& f) {
    if (!std::isfinite(s.beta0)) throw InputError("simulate: scenario has no solved beta0");
    Stream rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = rng.normal();
        const double y = rng.normal();
        f(x, y, rng.bernoulli(probit::true_risk(x, y, s)));
    }
}

/// Cohort from a probit scenario with columns x, y and the true,
/// one-marker and two-marker risks (working models at their population fits).
inline io::Table simulate_scenario(const probit::ScenarioSpec& s, std::size_t n, std::uint64_t seed,
                                   const probit::StudySettings& st = {}) {
    if (n < 2) throw InputError("simulate: n must be at least 2");
    const auto one = probit::fit_working_model(probit::WorkingModel::OneMarker, s, st);
    const auto two = probit::fit_working_model(probit::WorkingModel::TwoMarker, s, st);
    io::Table t;
    t.names = {"x", "y", "risk_true", "risk_one", "risk_two"};
    t.columns.assign(t.names.size(), {});
    draw_scenario(s, n, seed, [&](double x, double y, int d) {
        t.outcome.push_back(d);
        t.columns[0].push_back(x);
        t.columns[1].push_back(y);
        t.columns[2].push_back(probit::true_risk(x, y, s));
        t.columns[3].push_back(one.risk(x, y));
        t.columns[4].push_back(two.risk(x, y));
    });
    return t;
}

} // namespace incv::sim
