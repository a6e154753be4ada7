#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "incv/analytic.hpp"
#include "incv/empirical.hpp"
#include "incv/simulate.hpp"

using namespace incv;
using Catch::Matchers::WithinAbs;

namespace {

const GaussianPair r1{1.8, 4.0, 0.0, 1.0, 0.05};
const GaussianPair r2{1.5, 2.25, 0.0, 1.0, 0.05};

// O(n^2) pair count straight from the definition.
double brute_auc(const std::vector<int>& d, const std::vector<double>& s, bool midrank) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = 0; j < d.size(); ++j)
            if (d[i] == 1 && d[j] == 0) {
                den += 1.0;
                num += s[i] > s[j] ? 1.0 : (midrank && s[i] == s[j] ? 0.5 : 0.0);
            }
    return num / den;
}

// Average precision straight from the definition, threshold set r_j >= r_i.
double brute_ap(const std::vector<int>& d, const std::vector<double>& s) {
    double total = 0.0, events = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i] != 1) continue;
        double above = 0.0, above_ev = 0.0;
        for (std::size_t j = 0; j < d.size(); ++j) {
            if (s[j] >= s[i]) {
                above += 1.0;
                above_ev += d[j];
            }
        }
        total += above_ev / above;
        events += 1.0;
    }
    return total / events;
}

const io::Table& fixture() {
    static const io::Table t = sim::simulate_gaussian({{"r1", r1}, {"r2", r2}}, 200000, 20240101);
    return t;
}

} // namespace

TEST_CASE("empirical AUC examples", "[auc]") {
    const std::vector<int> d{1, 0, 1, 0};
    const std::vector<double> s{0.9, 0.8, 0.3, 0.1};
    CHECK_THAT(empirical::auc(d, s), WithinAbs(0.75, 1e-15));
    const std::vector<double> sep{0.9, 0.1, 0.8, 0.2};
    CHECK(empirical::auc(d, sep) == 1.0);
    const std::vector<double> flat(4, 0.3);
    CHECK(empirical::auc(d, flat, TieRule::Strict) == 0.0);
    CHECK(empirical::auc(d, flat, TieRule::Midrank) == 0.5);
    const std::vector<int> all1{1, 1};
    const std::vector<double> two{0.1, 0.2};
    CHECK_THROWS_AS(empirical::auc(all1, two), InputError);
}

TEST_CASE("empirical AP examples", "[ap]") {
    CHECK(empirical::ap(std::vector<int>{1, 0, 0}, std::vector<double>{0.9, 0.2, 0.1}) == 1.0);
    CHECK(empirical::ap(std::vector<int>{1, 0}, std::vector<double>{0.1, 0.9}) == 0.5);
    CHECK(empirical::ap(std::vector<int>{1, 1, 0, 0}, std::vector<double>{0.9, 0.8, 0.2, 0.1}) == 1.0);
    CHECK_THROWS_AS(empirical::ap(std::vector<int>{0, 0}, std::vector<double>{0.1, 0.9}), InputError);
}

TEST_CASE("merge-based estimators agree with brute force", "[auc][ap][property]") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng() % 40;
        std::vector<int> d(n);
        std::vector<double> s(n);
        for (std::size_t i = 0; i < n; ++i) {
            d[i] = static_cast<int>(rng() % 2);
            s[i] = static_cast<double>(rng() % 7);  // plenty of ties
        }
        d[0] = 1;
        d[1] = 0;
        REQUIRE_THAT(empirical::auc(d, s, TieRule::Strict), WithinAbs(brute_auc(d, s, false), 1e-14));
        REQUIRE_THAT(empirical::auc(d, s, TieRule::Midrank), WithinAbs(brute_auc(d, s, true), 1e-14));
        REQUIRE_THAT(empirical::ap(d, s), WithinAbs(brute_ap(d, s), 1e-14));
    }
}

TEST_CASE("Brier score examples", "[brier]") {
    const std::vector<int> d{1, 0};
    CHECK(empirical::brier(d, std::vector<double>{1.0, 0.0}) == 0.0);
    CHECK(empirical::scaled_brier(d, std::vector<double>{1.0, 0.0}) == 1.0);
    CHECK_THAT(empirical::brier(d, std::vector<double>{0.8, 0.4}), WithinAbs(0.10, 1e-15));
    const std::vector<int> d4{1, 0, 0, 0};
    CHECK_THAT(empirical::scaled_brier(d4, std::vector<double>(4, 0.25)), WithinAbs(0.0, 1e-15));
    CHECK_THROWS_AS(empirical::scaled_brier(std::vector<int>{1, 1}, std::vector<double>{0.5, 0.5}), InputError);
    CHECK_THROWS_AS(empirical::brier(d, std::vector<double>{1.5, 0.0}), InputError);
}

TEST_CASE("ROC and PR points", "[curves]") {
    const std::vector<int> d{1, 0, 1};
    const std::vector<double> s{3.0, 2.0, 1.0};
    const auto roc = empirical::roc_points(d, s);
    REQUIRE(roc.size() == 4);
    CHECK((roc[0].x == 0.0 && roc[0].y == 0.0));
    CHECK((roc[1].x == 0.0 && roc[1].y == 0.5));
    CHECK((roc[2].x == 1.0 && roc[2].y == 0.5));
    CHECK((roc[3].x == 1.0 && roc[3].y == 1.0));

    const auto pr = empirical::pr_points(d, s);
    REQUIRE(pr.size() == 3);
    CHECK((pr[0].x == 0.5 && pr[0].y == 1.0));
    CHECK((pr[1].x == 0.5 && pr[1].y == 0.5));
    CHECK_THAT(pr[2].y, WithinAbs(2.0 / 3.0, 1e-15));

    const std::vector<int> sep{1, 1, 0};
    const std::vector<double> ss{0.9, 0.8, 0.1};
    const auto r2 = empirical::roc_points(sep, ss);
    CHECK(std::any_of(r2.begin(), r2.end(), [](const CurvePoint& p) { return p.x == 0.0 && p.y == 1.0; }));

    const auto flat = empirical::roc_points(d, std::vector<double>(3, 0.5));
    REQUIRE(flat.size() == 2);
    CHECK((flat[1].x == 1.0 && flat[1].y == 1.0));

    // Moving the threshold down never lowers TPR or FPR.
    const auto& t = fixture();
    const auto big = empirical::roc_points(t.outcome, t.columns[0]);
    for (std::size_t i = 1; i < big.size(); ++i) REQUIRE((big[i].x >= big[i - 1].x && big[i].y >= big[i - 1].y));
}

TEST_CASE("rank invariance under increasing maps", "[property]") {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> z;
    std::vector<int> d(400);
    std::vector<double> s(400);
    for (std::size_t i = 0; i < d.size(); ++i) {
        d[i] = static_cast<int>(rng() % 5 == 0);
        s[i] = std::round((z(rng) + d[i]) * 20.0) / 20.0;  // coarse, so ties occur
    }
    d[0] = 1;
    d[1] = 0;
    const double auc0 = empirical::auc(d, s), auc_mid0 = empirical::auc(d, s, TieRule::Midrank), ap0 = empirical::ap(d, s);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    for (int k = 0; k < 100; ++k) {
        const double a = u(rng), b = u(rng) - 1.5, c = u(rng);
        const int kind = k % 4;
        std::vector<double> m(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double x = s[i];
            switch (kind) {
            case 0: m[i] = a * x + b; break;
            case 1: m[i] = std::exp(c * x) + b; break;
            case 2: m[i] = numerics::normal_cdf((0.1 + c / 3.0) * x + b); break;  // |arg| < 8, no saturation at 1
            default: m[i] = std::atan(a * x) + c * x * x * x; break;
            }
        }
        REQUIRE(empirical::auc(d, m) == auc0);
        REQUIRE(empirical::auc(d, m, TieRule::Midrank) == auc_mid0);
        REQUIRE(empirical::ap(d, m) == ap0);
    }
}

TEST_CASE("incremental value is new minus old and antisymmetric", "[incv]") {
    Cohort c(std::vector<int>{1, 0, 1, 0, 0});
    c.add_model("a", {0.9, 0.2, 0.4, 0.5, 0.1});
    c.add_model("b", {0.7, 0.3, 0.8, 0.1, 0.2});
    const auto ab = incremental_value(c, "a", "b");
    const auto ba = incremental_value(c, "b", "a");
    CHECK(ab.delta_auc == ab.new_model.auc - ab.old_model.auc);
    CHECK(ab.delta_ap == ab.new_model.ap - ab.old_model.ap);
    CHECK(ab.delta_sbrs == ab.new_model.sbrs - ab.old_model.sbrs);
    CHECK(ab.delta_auc == -ba.delta_auc);
    CHECK(ab.delta_ap == -ba.delta_ap);
    CHECK(ab.delta_sbrs == -ba.delta_sbrs);
    const auto aa = incremental_value(c, "a", "a");
    CHECK(aa.delta_auc == 0.0);
    CHECK(aa.delta_ap == 0.0);
    CHECK(aa.delta_sbrs == 0.0);
    CHECK_THROWS_WITH(c.model("zz"), Catch::Matchers::ContainsSubstring("available: a, b"));
}

TEST_CASE("simulated cohort matches the analytic metrics", "[montecarlo]") {
    const auto& t = fixture();
    const auto c = t.to_cohort();
    for (const auto& [name, g] : {std::pair{"r1", r1}, std::pair{"r2", r2}}) {
        const GaussianScores d(g);
        CHECK_THAT(empirical_auc(c, name), WithinAbs(analytic::auc(d), 0.01));
        CHECK_THAT(empirical_ap(c, name), WithinAbs(analytic::ap(d), 0.01));
    }
    const auto inc = incremental_value(c, "r2", "r1");
    CHECK_THAT(inc.delta_auc, WithinAbs(-0.007, 0.01));
    CHECK_THAT(inc.delta_ap, WithinAbs(0.096, 0.01));
}

TEST_CASE("empirical AP increment is centred on the analytic value", "[montecarlo]") {
    const double target = analytic::ap(GaussianScores(r1)) - analytic::ap(GaussianScores(r2));
    double sum = 0.0;
    const int reps = 10;
    for (int k = 1; k <= reps; ++k) {
        const auto c = sim::simulate_gaussian({{"r1", r1}, {"r2", r2}}, 200000, 1000 + k).to_cohort();
        sum += incremental_value(c, "r2", "r1").delta_ap;
    }
    // single-draw sd is about 0.006 at this size
    CHECK_THAT(sum / reps, WithinAbs(target, 0.006));
}

TEST_CASE("empirical Delta(alpha) and AP weight curves", "[curves]") {
    const auto& t = fixture();
    const auto c = t.to_cohort();
    const auto grid = alpha_grid();
    const auto same = delta_alpha_curve(c, "r1", "r1", grid);
    for (const auto& p : same) REQUIRE(p.value == 0.0);

    const auto delta = delta_alpha_curve(c, "r2", "r1", grid);
    REQUIRE(delta.size() == grid.size());
    // past the point where the true Delta drops below a few events' worth of F0 resolution,
    // both empirical CDFs sit at 1 and the difference is exactly 0
    const double n0 = static_cast<double>(c.size() - c.events());
    const GaussianScores g_old(r2), g_new(r1);
    for (const auto& p : delta) {
        if (p.alpha <= 0.2) REQUIRE(p.value < 0.0);
        if (p.alpha >= 0.8) {
            REQUIRE(p.value >= 0.0);
            if (analytic::delta_alpha(g_old, g_new, p.alpha) > 5.0 / n0) REQUIRE(p.value > 0.0);
        }
    }
    const auto w = ap_weight_curve(c, "r2", "r1", grid);
    for (std::size_t i = 1; i < w.size(); ++i) REQUIRE(w[i].value > w[i - 1].value);

    CHECK_THROWS_AS(delta_alpha_curve(c, "r2", "r1", std::vector<double>{0.5, 1.0}), InputError);
    CHECK_THROWS_AS(ap_weight_curve(c, "r2", "r1", std::vector<double>{0.0}), InputError);
}

TEST_CASE("metric triple bounds on a probability column", "[incv]") {
    const auto t = sim::simulate_gaussian({{"r1", r1}}, 5000, 8);
    std::vector<double> p(t.columns[0].size());
    std::transform(t.columns[0].begin(), t.columns[0].end(), p.begin(), [](double x) { return numerics::normal_cdf(x - 2.0); });
    Cohort c(t.outcome);
    c.add_model("p", p);
    c.add_model("score", t.columns[0]);
    const auto m = metric_triple(c, "p");
    CHECK((m.auc >= 0.0 && m.auc <= 1.0));
    CHECK((m.ap >= 0.0 && m.ap <= 1.0));
    CHECK(m.sbrs <= 1.0);
    CHECK(empirical_auc(c, "p") == empirical_auc(c, "score"));
    CHECK(std::isnan(metric_triple(c, "score").sbrs));
}
