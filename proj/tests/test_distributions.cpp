#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "incv/distributions.hpp"
#include "incv/simulate.hpp"

using namespace incv;
using Catch::Matchers::WithinAbs;
using numerics::normal_cdf;

namespace {

// Score models of the illustrative example, stored as variances.
const GaussianPair r1{1.8, 4.0, 0.0, 1.0, 0.05};
const GaussianPair r2{1.5, 2.25, 0.0, 1.0, 0.05};
const GaussianPair r3{3.0, 2.25, 0.0, 1.0, 0.05};

TabulatedScores tabulate(const GaussianPair& g, int n = 2001) {
    const GaussianScores d(g);
    const auto s = d.support();
    std::vector<double> f1(n), f0(n);
    for (int i = 0; i < n; ++i) {
        const double c = s.lo + (s.hi - s.lo) * i / (n - 1);
        f1[i] = d.event_pdf(c);
        f0[i] = d.nonevent_pdf(c);
    }
    return TabulatedScores(s.lo, s.hi, f1, f0, g.event_rate);
}

} // namespace

TEST_CASE("Gaussian pair basics", "[gaussian]") {
    const GaussianScores same(GaussianPair{0.0, 1.0, 0.0, 1.0, 0.5});
    for (double a : alpha_grid(99)) CHECK_THAT(same.nonevent_cdf(same.event_quantile(a)), WithinAbs(a, 1e-12));

    const GaussianScores g3(GaussianPair{3.0, 1.5, 0.0, 1.0, 0.1});
    CHECK_THAT(g3.event_quantile(0.5), WithinAbs(3.0, 1e-12));

    const GaussianScores g1(GaussianPair{1.8, 2.0, 0.0, 1.0, 0.1});
    CHECK_THAT(g1.nonevent_cdf(g1.event_quantile(0.5)), WithinAbs(normal_cdf(1.8), 1e-12));
    CHECK_THAT(normal_cdf(1.8), WithinAbs(0.9641, 1e-4));

    const GaussianScores sd(GaussianPair{1.0, 4.0, 0.0, 1.0, 0.1});
    CHECK_THAT(sd.event_quantile(normal_cdf(1.0)), WithinAbs(3.0, 1e-10));
}

TEST_CASE("Gaussian pair validation", "[gaussian]") {
    CHECK_THROWS_AS(GaussianScores(GaussianPair{0, 0.0, 0, 1, 0.5}), InputError);
    CHECK_THROWS_AS(GaussianScores(GaussianPair{0, 1, 0, -1, 0.5}), InputError);
    CHECK_THROWS_AS(GaussianScores(GaussianPair{0, 1, 0, 1, 1.0}), InputError);
    CHECK_THROWS_AS(GaussianScores(GaussianPair{0, 1, 0, 1, 0.0}), InputError);
}

TEST_CASE("event quantile inverts F1 on the 999-point grid", "[quantile][property]") {
    const auto grid = alpha_grid();
    for (const auto& g : {r1, r2, r3}) {
        const GaussianScores d(g);
        const auto t = tabulate(g);
        for (double a : grid) {
            REQUIRE_THAT(d.event_cdf(d.event_quantile(a)), WithinAbs(a, 1e-8));
            REQUIRE_THAT(t.event_cdf(t.event_quantile(a)), WithinAbs(a, 1e-8));
        }
    }
}

TEST_CASE("tabulated pair reproduces the Gaussian functions", "[tabulated]") {
    const GaussianScores d(r1);
    const auto t = tabulate(r1);
    CHECK_THAT(t.event_mass(), WithinAbs(1.0, 1e-10));
    CHECK_THAT(t.nonevent_mass(), WithinAbs(1.0, 1e-10));
    for (double c = -4.0; c <= 7.0; c += 0.173) {
        REQUIRE_THAT(t.event_pdf(c), WithinAbs(d.event_pdf(c), 1e-9));
        REQUIRE_THAT(t.event_cdf(c), WithinAbs(d.event_cdf(c), 1e-10));
        REQUIRE_THAT(t.nonevent_sf(c), WithinAbs(d.nonevent_sf(c), 1e-10));
    }
    // relative accuracy deep in the upper tail
    CHECK_THAT(t.nonevent_sf(6.0) / d.nonevent_sf(6.0), WithinAbs(1.0, 1e-5));
    CHECK(t.event_cdf(-1e9) == 0.0);
    CHECK(t.event_pdf(1e9) == 0.0);
}

TEST_CASE("non-event CDF at event quantiles dominates alpha", "[gaussian][property]") {
    // q1(a) >= q0(a) iff z_a >= -(mu1 - mu0) / (sd1 - sd0) when sd1 > sd0; below that the
    // wider event distribution puts its lower quantiles under the non-event ones
    for (const auto& g : {r1, r2, r3}) {
        const GaussianScores d(g);
        const double sd1 = std::sqrt(g.event_variance), sd0 = std::sqrt(g.nonevent_variance);
        const double crossing = normal_cdf(-(g.event_mean - g.nonevent_mean) / (sd1 - sd0));
        for (double a : alpha_grid()) {
            const double f = d.nonevent_cdf(d.event_quantile(a));
            if (a >= crossing) REQUIRE(f >= a);
            else REQUIRE(f < a);
        }
    }
    CHECK_THAT(normal_cdf(-1.8), WithinAbs(0.0359, 1e-4));  // r1 crossing sits inside the grid
}

TEST_CASE("empirical pair", "[empirical]") {
    const std::vector<int> l1{1, 0};
    const std::vector<double> s1{2.0, 1.0};
    const EmpiricalPair p1(l1, s1);
    CHECK(p1.event_quantile(0.5) == 2.0);
    CHECK(p1.nonevent_cdf(p1.event_quantile(0.5)) == 1.0);

    const std::vector<int> l2{1, 1, 0, 0};
    const std::vector<double> s2{3.0, 1.0, 2.0, 0.0};
    const EmpiricalPair p2(l2, s2);
    CHECK(p2.event_quantile(0.5) == 1.0);
    CHECK(p2.nonevent_cdf(1.0) == 0.5);
    CHECK(p2.event_rate() == 0.5);

    const std::vector<int> l3{1, 1};
    const std::vector<double> s3{1.0, 2.0};
    CHECK_THROWS_WITH(EmpiricalPair(l3, s3), Catch::Matchers::ContainsSubstring("degenerate cohort"));
}

TEST_CASE("empirical non-event CDF converges", "[empirical][property]") {
    const auto t = sim::simulate_gaussian({{"r1", r1}}, 200000, 99);
    const EmpiricalPair p(t.outcome, t.columns[0]);
    const GaussianScores d(r1);
    auto nonevents = p.nonevent_scores();
    double sup = 0.0;
    for (std::size_t i = 0; i < nonevents.size(); ++i) {
        const double f = d.nonevent_cdf(nonevents[i]);
        sup = std::max({sup, std::abs(static_cast<double>(i + 1) / nonevents.size() - f),
                        std::abs(static_cast<double>(i) / nonevents.size() - f)});
    }
    CHECK(sup <= 0.01);
}

TEST_CASE("alpha grid", "[grid]") {
    const auto g = alpha_grid();
    REQUIRE(g.size() == 999);
    CHECK_THAT(g.front(), WithinAbs(0.001, 1e-15));
    CHECK_THAT(g.back(), WithinAbs(0.999, 1e-15));
    CHECK_THROWS_AS(alpha_grid(0), InputError);
}
