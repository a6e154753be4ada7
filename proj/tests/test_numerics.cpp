#include <catch_amalgamated.hpp>

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "incv/numerics/newton.hpp"
#include "incv/numerics/normal.hpp"
#include "incv/numerics/quadrature.hpp"
#include "incv/numerics/roots.hpp"

using namespace incv;
using namespace incv::numerics;
using Catch::Matchers::WithinAbs;

namespace {

// Maclaurin series of erf in long double; independent of std::erf.
long double erf_series(long double x) {
    long double term = x, sum = x;
    for (int n = 1; n < 200; ++n) {
        term *= -x * x / n;
        const long double add = term / (2 * n + 1);
        sum += add;
        if (std::fabs(add) < 1e-22L) break;
    }
    return sum * 2.0L / std::sqrt(3.14159265358979323846264338327950288L);
}

double phi_series(double x) { return static_cast<double>(0.5L * (1.0L + erf_series(x / std::sqrt(2.0L)))); }

double double_factorial(int k) {
    double r = 1.0;
    for (; k > 1; k -= 2) r *= k;
    return r;
}

} // namespace

TEST_CASE("normal distribution functions", "[normal]") {
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(normal_quantile(0.5) == 0.0);
    CHECK_THAT(normal_cdf(1.897), WithinAbs(0.9711, 5e-5));
    CHECK_THAT(normal_cdf(1.897), WithinAbs(phi_series(1.897), 1e-13));
    for (double x = -5.0; x <= 5.0; x += 0.37) CHECK_THAT(normal_cdf(x), WithinAbs(phi_series(x), 1e-13));
    CHECK_THAT(normal_pdf(0.0), WithinAbs(0.3989422804014327, 1e-15));
    CHECK_THAT(normal_sf(2.0) + normal_cdf(2.0), WithinAbs(1.0, 1e-15));
}

TEST_CASE("normal cdf is strictly increasing", "[normal]") {
    double prev = normal_cdf(-8.0);
    for (double x = -7.99; x <= 6.0; x += 0.01) {
        const double v = normal_cdf(x);
        REQUIRE(v > prev);
        prev = v;
    }
}

TEST_CASE("quantile inverts the cdf", "[normal]") {
    // Below about 4.75 the upper tail of the cdf still carries enough bits
    // for a 1e-10 round trip; above that the survival function is used.
    for (double x = -8.0; x <= 4.5; x += 0.01) REQUIRE_THAT(normal_quantile(normal_cdf(x)), WithinAbs(x, 1e-10));
    for (double x = 4.5; x <= 8.0; x += 0.01) REQUIRE_THAT(-normal_quantile(normal_sf(x)), WithinAbs(x, 1e-10));
    CHECK_THAT(normal_quantile(0.05), WithinAbs(-1.6448536269514722, 1e-12));
}

TEST_CASE("quantile rejects probabilities outside (0, 1)", "[normal]") {
    for (double p : {0.0, 1.0, -0.1, 1.5, std::nan("")}) CHECK_THROWS_AS(normal_quantile(p), InputError);
}

TEST_CASE("1-D quadrature normalisation and moments", "[quadrature]") {
    const auto spec = QuadratureSpec::one_dim();
    CHECK_THAT(integrate_1d([](double x) { return normal_pdf(x); }, -8, 8, spec), WithinAbs(1.0, 1e-9));
    CHECK_THAT(integrate_1d([](double x) { return x * x * normal_pdf(x); }, -8, 8, spec), WithinAbs(1.0, 1e-8));
    for (int k = 0; k <= 6; ++k) {
        const double exact = k % 2 ? 0.0 : double_factorial(k - 1);
        const double v = integrate_1d([k](double x) { return std::pow(x, k) * normal_pdf(x); }, -8, 8, spec);
        CHECK_THAT(v, WithinAbs(exact, 1e-8));
    }
}

TEST_CASE("random degree-6 polynomials against Gaussian moments", "[quadrature][property]") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::array<double, 7> a;
        for (auto& c : a) c = coef(rng);
        double exact = 0.0;
        for (int k = 0; k <= 6; k += 2) exact += a[k] * double_factorial(k - 1);
        auto poly = [&](double x) {
            double s = 0.0;
            for (int k = 6; k >= 0; --k) s = s * x + a[k];
            return s * normal_pdf(x);
        };
        REQUIRE_THAT(integrate_1d(poly, -8, 8), WithinAbs(exact, 1e-8));
    }
}

TEST_CASE("2-D quadrature", "[quadrature]") {
    const auto spec = QuadratureSpec::two_dim();
    const auto box = normal_box(spec);
    CHECK_THAT(integrate_2d([](double x, double y) { return normal_pdf(x) * normal_pdf(y); }, box, spec),
               WithinAbs(1.0, 1e-8));
    const auto v = integrate_2d(
        [](double x, double y) {
            const double w = normal_pdf(x) * normal_pdf(y);
            return std::array<double, 3>{x * x * w, x * y * w, y * y * y * y * w};
        },
        box, spec);
    CHECK_THAT(v[0], WithinAbs(1.0, 1e-8));
    CHECK_THAT(v[1], WithinAbs(0.0, 1e-8));
    CHECK_THAT(v[2], WithinAbs(3.0, 1e-8));
}

TEST_CASE("quadrature error paths", "[quadrature]") {
    QuadratureSpec tight{1e-15, 1e-15, 8.0, 3, 1};
    try {
        integrate_1d([](double x) { return std::sqrt(std::abs(x)); }, -1.0, 1.0, tight);
        FAIL("expected QuadratureError");
    } catch (const QuadratureError& e) {
        REQUIRE(e.partial_estimate().size() == 1);
        CHECK_THAT(e.partial_estimate()[0], WithinAbs(4.0 / 3.0, 1e-2));
        CHECK(e.error_estimate() > 0.0);
    }
    CHECK_THROWS_AS(integrate_1d([](double) { return std::nan(""); }, 0.0, 1.0), NumericalError);
    CHECK_THROWS_AS(integrate_1d([](double x) { return x; }, 1.0, 0.0), InputError);
    CHECK_THROWS_AS(integrate_1d([](double x) { return x; }, 0.0, 1.0, QuadratureSpec{1e-9, 1e-12, 5.0}), InputError);
    CHECK_THROWS_AS(integrate_1d([](double x) { return x; }, 0.0, 1.0, QuadratureSpec{0.0, 1e-12, 8.0}), InputError);
}

TEST_CASE("Brent root finding", "[roots]") {
    auto r = find_root([](double x) { return x - 2.0; }, 0.0, 5.0);
    CHECK_THAT(r.root, WithinAbs(2.0, 1e-12));
    CHECK(r.report.converged);
    auto q = find_root([](double x) { return normal_cdf(x) - 0.05; }, -10.0, 10.0);
    CHECK_THAT(q.root, WithinAbs(normal_quantile(0.05), 1e-6));
    CHECK_THAT(q.root, WithinAbs(-1.6449, 1e-4));
    CHECK_THROWS_AS(find_root([](double x) { return x * x; }, 1.0, 2.0), InputError);
}

TEST_CASE("root is bracket independent for monotone functions", "[roots][property]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> lo(-9.0, -0.5), hi(1.5, 9.0);
    auto f = [](double x) { return std::atan(x - 1.0) + 0.1 * (x - 1.0); };
    for (int i = 0; i < 100; ++i) REQUIRE_THAT(find_root(f, lo(rng), hi(rng)).root, WithinAbs(1.0, 1e-10));
}

TEST_CASE("Newton on small systems", "[newton]") {
    auto lin = solve_system([](const Vec& v) { return Vec{v[0] - 1.0, v[1] - 2.0}; }, {0.0, 0.0}, 1e-12);
    CHECK_THAT(lin.solution[0], WithinAbs(1.0, 1e-10));
    CHECK_THAT(lin.solution[1], WithinAbs(2.0, 1e-10));
    CHECK(lin.report.converged);

    auto quad = solve_system([](const Vec& v) { return Vec{v[0] * v[0] - 4.0, v[1] - 1.0}; }, {1.0, 0.0}, 1e-12);
    CHECK_THAT(quad.solution[0], WithinAbs(2.0, 1e-9));
    CHECK_THAT(quad.solution[1], WithinAbs(1.0, 1e-9));
    CHECK(quad.report.residual_norm <= 1e-12);
}

TEST_CASE("Newton handles a singular Jacobian without NaN", "[newton]") {
    // Jacobian diag(2 v0, 1) is singular at the start v0 = 0.
    auto g = [](const Vec& v) { return Vec{v[0] * v[0] - 1.0, v[1]}; };
    auto r = solve_system(g, {0.0, 0.0}, 1e-12);
    CHECK(std::isfinite(r.solution[0]));
    CHECK_THAT(std::abs(r.solution[0]), WithinAbs(1.0, 1e-9));

    // No real root: must fail with a report, never return NaN.
    auto none = [](const Vec& v) { return Vec{v[0] * v[0] + 1.0, v[1]}; };
    try {
        solve_system(none, {0.0, 0.0}, 1e-12);
        FAIL("expected SolverError");
    } catch (const SolverError& e) {
        CHECK_FALSE(e.report().converged);
        CHECK(std::isfinite(e.report().residual_norm));
    }
}

TEST_CASE("Newton reproduces direct solutions of linear systems", "[newton][property]") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    int tested = 0;
    while (tested < 100) {
        const int n = 1 + tested % 3;
        std::array<std::array<double, 3>, 3> A{};
        std::array<double, 3> b{};
        for (int i = 0; i < n; ++i) {
            b[i] = u(rng);
            for (int j = 0; j < n; ++j) A[i][j] = u(rng);
        }
        // Cramer's rule as the oracle.
        auto det = [&](const std::array<std::array<double, 3>, 3>& M) {
            if (n == 1) return M[0][0];
            if (n == 2) return M[0][0] * M[1][1] - M[0][1] * M[1][0];
            return M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) - M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
                   M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
        };
        const double d = det(A);
        double norm = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) norm = std::max(norm, std::abs(A[i][j]));
        if (std::abs(d) < 1e-2 * std::pow(norm, n)) continue;  // keep the conditioning modest
        std::array<double, 3> x{};
        for (int k = 0; k < n; ++k) {
            auto M = A;
            for (int i = 0; i < n; ++i) M[i][k] = b[i];
            x[k] = det(M) / d;
        }
        auto g = [&](const Vec& v) {
            Vec r(n);
            for (int i = 0; i < n; ++i) {
                r[i] = -b[i];
                for (int j = 0; j < n; ++j) r[i] += A[i][j] * v[j];
            }
            return r;
        };
        auto r = solve_system(g, Vec(n, 0.0), 1e-13);
        for (int k = 0; k < n; ++k) REQUIRE_THAT(r.solution[k], WithinAbs(x[k], 1e-10));
        ++tested;
    }
}

TEST_CASE("Newton input validation", "[newton]") {
    auto g = [](const Vec& v) { return v; };
    CHECK_THROWS_AS(solve_system(g, {}, 1e-8), InputError);
    CHECK_THROWS_AS(solve_system(g, {1.0}, 0.0), InputError);
    CHECK_THROWS_AS(solve_system([](const Vec&) { return Vec{1.0, 2.0}; }, {1.0}, 1e-8), InputError);
}
