#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gnat/manifold.hpp"
#include "gnat/numeric.hpp"
#include "gnat/quadrature.hpp"

using namespace gnat;

TEST_CASE("weights sum to the volume") {
    CHECK(quadrature_rule(make_torus(2)).total_weight() == doctest::Approx(4 * M_PI * M_PI).epsilon(1e-13));
    CHECK(quadrature_rule(make_torus(3)).total_weight() == doctest::Approx(8 * M_PI * M_PI * M_PI).epsilon(1e-13));
    CHECK(quadrature_rule(make_torus(2, 3.0)).total_weight() == doctest::Approx(9.0).epsilon(1e-13));
    CHECK(quadrature_rule(make_sphere(2)).total_weight() == doctest::Approx(4 * M_PI).epsilon(1e-12));
    CHECK(quadrature_rule(make_sphere(3)).total_weight() == doctest::Approx(2 * M_PI * M_PI).epsilon(1e-12));
    CHECK(quadrature_rule(make_sphere(2, 2.0)).total_weight() == doctest::Approx(16 * M_PI).epsilon(1e-12));
    CHECK(quadrature_rule(make_sphere(3, 0.5)).total_weight() == doctest::Approx(2 * M_PI * M_PI / 8).epsilon(1e-12));
}

TEST_CASE("default node counts and positive weights") {
    const QuadratureRule t = quadrature_rule(make_torus(2));
    CHECK(t.size() == 32 * 32);
    const QuadratureRule s2 = quadrature_rule(make_sphere(2));
    CHECK(s2.size() == 32 * 64);
    const QuadratureRule s3 = quadrature_rule(make_sphere(3));
    CHECK(s3.size() == 24 * 24 * 24);
    for (const auto* r : {&t, &s2, &s3})
        for (double w : r->weights) CHECK(w > 0);
    CHECK(quadrature_rule(make_torus(2), 8).size() == 64);
}

TEST_CASE("polynomial moments on spheres") {
    // int_{S^2} z^2 = 4 pi / 3; int_{S^3} y1^2 y3^2 = pi^2 / 12.
    const ChartedManifold S2 = make_sphere(2);
    const double m2 = integrate(quadrature_rule(S2), [&](const Point& p) {
        const Vec y = S2.sphere->to_ambient(p.chart, p.coords);
        return y[2] * y[2];
    });
    CHECK(m2 == doctest::Approx(4 * M_PI / 3).epsilon(1e-12));
    const ChartedManifold S3 = make_sphere(3);
    const double m4 = integrate(quadrature_rule(S3), [&](const Point& p) {
        const Vec y = S3.sphere->to_ambient(p.chart, p.coords);
        return y[0] * y[0] * y[2] * y[2];
    });
    CHECK(m4 == doctest::Approx(M_PI * M_PI / 12).epsilon(1e-10));
}

TEST_CASE("trapezoid is spectrally accurate for periodic integrands") {
    const ChartedManifold T = make_torus(2);
    const double v = integrate(quadrature_rule(T), [](const Point& p) {
        return std::exp(std::sin(p.coords[0])) * std::cos(p.coords[1]) * std::cos(p.coords[1]);
    });
    // int_0^{2pi} exp(sin x) dx = 2 pi I0(1).
    CHECK(v == doctest::Approx(2 * M_PI * std::cyl_bessel_i(0.0, 1.0) * M_PI).epsilon(1e-12));
}

TEST_CASE("integration is independent of the thread count") {
    const ChartedManifold S3 = make_sphere(3);
    const QuadratureRule r = quadrature_rule(S3);
    auto f = [&](const Point& p) {
        const Vec y = S3.sphere->to_ambient(p.chart, p.coords);
        return std::exp(y[0] - 0.3 * y[3]);
    };
    const double a = integrate(r, f, 1);
    for (int threads : {2, 3, 4}) CHECK(integrate(r, f, threads) == a);
}

TEST_CASE("unsupported manifolds are rejected") {
    CHECK_THROWS_AS(quadrature_rule(make_euclidean(2)), PreconditionError);
    CHECK_THROWS_AS(quadrature_rule(make_sphere(4)), PreconditionError);
}

TEST_CASE("pairwise summation") {
    std::vector<double> xs(1000, 0.1);
    CHECK(numeric::pairwise_sum(xs) == doctest::Approx(100.0).epsilon(1e-14));
    CHECK(numeric::pairwise_sum(std::vector<double>{}) == 0.0);
}
