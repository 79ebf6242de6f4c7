#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gnat/harmonicity.hpp"
#include "gnat/numeric.hpp"
#include "gnat/quadrature.hpp"

using namespace gnat;

namespace {

const char* kExampleA = "example_a:lambda=1,mu=2,k=1,eps=0.5";
const char* kExampleB = "example_b:lambda=1,eta=1,eps=0.5";
const char* kGeneric = "custom:alpha1=1+0.2*t,alpha2=0.3/(1+t),alpha3=0.4,beta1=0.1,beta2=0.2*exp(-t),beta3=0.05*t";
const char* kFam1 = "custom:alpha1=1,alpha3=0.5,beta1=0.3/(1+t),beta3=-0.3/(1+t)";

Vec vec(std::initializer_list<double> xs) {
    Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

}  // namespace

TEST_CASE("pullback metric examples") {
    const ChartedManifold T = make_torus(2);
    const VectorField V = parallel_field(T, vec({0.6, 0.8}));
    const Point p = T.point(0, vec({0.3, 2.0}));
    const Vec X = vec({1.0, -0.5}), Y = vec({0.2, 0.7});
    CHECK(pullback_metric(T, preset_sasaki(), V, p, X, Y) == doctest::Approx(X.dot(Y)));
    CHECK(pullback_metric(T, preset_cheeger_gromoll(), V, p, X, Y) == doctest::Approx(X.dot(Y)));
    CHECK(pullback_metric(T, sextet_from_spec(kGeneric), V, p, Vec::Zero(2), Vec::Zero(2)) == 0.0);
}

TEST_CASE("energy density examples") {
    const ChartedManifold T = make_torus(3);
    const Point p = T.point(0, vec({0.1, 0.2, 0.3}));
    CHECK(energy_density(T, preset_sasaki(), parallel_field(T, vec({1, 0, 0})), p) == doctest::Approx(1.5));
    CHECK(energy_density(T, preset_sasaki(), zero_field(T), p) == doctest::Approx(1.5));
    const ChartedManifold S3 = make_sphere(3);
    for (const Point& q : S3.sample_points(5, 2))
        CHECK(energy_density(S3, preset_sasaki(), hopf_field(S3), q) == doctest::Approx(2.5).epsilon(1e-8));
}

TEST_CASE("energy density equals half the trace of the pullback metric") {
    for (const char* base : {"torus:2", "sphere:2", "sphere:3", "product:r1xsphere:2"}) {
        const ChartedManifold M = manifold_from_spec(base);
        for (const char* spec : {"sasaki", "cg", kExampleA, kGeneric, "oproiu:v=1+t,w=1/(1+t)"}) {
            const MetricSextet F = sextet_from_spec(spec);
            for (int k = 0; k < 5; ++k) {
                const VectorField V = random_field(M, 100 + k);
                const Point p = M.sample_points(1, 200 + k)[0];
                const double e = energy_density(M, F, V, p);
                CHECK(e == doctest::Approx(energy_density_trace(M, F, V, p)).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("quadrature energy matches the constant-length closed form") {
    for (const char* base : {"torus:2", "torus:3", "sphere:3"}) {
        const ChartedManifold M = manifold_from_spec(base);
        const QuadratureRule rule = quadrature_rule(M);
        for (const char* spec : {"sasaki", "cg", kExampleA}) {
            const MetricSextet F = sextet_from_spec(spec);
            for (double rho : {0.7, 1.6}) {
                const VectorField V = random_constant_length_field(M, rho, 9);
                const double E = energy(M, F, V, rule);
                const double closed = energy_constant_length(F, rho, M.dim, rule.total_weight(),
                                                             integral_nabla_norm2(M, V, rule));
                INFO(base << " " << spec << " rho=" << rho);
                CHECK(E == doctest::Approx(closed).epsilon(1e-4));
                CHECK(E >= energy_lower_bound(F, rho, M.dim, rule.total_weight()));
            }
        }
    }
}

TEST_CASE("Hopf energy and parallel energy") {
    const ChartedManifold S3 = make_sphere(3);
    const QuadratureRule rule = quadrature_rule(S3);
    CHECK(energy(S3, preset_sasaki(), hopf_field(S3), rule) == doctest::Approx(5 * M_PI * M_PI).epsilon(1e-10));
    const ChartedManifold T = make_torus(2);
    const QuadratureRule tr = quadrature_rule(T);
    const VectorField V = parallel_field(T, vec({1.0, 1.0}));
    const MetricSextet F = sextet_from_spec(kExampleB);
    const double closed = 0.5 * derived_scalars(F, 2.0, 2).F_bracket * 4 * M_PI * M_PI;
    CHECK(energy(T, F, V, tr) == doctest::Approx(closed).epsilon(1e-12));
    CHECK(energy_lower_bound(F, 2.0, 2, 4 * M_PI * M_PI) == doctest::Approx(closed));
}

TEST_CASE("Sasaki tension reduces to curvature trace and rough Laplacian") {
    const ChartedManifold S2 = make_sphere(2);
    for (int k = 0; k < 10; ++k) {
        const VectorField V = random_field(S2, k);
        const Point p = S2.sample_points(1, 50 + k)[0];
        const FieldJet J = field_jet(S2, V, p, true);
        const TensionResult t = tension_from_jet(J, preset_sasaki());
        CHECK(J.norm(t.tau_h + J.trR) < 1e-12 * (1 + J.norm(J.trR)));
        CHECK(J.norm(t.tau_v + J.laplacian) < 1e-12 * (1 + J.norm(J.laplacian)));
        CHECK(J.norm(x_harmonic_T(J, preset_sasaki()) + J.laplacian) < 1e-12 * (1 + J.norm(J.laplacian)));
    }
}

TEST_CASE("tension diagnostics and the T(V) recombination") {
    const ChartedManifold S3 = make_sphere(3);
    const MetricSextet F = sextet_from_spec(kGeneric);
    const VectorField V = random_field(S3, 3);
    for (const Point& p : S3.sample_points(5, 4)) {
        const FieldJet J = field_jet(S3, V, p, true);
        const TensionResult t = tension_from_jet(J, F);
        CHECK(t.G_norm2 >= 0);
        CHECK(t.diagnostics.r2 == doctest::Approx(J.r2));
        CHECK(t.diagnostics.gQVV == doctest::Approx(J.inner(J.QV, J.V)));
        const SextetValues s = F.at(J.r2);
        const Vec T = s.a2.v * t.tau_h + s.b2.v * J.inner(t.tau_h, J.V) * J.V + s.a1.v * t.tau_v +
                      s.b1.v * J.inner(t.tau_v, J.V) * J.V;
        CHECK(J.norm(T - t.T) < 1e-12 * (1 + J.norm(T)));
        CHECK(J.norm(x_harmonic_T(J, F) - T) < 1e-9 * (1 + J.norm(T)));
    }
}

TEST_CASE("parallel fields and the bracket condition") {
    const ChartedManifold T = make_torus(3);
    const VectorField V = parallel_field(T, vec({0.5, -0.5, 1.0}));
    const auto pts = T.sample_points(20, 1);
    for (const char* spec : {"sasaki", "cg", kExampleA, "exp_family:k1=1,k2=2"}) {
        const HarmonicVerdict h = is_harmonic_map(T, sextet_from_spec(spec), V, pts, 1e-10);
        CHECK(h.harmonic);
        CHECK(h.max_G_norm < 1e-10);
        for (const Point& p : pts) CHECK(x_harmonic_T(T, sextet_from_spec(spec), V, p).norm() < 1e-10);
    }
    CHECK_FALSE(is_harmonic_map(T, sextet_from_spec(kExampleB), V, pts, 1e-6).harmonic);
    CHECK(parallel_condition(preset_sasaki(), 1.3, 3) == 0.0);
    CHECK(std::abs(parallel_condition(preset_cheeger_gromoll(), 1.3, 3)) < 1e-14);
    for (double rho : {0.5, 1.0, 4.0})
        CHECK(parallel_condition(sextet_from_spec(kExampleB), rho, 3) == doctest::Approx(-1.0 / (rho * rho)));
}

TEST_CASE("Hopf field verdicts") {
    const ChartedManifold S3 = make_sphere(3);
    const auto pts = S3.sample_points(50, 8);
    const VectorField xi = hopf_field(S3);
    CHECK_FALSE(is_harmonic_map(S3, preset_sasaki(), xi, pts, 1e-4).harmonic);
    CHECK(is_harmonic_map(S3, sextet_from_spec(kExampleA), xi, pts, 1e-4).harmonic);
    CHECK(is_harmonic_map(S3, sextet_from_spec("exp_family:k1=1,k2=2"), xi, pts, 1e-4).harmonic);
    for (const Point& p : pts) CHECK((x_harmonic_T(S3, preset_sasaki(), xi, p) + 2 * xi.at(p)).norm() < 1e-3);
}

TEST_CASE("harmonic verdicts agree across thread counts") {
    const ChartedManifold S2 = make_sphere(2);
    const VectorField V = random_field(S2, 12);
    const auto pts = S2.sample_points(40, 2);
    const HarmonicVerdict a = is_harmonic_map(S2, sextet_from_spec(kGeneric), V, pts, 1e-6, 1);
    const HarmonicVerdict b = is_harmonic_map(S2, sextet_from_spec(kGeneric), V, pts, 1e-6, 4);
    CHECK(a.max_G_norm == b.max_G_norm);
    CHECK(a.max_tau_v == b.max_tau_v);
}

TEST_CASE("constant-length classification") {
    for (double rho : {0.5, 1.0, 3.0}) {
        CHECK(classify_constant_length(preset_sasaki(), rho, 3).tag == ConstantLengthCase::II);
        CHECK(classify_constant_length(preset_cheeger_gromoll(), rho, 3).tag == ConstantLengthCase::II);
        CHECK(classify_constant_length(sextet_from_spec(kExampleA), rho, 3).tag == ConstantLengthCase::I);
        CHECK(classify_constant_length(sextet_from_spec(kExampleB), rho, 3).tag == ConstantLengthCase::III);
    }
    const ClassificationVerdict iv = classify_constant_length(sextet_from_spec("custom:alpha1=1,alpha3=t"), 2.0, 3);
    CHECK(iv.tag == ConstantLengthCase::IV);
    REQUIRE(iv.required_nabla_norm2.has_value());
    CHECK(*iv.required_nabla_norm2 == doctest::Approx(-2.0 * iv.bracket_prime / (1.0)));
    CHECK_FALSE(iv.realizable);
    const ClassificationVerdict iv2 =
        classify_constant_length(sextet_from_spec("custom:alpha1=1,alpha3=2/(1+t)"), 1.0, 3);
    CHECK(iv2.tag == ConstantLengthCase::IV);
    CHECK(iv2.realizable);
    CHECK(*iv2.required_nabla_norm2 > 0);
    CHECK_THROWS_AS(classify_constant_length(sextet_from_spec(kGeneric), 1.0, 3), PreconditionError);

    // The tag follows the signs of the two discriminants.
    for (const char* spec : {"sasaki", "cg", kExampleA, kExampleB, "custom:alpha1=1,alpha3=t"}) {
        const ClassificationVerdict v = classify_constant_length(sextet_from_spec(spec), 1.5, 3);
        const bool a = std::abs(v.alpha1_term) <= 1e-10, b = std::abs(v.bracket_prime) <= 1e-10;
        const ConstantLengthCase expected = a && b   ? ConstantLengthCase::I
                                            : !a && b ? ConstantLengthCase::II
                                            : a && !b ? ConstantLengthCase::III
                                                      : ConstantLengthCase::IV;
        CHECK(v.tag == expected);
    }
}

TEST_CASE("constant curvature conditions match the general tension") {
    const ChartedManifold S3 = make_sphere(3);
    for (const char* spec : {"sasaki", "cg", kExampleA}) {
        const MetricSextet F = sextet_from_spec(spec);
        const VectorField V = random_constant_length_field(S3, 1.2, 4);
        for (const Point& p : S3.sample_points(5, 3)) {
            const FieldJet J = field_jet(S3, V, p, true);
            const TensionResult t = tension_from_jet(J, F);
            const CurvatureResiduals r = constant_curvature_conditions(S3, F, V, p, 1.0);
            CHECK(J.norm(r.horizontal - t.tau_h) < 1e-6 * (1 + J.norm(t.tau_h)));
            CHECK(J.norm(r.vertical - t.tau_v) < 1e-6 * (1 + J.norm(t.tau_v)));
        }
        const VectorField xi = hopf_field(S3);
        for (const Point& p : S3.sample_points(3, 7)) {
            const CurvatureResiduals r = constant_curvature_conditions(S3, F, xi, p, 1.0);
            const Mat g = S3.metric(p);
            const Vec v = xi.at(p);
            for (const Vec& w : {r.horizontal, r.vertical}) {
                const Vec rest = w - (w.dot(g * v) / v.dot(g * v)) * v;
                CHECK(std::sqrt(rest.dot(g * rest)) < 1e-6);
            }
        }
    }
    const ChartedManifold T = make_torus(2);
    const VectorField W = random_constant_length_field(T, 0.8, 2);
    const Point p = T.point(0, vec({1.0, 2.0}));
    const TensionResult t = tension_field(T, preset_cheeger_gromoll(), W, p);
    const CurvatureResiduals r = constant_curvature_conditions(T, preset_cheeger_gromoll(), W, p, 0.0);
    CHECK((r.horizontal - t.tau_h).norm() < 1e-8);
    CHECK((r.vertical - t.tau_v).norm() < 1e-8);
}

TEST_CASE("rigidity families") {
    CHECK(rigidity_family(preset_sasaki()) == RigidityFamily::Fam1);
    CHECK(rigidity_family(sextet_from_spec(kFam1)) == RigidityFamily::Fam1);
    CHECK(rigidity_family(preset_cheeger_gromoll()) == RigidityFamily::None);
    CHECK(rigidity_family(sextet_from_spec("custom:alpha1=1,alpha2=1,alpha3=1,beta3=1/t,tmin=0.1")) ==
          RigidityFamily::Fam2);
    CHECK(rigidity_family(sextet_from_spec(kGeneric)) == RigidityFamily::None);
    CHECK(to_string(RigidityFamily::Fam2) == "fam2");
}

TEST_CASE("Cheeger-Gromoll T(V) against its direct formula") {
    const ChartedManifold T = make_torus(2);
    for (int k = 0; k < 20; ++k) {
        const VectorField V = random_field(T, 300 + k);
        const FieldJet J = field_jet(T, V, T.sample_points(1, 400 + k)[0], true);
        const double q = 1 + J.r2;
        const Vec expected = -J.laplacian / q - J.nabla_grad_V / (q * q) +
                             (-J.inner(J.laplacian, J.V) + (2 + J.r2) / q * J.nabla_norm2 -
                              J.grad_r2_norm2 / (4 * q)) / q * J.V;
        CHECK(J.norm(x_harmonic_T(J, preset_cheeger_gromoll()) - expected) < 1e-8 * (1 + J.norm(expected)));
    }
}

TEST_CASE("constant-length X-harmonicity residual") {
    const double rho = 1.3;
    CHECK(x_harmonic_constant_length_residual(preset_cheeger_gromoll(), rho, 3, 0.7, 0.2) > 0);
    CHECK(x_harmonic_constant_length_residual(preset_sasaki(), rho, 3, 0.7, 0.2) == doctest::Approx(0.7 / rho));
    CHECK(std::abs(x_harmonic_constant_length_residual(sextet_from_spec(kExampleA), rho, 3, 0.7, 5.0)) < 1e-12);

    // For a constant-length field the scalar coefficient of T(V) along V is the residual.
    const ChartedManifold S3 = make_sphere(3);
    const VectorField V = random_constant_length_field(S3, rho, 5);
    for (const Point& p : S3.sample_points(3, 1)) {
        const FieldJet J = field_jet(S3, V, p, true);
        const Vec T = x_harmonic_T(J, preset_cheeger_gromoll());
        if (!is_collinear(J.g, J.laplacian, J.V)) continue;
        const double res = x_harmonic_constant_length_residual(preset_cheeger_gromoll(), rho, 3, J.nabla_norm2, J.div);
        CHECK(J.norm(T) > 0);
        CHECK(res > 0);
    }
}

TEST_CASE("Killing field condition on Einstein spaces") {
    CHECK(killing_einstein_condition(preset_sasaki(), 1.0, 6.0, 3) == doctest::Approx(2.0));
    CHECK(std::abs(killing_einstein_condition(sextet_from_spec("exp_family:k1=1,k2=2"), 1.0, 6.0, 3)) < 1e-14);
    CHECK(killing_einstein_condition(preset_cheeger_gromoll(), 1.0, 0.0, 3) == doctest::Approx(0.0).scale(1));
}

TEST_CASE("T(V) vanishes exactly when tau_v does for first-family sextets") {
    const ChartedManifold T = make_torus(2);
    const MetricSextet F = sextet_from_spec(kFam1);
    for (int k = 0; k < 20; ++k) {
        const VectorField V = (k % 2 == 0) ? parallel_field(T, vec({0.2 * k, -0.4})) : random_field(T, 500 + k);
        const FieldJet J = field_jet(T, V, T.sample_points(1, 600 + k)[0], true);
        const TensionResult t = tension_from_jet(J, F);
        const double nv = J.norm(t.tau_v), nT = J.norm(t.T);
        CHECK((nv <= 1e-9) == (nT <= 1e-9));
        const SextetValues s = F.at(J.r2);
        const double p1 = s.a1.v + J.r2 * s.b1.v;
        CHECK(nT >= std::min(s.a1.v, p1) * nv * (1 - 1e-9) - 1e-14);
        CHECK(nT <= std::max(s.a1.v, p1) * nv * (1 + 1e-9) + 1e-14);
    }
}

TEST_CASE("collinearity") {
    const Mat g = Mat::Identity(2, 2);
    CHECK(is_collinear(g, vec({2, 4}), vec({1, 2})));
    CHECK_FALSE(is_collinear(g, vec({2, 4.1}), vec({1, 2})));
    CHECK(collinearity_residual(g, Vec::Zero(2), vec({1, 0})) == 0.0);
}

TEST_CASE("random constant-length fields have the requested length") {
    for (const char* base : {"torus:2", "torus:3", "sphere:3"}) {
        const ChartedManifold M = manifold_from_spec(base);
        const VectorField V = random_constant_length_field(M, 1.7, 3);
        for (const Point& p : M.sample_points(10, 2)) {
            const Vec v = V.at(p);
            CHECK(v.dot(M.metric(p) * v) == doctest::Approx(1.7).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(random_constant_length_field(make_sphere(2), 1.0, 1), PreconditionError);
}
