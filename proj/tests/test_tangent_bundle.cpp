#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gnat/harmonicity.hpp"
#include "gnat/numeric.hpp"
#include "gnat/tangent_bundle.hpp"

#include <functional>

using namespace gnat;

namespace {

const std::vector<std::string> kPresets = {
    "sasaki", "cg", "example_a:lambda=1,mu=2,k=1,eps=0.5", "exp_family:k1=1,k2=2",
    "custom:alpha1=1+0.2*t,alpha2=0.3/(1+t),alpha3=0.4,beta1=0.1,beta2=0.2*exp(-t),beta3=0.05*t"};

// Raw induced-coordinate components of the lift of d_j at (x, u).
Vec lifted_raw(const ChartedManifold& M, int chart, const Vec& xu, int j, Lift k) {
    const int n = M.dim;
    Vec e = Vec::Zero(n);
    e[j] = 1;
    const Vec x = xu.head(n), u = xu.tail(n);
    Vec raw = Vec::Zero(2 * n);
    if (k == Lift::H) {
        raw.head(n) = e;
        raw.tail(n) = -contract(christoffel(M, Point{chart, x}), e, u);
    } else {
        raw.tail(n) = e;
    }
    return raw;
}

Mat raw_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& xu) {
    return numeric::jacobian(f, xu, 1e-5);
}

// nabla-bar of lifted coordinate fields, d_i^{ki} applied to d_j^{kj}.
TMVector nabla_lifted(const ChartedManifold& M, const LiftedConnection& L, const Point& p, int i, Lift ki, int j,
                      Lift kj) {
    const int n = M.dim;
    const Vec ei = Vec::Unit(n, i), ej = Vec::Unit(n, j);
    const Vec nab = (ki == Lift::H) ? contract(christoffel(M, p), ei, ej) : Vec(Vec::Zero(n));
    return L.apply(ki, ei, kj, ej, nab);
}

double G_tm(const MetricSextet& F, const Mat& g, const Vec& u, const TMVector& a, const Vec& Y, Lift ky) {
    return g_on_lifts(F, g, u, a.hor, Y, Lift::H, ky) + g_on_lifts(F, g, u, a.ver, Y, Lift::V, ky);
}

}  // namespace

TEST_CASE("horizontal lifts project to the base vector") {
    const ChartedManifold M = make_sphere(2);
    for (const TMPoint& q : sample_tm_points(M, 5, 3, 0.5, 2.0)) {
        const Mat P = hv_frame(M, q);
        CHECK((P.topLeftCorner(2, 2) - Mat::Identity(2, 2)).norm() == 0.0);
        CHECK(P.topRightCorner(2, 2).norm() == 0.0);
        CHECK(std::isfinite(condition_number(P)));
        CHECK(condition_number(P) < 1e6);
    }
    const ChartedManifold T = make_torus(2);
    const TMPoint q{T.point(0, Vec::Constant(2, 1.0)), Vec::Constant(2, 0.7)};
    CHECK((hv_frame(T, q) - Mat::Identity(4, 4)).norm() == 0.0);
}

TEST_CASE("h/v to raw round trip is exact") {
    const ChartedManifold M = make_sphere(3);
    numeric::Rng rng(4);
    for (const TMPoint& q : sample_tm_points(M, 10, 9, 0.25, 4.0)) {
        const Tensor3 G = christoffel(M, q.base);
        const TMVector w{rng.normal_vec(3), rng.normal_vec(3)};
        const TMVector back = from_raw(G, q.u, to_raw(G, q.u, w));
        CHECK((back.hor - w.hor).norm() < 1e-12);
        CHECK((back.ver - w.ver).norm() < 1e-12);
    }
}

TEST_CASE("G matrix examples") {
    const ChartedManifold T = make_torus(2);
    const TMPoint q{T.point(0, Vec::Constant(2, 0.4)), (Vec(2) << 0.9, -0.3).finished()};
    CHECK((g_matrix(T, preset_sasaki(), q) - Mat::Identity(4, 4)).norm() < 1e-15);

    const ChartedManifold S2 = make_sphere(2);
    for (const TMPoint& p : sample_tm_points(S2, 10, 6, 0.25, 4.0)) {
        const Mat P = hv_frame(S2, p);
        const Mat Ghv = P.transpose() * g_matrix(S2, preset_cheeger_gromoll(), p) * P;
        CHECK(Ghv.topRightCorner(2, 2).norm() < 1e-12);
        for (const auto& spec : kPresets) {
            const Mat Gm = g_matrix(S2, sextet_from_spec(spec), p);
            CHECK((Gm - Gm.transpose()).norm() < 1e-12 * Gm.norm());
            CHECK(Eigen::SelfAdjointEigenSolver<Mat>(Gm).eigenvalues().minCoeff() > 0);
        }
    }
}

TEST_CASE("Sasaki connection on the flat torus") {
    const ChartedManifold T = make_torus(2);
    const MetricSextet F = preset_sasaki();
    const TMPoint q{T.point(0, Vec::Constant(2, 1.1)), (Vec(2) << 0.5, 0.8).finished()};
    const VectorField Y = field_from_spec(T, "expr:sin(x1);cos(x2)*x1");
    const Vec X = (Vec(2) << 0.3, -1.2).finished();
    const TMVector vv = nabla_bar(T, F, q, Lift::V, X, Lift::V, Y);
    CHECK(vv.hor.norm() == 0.0);
    CHECK(vv.ver.norm() == 0.0);
    const TMVector hh = nabla_bar(T, F, q, Lift::H, X, Lift::H, Y);
    CHECK((hh.hor - nabla_matrix(T, Y, q.base) * X).norm() < 1e-12);
    CHECK(hh.ver.norm() < 1e-12);
}

TEST_CASE("oracle Christoffel symbols") {
    const ChartedManifold T = make_torus(2);
    const TMPoint q{T.point(0, Vec::Constant(2, 1.1)), (Vec(2) << 0.5, 0.8).finished()};
    CHECK(oracle_christoffel_tm(T, preset_sasaki(), q).max_abs() < 1e-9);
    const Tensor3 cg = oracle_christoffel_tm(T, preset_cheeger_gromoll(), q);
    CHECK(cg.max_abs() > 1e-2);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            for (int c = 0; c < 4; ++c) CHECK(cg(a, b, c) == doctest::Approx(cg(a, c, b)).epsilon(1e-9).scale(1));
    CHECK(compare_with_oracle(T, preset_cheeger_gromoll(), q).rel_error < 1e-5);
}

TEST_CASE("closed-form connection equals the oracle on every preset and base") {
    for (const char* base : {"torus:2", "sphere:2", "sphere:3", "torus:3", "product:r1xsphere:2"}) {
        const ChartedManifold M = manifold_from_spec(base);
        const auto qs = sample_tm_points(M, 10, 42, 0.25, 4.0);
        for (const auto& spec : kPresets) {
            const MetricSextet F = sextet_from_spec(spec);
            double worst = 0;
            for (const TMPoint& q : qs) worst = std::max(worst, compare_with_oracle(M, F, q).rel_error);
            INFO(base << " " << spec);
            CHECK(worst < 1e-5);
        }
    }
}

TEST_CASE("closed-form connection is torsion free") {
    const ChartedManifold M = make_sphere(2);
    const int n = 2;
    for (const TMPoint& q : sample_tm_points(M, 4, 8, 0.5, 3.0)) {
        Vec xu(2 * n);
        xu << q.base.coords, q.u;
        const Tensor3 G = christoffel(M, q.base);
        for (const auto& spec : kPresets) {
            const MetricSextet F = sextet_from_spec(spec);
            const LiftedConnection L(M, F, q);
            for (Lift ki : {Lift::H, Lift::V})
                for (Lift kj : {Lift::H, Lift::V})
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j) {
                            auto Xf = [&](const Vec& z) { return lifted_raw(M, q.base.chart, z, i, ki); };
                            auto Yf = [&](const Vec& z) { return lifted_raw(M, q.base.chart, z, j, kj); };
                            const Vec bracket = raw_jacobian(Yf, xu) * Xf(xu) - raw_jacobian(Xf, xu) * Yf(xu);
                            const TMVector a = nabla_lifted(M, L, q.base, i, ki, j, kj);
                            const TMVector b = nabla_lifted(M, L, q.base, j, kj, i, ki);
                            const Vec diff = to_raw(G, q.u, a) - to_raw(G, q.u, b);
                            CHECK((diff - bracket).norm() < 1e-5 * (1 + bracket.norm()));
                        }
        }
    }
}

TEST_CASE("closed-form connection is metric compatible") {
    const ChartedManifold M = make_sphere(2);
    const int n = 2;
    for (const TMPoint& q : sample_tm_points(M, 4, 12, 0.5, 3.0)) {
        Vec xu(2 * n);
        xu << q.base.coords, q.u;
        for (const auto& spec : kPresets) {
            const MetricSextet F = sextet_from_spec(spec);
            const LiftedConnection L(M, F, q);
            const Mat g = M.metric(q.base);
            for (Lift ki : {Lift::H, Lift::V})
                for (Lift kj : {Lift::H, Lift::V})
                    for (Lift kk : {Lift::H, Lift::V})
                        for (int i = 0; i < n; ++i)
                            for (int j = 0; j < n; ++j)
                                for (int k = 0; k < n; ++k) {
                                    auto Gjk = [&](const Vec& z) {
                                        const Point p{q.base.chart, z.head(n)};
                                        return g_on_lifts(F, M.metric(p), z.tail(n), Vec::Unit(n, j), Vec::Unit(n, k),
                                                          kj, kk);
                                    };
                                    const Vec dir = lifted_raw(M, q.base.chart, xu, i, ki);
                                    const double h = 1e-5;
                                    const double lhs = (Gjk(xu + h * dir) - Gjk(xu - h * dir)) / (2 * h);
                                    const double rhs =
                                        G_tm(F, g, q.u, nabla_lifted(M, L, q.base, i, ki, j, kj), Vec::Unit(n, k), kk) +
                                        G_tm(F, g, q.u, nabla_lifted(M, L, q.base, i, ki, k, kk), Vec::Unit(n, j), kj);
                                    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-5).scale(1));
                                }
        }
    }
}

TEST_CASE("tension from the oracle matches the closed form") {
    for (const char* base : {"torus:2", "sphere:2", "sphere:3"}) {
        const ChartedManifold M = manifold_from_spec(base);
        const VectorField V = random_field(M, 77);
        for (const auto& spec : kPresets) {
            const MetricSextet F = sextet_from_spec(spec);
            for (const Point& p : M.sample_points(3, 5)) {
                const FieldJet J = field_jet(M, V, p, true);
                if (!is_riemannian(F, {J.r2}, M.dim).pass) continue;
                const TensionResult t = tension_from_jet(J, F);
                const TMVector o = tension_oracle(M, F, V, p);
                const double scale = 1 + J.norm(t.tau_h) + J.norm(t.tau_v);
                INFO(base << " " << spec);
                CHECK(J.norm(o.hor - t.tau_h) < 1e-5 * scale);
                CHECK(J.norm(o.ver - t.tau_v) < 1e-5 * scale);
            }
        }
    }
}

TEST_CASE("sampled TM points respect the requested length range") {
    const ChartedManifold M = make_sphere(3);
    const auto qs = sample_tm_points(M, 30, 1, 0.25, 4.0);
    CHECK(qs.size() == 30);
    for (const TMPoint& q : qs) {
        const double t = q.u.dot(M.metric(q.base) * q.u);
        CHECK(t >= 0.25 - 1e-12);
        CHECK(t <= 4.0 + 1e-12);
    }
    const auto again = sample_tm_points(M, 30, 1, 0.25, 4.0);
    CHECK((again[7].u - qs[7].u).norm() == 0.0);
}
