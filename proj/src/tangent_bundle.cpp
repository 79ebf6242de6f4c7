#include "gnat/tangent_bundle.hpp"

#include "gnat/numeric.hpp"

#include <Eigen/SVD>

namespace gnat {

Vec to_raw(const Tensor3& gamma, const Vec& u, const TMVector& w) {
    const Eigen::Index n = u.size();
    Vec raw(2 * n);
    raw.head(n) = w.hor;
    raw.tail(n) = w.ver - contract(gamma, w.hor, u);
    return raw;
}

TMVector from_raw(const Tensor3& gamma, const Vec& u, const Vec& raw) {
    const Eigen::Index n = u.size();
    TMVector w;
    w.hor = raw.head(n);
    w.ver = raw.tail(n) + contract(gamma, w.hor, u);
    return w;
}

Mat hv_frame(const Tensor3& gamma, const Vec& u) {
    const int n = static_cast<int>(u.size());
    Mat P = Mat::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        P(i, i) = 1.0;
        P(n + i, n + i) = 1.0;
        for (int k = 0; k < n; ++k) {
            double s = 0.0;
            for (int j = 0; j < n; ++j) s += gamma(k, i, j) * u[j];
            P(n + k, i) = -s;
        }
    }
    return P;
}

Mat hv_frame(const ChartedManifold& M, const TMPoint& q) { return hv_frame(christoffel(M, q.base), q.u); }

double condition_number(const Mat& A) {
    Eigen::JacobiSVD<Mat> svd(A);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || s[s.size() - 1] == 0.0) return std::numeric_limits<double>::infinity();
    return s[0] / s[s.size() - 1];
}

Mat g_matrix(const MetricSextet& F, const Mat& g, const Tensor3& gamma, const Vec& u) {
    const Mat Ghv = lift_gram(F.at(u.dot(g * u)), g, u);
    const Mat Pinv = hv_frame(gamma, u).inverse();
    return Pinv.transpose() * Ghv * Pinv;
}

Mat g_matrix(const ChartedManifold& M, const MetricSextet& F, const TMPoint& q) {
    return g_matrix(F, M.metric(q.base), christoffel(M, q.base), q.u);
}

LiftedConnection::LiftedConnection(const ChartedManifold& M, const MetricSextet& F, const TMPoint& q)
    : g_(M.metric(q.base)), gamma_(christoffel(M, q.base)), R_(curvature(M, q.base)), u_(q.u) {
    table_ = coefficient_table(F, u_.dot(g_ * u_), M.dim);
}

Vec LiftedConnection::A(const Vec& X, const Vec& Y) const {
    const auto& c = table_.A;
    const Vec& u = u_;
    return c[1] * (R(X, u, Y) + R(Y, u, X)) + c[2] * (ip(Y, u) * X + ip(X, u) * Y) + c[3] * ip(R(X, u, Y), u) * u +
           c[4] * ip(X, Y) * u + c[5] * ip(X, u) * ip(Y, u) * u;
}

Vec LiftedConnection::B(const Vec& X, const Vec& Y) const {
    const auto& c = table_.B;
    const Vec& u = u_;
    return c[1] * R(X, u, Y) + c[2] * R(X, Y, u) + c[3] * (ip(Y, u) * X + ip(X, u) * Y) +
           c[4] * ip(R(X, u, Y), u) * u + c[5] * ip(X, Y) * u + c[6] * ip(X, u) * ip(Y, u) * u;
}

Vec LiftedConnection::C(const Vec& X, const Vec& Y) const {
    const auto& c = table_.C;
    const Vec& u = u_;
    return c[1] * R(Y, u, X) + c[2] * ip(X, u) * Y + c[3] * ip(Y, u) * X + c[4] * ip(R(X, u, Y), u) * u +
           c[5] * ip(X, Y) * u + c[6] * ip(X, u) * ip(Y, u) * u;
}

Vec LiftedConnection::D(const Vec& X, const Vec& Y) const {
    const auto& c = table_.D;
    const Vec& u = u_;
    return c[1] * R(Y, u, X) + c[2] * ip(X, u) * Y + c[3] * ip(Y, u) * X + c[4] * ip(R(X, u, Y), u) * u +
           c[5] * ip(X, Y) * u + c[6] * ip(X, u) * ip(Y, u) * u;
}

Vec LiftedConnection::E(const Vec& X, const Vec& Y) const {
    const auto& c = table_.E;
    const Vec& u = u_;
    return c[1] * (ip(Y, u) * X + ip(X, u) * Y) + c[2] * ip(X, Y) * u + c[3] * ip(X, u) * ip(Y, u) * u;
}

Vec LiftedConnection::F(const Vec& X, const Vec& Y) const {
    const auto& c = table_.F;
    const Vec& u = u_;
    return c[1] * (ip(Y, u) * X + ip(X, u) * Y) + c[2] * ip(X, Y) * u + c[3] * ip(X, u) * ip(Y, u) * u;
}

TMVector LiftedConnection::apply(Lift kx, const Vec& X, Lift ky, const Vec& Y, const Vec& nablaXY) const {
    if (kx == Lift::H && ky == Lift::H) return {nablaXY + A(X, Y), B(X, Y)};
    if (kx == Lift::H && ky == Lift::V) return {C(X, Y), nablaXY + D(X, Y)};
    if (kx == Lift::V && ky == Lift::H) return {C(Y, X), D(Y, X)};
    return {E(X, Y), F(X, Y)};
}

TMVector nabla_bar(const ChartedManifold& M, const MetricSextet& F, const TMPoint& q, Lift kx, const Vec& X, Lift ky,
                   const VectorField& Y) {
    const LiftedConnection L(M, F, q);
    const Vec nablaXY = nabla_matrix(M, Y, q.base) * X;
    return L.apply(kx, X, ky, Y.at(q.base), nablaXY);
}

namespace {

struct TMGeometry {
    int n;
    Vec z;
    std::vector<double> steps;
};

TMGeometry tm_coords(const TMPoint& q, const OracleSteps& steps) {
    const int n = static_cast<int>(q.u.size());
    TMGeometry T{n, Vec(2 * n), std::vector<double>(2 * n)};
    T.z << q.base.coords, q.u;
    const double hb = steps.base * (1.0 + q.base.coords.cwiseAbs().maxCoeff());
    const double hf = steps.fiber * (1.0 + q.u.cwiseAbs().maxCoeff());
    for (int i = 0; i < n; ++i) {
        T.steps[i] = hb;
        T.steps[n + i] = hf;
    }
    return T;
}

}  // namespace

Tensor3 oracle_christoffel_tm(const ChartedManifold& M, const MetricSextet& F, const TMPoint& q,
                              const OracleSteps& steps) {
    const TMGeometry T = tm_coords(q, steps);
    const int n = T.n, N = 2 * n;
    const int chart = q.base.chart;
    auto Gfun = [&](const Vec& z) {
        const Vec x = z.head(n);
        const Point p{chart, x};
        return g_matrix(F, M.metric(p), christoffel(M, p), Vec(z.tail(n)));
    };
    const Mat G = Gfun(T.z);
    Eigen::LLT<Mat> llt(G);
    if (llt.info() != Eigen::Success) throw SingularError("oracle: G is not positive definite at q");
    const Mat Ginv = llt.solve(Mat::Identity(N, N));
    std::vector<Mat> dG(N);
    for (int a = 0; a < N; ++a) dG[a] = numeric::partial(Gfun, T.z, a, T.steps[a]);
    Tensor3 Gb(N);
    for (int c = 0; c < N; ++c)
        for (int a = 0; a < N; ++a)
            for (int b = a; b < N; ++b) {
                double s = 0.0;
                for (int d = 0; d < N; ++d) s += Ginv(c, d) * (dG[a](d, b) + dG[b](d, a) - dG[d](a, b));
                Gb(c, a, b) = Gb(c, b, a) = 0.5 * s;
            }
    return Gb;
}

OracleComparison compare_with_oracle(const ChartedManifold& M, const MetricSextet& F, const TMPoint& q,
                                     const OracleSteps& steps) {
    const int n = M.dim, N = 2 * n;
    const TMGeometry T = tm_coords(q, steps);
    const Tensor3 Gb = oracle_christoffel_tm(M, F, q, steps);
    const LiftedConnection L(M, F, q);
    const Tensor3& gamma = L.gamma();
    const std::vector<Tensor3> dgamma = christoffel_derivative(M, q.base);
    const Mat P = hv_frame(gamma, q.u);

    // dP[d] = derivative of the frame columns along induced coordinate d.
    std::vector<Mat> dP(N, Mat::Zero(N, N));
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            for (int d = 0; d < n; ++d) {
                double s = 0.0;
                for (int l = 0; l < n; ++l) s += dgamma[d](k, j, l) * q.u[l];
                dP[d](n + k, j) = -s;
                dP[n + d](n + k, j) = -gamma(k, j, d);
            }
        }

    OracleComparison out;
    out.frame_condition = condition_number(P);
    out.g_condition = condition_number(g_matrix(M, F, q));
    out.base_step = T.steps[0];
    out.fiber_step = T.steps[n];
    for (int a = 0; a < N; ++a) {
        const Lift kx = a < n ? Lift::H : Lift::V;
        const int i = a % n;
        for (int b = 0; b < N; ++b) {
            const Lift ky = b < n ? Lift::H : Lift::V;
            const int j = b % n;
            Vec nablaXY(n);
            for (int k = 0; k < n; ++k) nablaXY[k] = gamma(k, i, j);
            const Vec closed = to_raw(gamma, q.u, L.apply(kx, Vec::Unit(n, i), ky, Vec::Unit(n, j), nablaXY));

            const Vec Xt = P.col(a), Yt = P.col(b);
            Vec oracle = Vec::Zero(N);
            for (int d = 0; d < N; ++d) oracle += Xt[d] * dP[d].col(b);
            for (int c = 0; c < N; ++c)
                for (int d = 0; d < N; ++d)
                    for (int e = 0; e < N; ++e) oracle[c] += Gb(c, d, e) * Xt[d] * Yt[e];

            out.max_abs_error = std::max(out.max_abs_error, (closed - oracle).cwiseAbs().maxCoeff());
            out.max_oracle = std::max(out.max_oracle, oracle.cwiseAbs().maxCoeff());
        }
    }
    out.rel_error = out.max_abs_error / (1.0 + out.max_oracle);
    return out;
}

TMVector tension_oracle(const ChartedManifold& M, const MetricSextet& F, const VectorField& V, const Point& p,
                        const OracleSteps& steps) {
    const int n = M.dim, N = 2 * n;
    const Mat g = M.metric(p);
    const Mat ginv = g.inverse();
    const Tensor3 gamma = christoffel(M, p);
    const Vec v = V.at(p);
    const TMPoint q{p, v};
    const Tensor3 Gb = oracle_christoffel_tm(M, F, q, steps);

    const Mat J = field_jacobian(V, p);
    const double h = numeric::base_step(p.coords);
    std::vector<Mat> H(n);  // H[i](k, j) = d_i d_j V^k
    for (int i = 0; i < n; ++i)
        H[i] = numeric::partial([&](const Vec& x) { return field_jacobian(V, Point{p.chart, x}); }, p.coords, i, h);

    Mat df(N, n);  // column i = d_i f
    df.topRows(n) = Mat::Identity(n, n);
    df.bottomRows(n) = J;
    Vec tau = Vec::Zero(N);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double w = ginv(i, j);
            if (w == 0.0) continue;
            Vec term = Vec::Zero(N);
            term.tail(n) = H[i].col(j);
            for (int k = 0; k < n; ++k) term -= gamma(k, i, j) * df.col(k);
            for (int a = 0; a < N; ++a)
                for (int b = 0; b < N; ++b)
                    for (int c = 0; c < N; ++c) term[a] += Gb(a, b, c) * df(b, i) * df(c, j);
            tau += w * term;
        }
    return from_raw(gamma, v, tau);
}

std::vector<TMPoint> sample_tm_points(const ChartedManifold& M, size_t count, std::uint64_t seed, double t_lo,
                                      double t_hi) {
    if (!(t_lo >= 0.0) || !(t_hi >= t_lo)) throw PreconditionError("sample_tm_points: bad |u|^2 range");
    numeric::Rng rng(seed * 0x100000001B3ULL + 17);
    std::vector<TMPoint> out;
    for (const Point& p : M.sample_points(count, seed)) {
        const Mat g = M.metric(p);
        Vec u = rng.normal_vec(M.dim);
        u /= std::sqrt(u.dot(g * u));
        u *= std::sqrt(rng.uniform(t_lo, t_hi));
        out.push_back({p, u});
    }
    return out;
}

}  // namespace gnat
