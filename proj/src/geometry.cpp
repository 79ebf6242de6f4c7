#include "gnat/geometry.hpp"

#include "gnat/numeric.hpp"

#include <Eigen/Eigenvalues>

namespace gnat {

namespace {

Mat inverse_metric(const Mat& g) {
    Eigen::LLT<Mat> llt(g);
    if (llt.info() != Eigen::Success) throw SingularError("metric matrix is not positive definite");
    return llt.solve(Mat::Identity(g.rows(), g.cols()));
}

Vec flatten(const Tensor3& T) {
    return Eigen::Map<const Vec>(T.raw().data(), static_cast<Eigen::Index>(T.raw().size()));
}

Tensor3 unflatten(const Vec& v, int n) {
    Tensor3 T(n);
    std::copy(v.data(), v.data() + v.size(), T.raw().begin());
    return T;
}

Tensor3 christoffel_at(const ChartedManifold& M, int chart, const Vec& x) {
    if (M.christoffel_fn) return M.christoffel_fn(chart, x);
    return christoffel_fd(M, Point{chart, x});
}

Mat nabla_at(const ChartedManifold& M, const VectorField& V, int chart, const Vec& x) {
    const Point p{chart, x};
    const Mat J = field_jacobian(V, p);
    const Tensor3 G = christoffel_at(M, chart, x);
    const Vec v = V.comps(chart, x);
    const int n = M.dim;
    Mat N = J;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) N(k, i) += G(k, i, j) * v[j];
    return N;
}

}  // namespace

Tensor3 christoffel_fd(const ChartedManifold& M, const Point& p) {
    const int n = M.dim;
    const Mat g = M.metric_fn(p.chart, p.coords);
    const Mat ginv = inverse_metric(g);
    const double h = numeric::base_step(p.coords);
    std::vector<Mat> dg(n);
    for (int l = 0; l < n; ++l)
        dg[l] = numeric::partial([&](const Vec& x) { return M.metric_fn(p.chart, x); }, p.coords, l, h);
    Tensor3 G(n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int m = 0; m < n; ++m) s += ginv(k, m) * (dg[i](m, j) + dg[j](m, i) - dg[m](i, j));
                G(k, i, j) = 0.5 * s;
            }
    return G;
}

Tensor3 christoffel(const ChartedManifold& M, const Point& p) {
    if (M.christoffel_fn) {
        inverse_metric(M.metric(p));
        return M.christoffel_fn(p.chart, p.coords);
    }
    return christoffel_fd(M, p);
}

std::vector<Tensor3> christoffel_derivative(const ChartedManifold& M, const Point& p) {
    const int n = M.dim;
    const double h = numeric::base_step(p.coords);
    std::vector<Tensor3> dG;
    dG.reserve(n);
    auto f = [&](const Vec& x) { return flatten(christoffel_at(M, p.chart, x)); };
    for (int i = 0; i < n; ++i) dG.push_back(unflatten(numeric::partial(f, p.coords, i, h), n));
    return dG;
}

Tensor4 curvature(const ChartedManifold& M, const Point& p) {
    if (M.curvature_fn) return M.curvature_fn(p.chart, p.coords);
    const int n = M.dim;
    const Tensor3 G = christoffel(M, p);
    const std::vector<Tensor3> dG = christoffel_derivative(M, p);
    Tensor4 R(n);
    for (int l = 0; l < n; ++l)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) {
                    double s = dG[i](l, j, k) - dG[j](l, i, k);
                    for (int m = 0; m < n; ++m) s += G(l, i, m) * G(m, j, k) - G(l, j, m) * G(m, i, k);
                    R(l, i, j, k) = s;
                }
    return R;
}

Vec apply_curvature(const Tensor4& R, const Vec& X, const Vec& Y, const Vec& Z) {
    const int n = R.dim();
    Vec out = Vec::Zero(n);
    for (int l = 0; l < n; ++l) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            if (X[i] == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                if (Y[j] == 0.0) continue;
                for (int k = 0; k < n; ++k) s += R(l, i, j, k) * X[i] * Y[j] * Z[k];
            }
        }
        out[l] = s;
    }
    return out;
}

Mat ricci_operator(const Tensor4& R, const Mat& g) {
    const int n = R.dim();
    Mat Ric = Mat::Zero(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i) Ric(j, k) += R(i, i, j, k);
    return inverse_metric(g) * Ric;
}

Mat ricci_operator(const ChartedManifold& M, const Point& p) { return ricci_operator(curvature(M, p), M.metric(p)); }

Vec contract(const Tensor3& G, const Vec& X, const Vec& Y) {
    const int n = G.dim();
    Vec out = Vec::Zero(n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) out[k] += G(k, i, j) * X[i] * Y[j];
    return out;
}

Mat field_jacobian(const VectorField& V, const Point& p) {
    if (V.jacobian) return V.jacobian(p.chart, p.coords);
    return numeric::jacobian([&](const Vec& x) { return V.comps(p.chart, x); }, p.coords, numeric::base_step(p.coords));
}

Mat nabla_matrix(const ChartedManifold& M, const VectorField& V, const Point& p) {
    christoffel(M, p);
    return nabla_at(M, V, p.chart, p.coords);
}

TangentVector covariant_derivative(const ChartedManifold& M, const VectorField& V, const TangentVector& X) {
    return {X.base, nabla_matrix(M, V, X.base) * X.comps};
}

FieldJet field_jet(const ChartedManifold& M, const VectorField& V, const Point& p, bool with_second_order) {
    const int n = M.dim;
    FieldJet J;
    J.p = p;
    J.g = M.metric(p);
    J.ginv = inverse_metric(J.g);
    J.frame = numeric::orthonormal_frame(J.g);
    J.gamma = christoffel(M, p);
    J.V = V.at(p);
    J.nabla = nabla_at(M, V, p.chart, p.coords);

    const Mat& E = J.frame;
    J.r2 = J.inner(J.V, J.V);
    J.div = 0.0;
    J.nabla_norm2 = 0.0;
    for (int a = 0; a < n; ++a) {
        const Vec Ne = J.nabla * E.col(a);
        J.div += E.col(a).dot(J.g * Ne);
        J.nabla_norm2 += J.inner(Ne, Ne);
    }
    const Vec dr2 = 2.0 * J.nabla.transpose() * (J.g * J.V);
    J.grad_r2 = J.ginv * dr2;
    J.V_r2 = dr2.dot(J.V);
    J.grad_r2_norm2 = dr2.dot(J.grad_r2);
    J.nabla_V_V = J.nabla * J.V;
    J.nabla_grad_V = J.nabla * J.grad_r2;

    if (!with_second_order) return J;
    J.second_order = true;
    J.R = curvature(M, p);
    J.Q = ricci_operator(J.R, J.g);
    J.QV = J.Q * J.V;
    J.trR = Vec::Zero(n);
    for (int a = 0; a < n; ++a) J.trR += apply_curvature(J.R, J.nabla * E.col(a), J.V, E.col(a));

    // nabla^2 V(k, i, j) = d_i N(k, j) + Gamma^k_il N(l, j) - Gamma^l_ij N(k, l)
    const double h = numeric::base_step(p.coords);
    std::vector<Mat> dN(n);
    for (int i = 0; i < n; ++i)
        dN[i] = numeric::partial([&](const Vec& x) { return nabla_at(M, V, p.chart, x); }, p.coords, i, h);
    const Mat W = E * E.transpose();
    J.laplacian = Vec::Zero(n);
    for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (W(i, j) == 0.0) continue;
                double h2 = dN[i](k, j);
                for (int l = 0; l < n; ++l) h2 += J.gamma(k, i, l) * J.nabla(l, j) - J.gamma(l, i, j) * J.nabla(k, l);
                s += W(i, j) * h2;
            }
        J.laplacian[k] = -s;
    }
    return J;
}

Vec rough_laplacian(const ChartedManifold& M, const VectorField& V, const Point& p) {
    return field_jet(M, V, p, true).laplacian;
}

double divergence(const ChartedManifold& M, const VectorField& V, const Point& p) { return field_jet(M, V, p, false).div; }

Vec grad_r2(const ChartedManifold& M, const VectorField& V, const Point& p) { return field_jet(M, V, p, false).grad_r2; }

Vec nabla_grad_r2_V(const ChartedManifold& M, const VectorField& V, const Point& p) {
    return field_jet(M, V, p, false).nabla_grad_V;
}

Vec trace_R_term(const ChartedManifold& M, const VectorField& V, const Point& p) { return field_jet(M, V, p, true).trR; }

ManifoldReport validate_manifold(const ChartedManifold& M, size_t samples, std::uint64_t seed, double tol) {
    ManifoldReport rep;
    rep.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (const Point& p : M.sample_points(samples, seed)) {
        const Mat g = M.metric(p);
        rep.max_asymmetry = std::max(rep.max_asymmetry, (g - g.transpose()).cwiseAbs().maxCoeff());
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (g + g.transpose()));
        rep.min_eigenvalue = std::min(rep.min_eigenvalue, es.eigenvalues().minCoeff());
        if (M.christoffel_fn) {
            const Tensor3 a = M.christoffel_fn(p.chart, p.coords);
            const Tensor3 f = christoffel_fd(M, p);
            double diff = 0.0;
            for (size_t i = 0; i < a.raw().size(); ++i) diff = std::max(diff, std::abs(a.raw()[i] - f.raw()[i]));
            rep.max_christoffel_error = std::max(rep.max_christoffel_error, diff / (1.0 + f.max_abs()));
        }
        for (const Chart& c : M.charts) {
            if (c.id == p.chart) continue;
            auto q = M.to_chart(p, c.id);
            if (!q) continue;
            const Mat J = M.transition_jacobian(p, c.id);
            const Mat pulled = J.transpose() * M.metric(*q) * J;
            rep.max_overlap_error = std::max(rep.max_overlap_error, (pulled - g).cwiseAbs().maxCoeff() / (1.0 + g.cwiseAbs().maxCoeff()));
            ++rep.overlap_points;
        }
    }
    rep.ok = rep.min_eigenvalue > 0.0 && rep.max_asymmetry <= tol && rep.max_overlap_error <= tol &&
             rep.max_christoffel_error <= tol;
    return rep;
}

double field_overlap_error(const ChartedManifold& M, const VectorField& V, size_t samples, std::uint64_t seed) {
    double worst = 0.0;
    for (const Point& p : M.sample_points(samples, seed)) {
        for (const Chart& c : M.charts) {
            if (c.id == p.chart) continue;
            auto q = M.to_chart(p, c.id);
            if (!q) continue;
            const Vec moved = M.transition_jacobian(p, c.id) * V.at(p);
            worst = std::max(worst, (V.at(*q) - moved).cwiseAbs().maxCoeff() / (1.0 + moved.cwiseAbs().maxCoeff()));
        }
    }
    return worst;
}

}  // namespace gnat
