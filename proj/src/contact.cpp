#include "gnat/contact.hpp"

#include "gnat/numeric.hpp"

#include <algorithm>

namespace gnat {

namespace {

// Norm of a (1,1)-tensor: tr(g A g^-1 A^T).
double tensor_norm_11(const Mat& g, const Mat& ginv, const Mat& A) {
    return std::sqrt(std::max(0.0, (g * A * ginv * A.transpose()).trace()));
}

// Norm of a (0,2)-tensor: tr(g^-1 B g^-1 B^T).
double tensor_norm_02(const Mat& ginv, const Mat& B) {
    return std::sqrt(std::max(0.0, (ginv * B * ginv * B.transpose()).trace()));
}

}  // namespace

Mat ContactMetricStructure::h_at(const Point& p) const {
    const int n = base->dim;
    const Vec xi0 = xi.at(p);
    const Mat P = phi_at(p);
    const Mat Dxi = field_jacobian(xi, p);
    const double h = numeric::base_step(p.coords);
    Mat L = -Dxi * P + P * Dxi;
    for (int c = 0; c < n; ++c) {
        if (xi0[c] == 0.0) continue;
        L += xi0[c] * numeric::partial([&](const Vec& x) { return phi(p.chart, x); }, p.coords, c, h);
    }
    return 0.5 * L;
}

ContactMetricStructure make_structure(std::string name, const ChartedManifold& M, VectorField xi,
                                      std::function<Mat(int, const Vec&)> phi) {
    if (M.dim % 2 == 0) throw PreconditionError("contact structures need odd dimension, got " + M.name);
    ContactMetricStructure S;
    S.name = std::move(name);
    S.base = std::make_shared<const ChartedManifold>(M);
    S.xi = std::move(xi);
    S.phi = std::move(phi);
    S.m = (M.dim - 1) / 2;
    return S;
}

ContactMetricStructure hopf_structure(int m) {
    if (m < 1) throw PreconditionError("hopf_structure: m must be at least 1");
    const ChartedManifold M = make_sphere(2 * m + 1);
    auto Mp = std::make_shared<const ChartedManifold>(M);
    const VectorField xi = hopf_field(M);
    auto phi = [Mp, xi](int chart, const Vec& x) { return Mat(-nabla_matrix(*Mp, xi, Point{chart, x})); };
    return make_structure("hopf:" + std::to_string(m), M, xi, phi);
}

ContactMetricStructure tilted_structure(double angle) {
    const ChartedManifold M = make_product_line(make_sphere(2));
    const VectorField rot = rotation_field(*M.factor);
    const double c = std::cos(angle), s = std::sin(angle);
    VectorField xi;
    xi.name = "tilted";
    xi.comps = [rot, c, s](int chart, const Vec& x) {
        Vec v(3);
        v[0] = c;
        v.tail(2) = s * rot.comps(chart, x.tail(2));
        return v;
    };
    return make_structure("tilted", M, xi, [](int, const Vec&) { return Mat(Mat::Zero(3, 3)); });
}

ContactMetricStructure structure_from_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    try {
        if (head == "hopf") return hopf_structure(arg.empty() ? 1 : std::stoi(arg));
        if (head == "tilted") return tilted_structure(arg.empty() ? M_PI / 4 : std::stod(arg));
    } catch (const std::invalid_argument&) {
        throw PreconditionError("bad structure parameter in '" + spec + "'");
    }
    throw PreconditionError("unknown structure '" + spec + "' (expected hopf:m or tilted[:angle])");
}

ContactReport verify_contact(const ContactMetricStructure& S, const std::vector<Point>& points, double tol) {
    const ChartedManifold& M = S.manifold();
    const int n = M.dim;
    ContactReport r;
    r.points = points.size();
    for (const Point& p : points) {
        const Mat g = M.metric(p);
        const Mat ginv = g.inverse();
        const Vec xi = S.xi.at(p);
        const Vec eta = g * xi;
        const Mat P = S.phi_at(p);
        const double len2 = xi.dot(eta);
        r.eta_xi = std::max(r.eta_xi, std::abs(len2 - 1.0));
        r.unit = std::max(r.unit, std::abs(std::sqrt(len2) - 1.0));
        r.phi_xi = std::max(r.phi_xi, std::sqrt(std::max(0.0, (P * xi).dot(g * (P * xi)))));
        const Vec etaphi = P.transpose() * eta;
        r.eta_phi = std::max(r.eta_phi, std::sqrt(std::max(0.0, etaphi.dot(ginv * etaphi))));
        const Mat sq = P * P + Mat::Identity(n, n) - xi * eta.transpose();
        r.phi_squared = std::max(r.phi_squared, tensor_norm_11(g, ginv, sq));

        const double h = numeric::base_step(p.coords);
        Mat deta(n, n);  // deta(i, j) = d_i eta_j
        for (int i = 0; i < n; ++i)
            deta.row(i) = numeric::partial(
                              [&](const Vec& x) { return Vec(M.metric_fn(p.chart, x) * S.xi.comps(p.chart, x)); },
                              p.coords, i, h)
                              .transpose();
        const Mat d_eta = 0.5 * (deta - deta.transpose());
        const Mat gphi = g * P;
        r.d_eta = std::max(r.d_eta, tensor_norm_02(ginv, d_eta - gphi));
        r.skew = std::max(r.skew, tensor_norm_02(ginv, gphi + gphi.transpose()));
    }
    r.pass = r.eta_xi <= tol && r.phi_xi <= tol && r.eta_phi <= tol && r.phi_squared <= tol && r.d_eta <= tol &&
             r.skew <= tol && r.unit <= tol;
    return r;
}

ReebReport reeb_identities(const ContactMetricStructure& S, const std::vector<Point>& points, double tol) {
    const ChartedManifold& M = S.manifold();
    const int m = S.m;
    ReebReport r;
    r.points = points.size();
    double tr_sum = 0.0;
    for (const Point& p : points) {
        const FieldJet J = field_jet(M, S.xi, p, true);
        const Mat P = S.phi_at(p);
        const Mat H = S.h_at(p);
        const double trh2 = (H * H).trace();
        tr_sum += trh2;
        r.max_h = std::max(r.max_h, tensor_norm_11(J.g, J.ginv, H));
        r.nabla_xi = std::max(r.nabla_xi, tensor_norm_11(J.g, J.ginv, J.nabla + P + P * H));
        r.nabla_xi_xi = std::max(r.nabla_xi_xi, J.norm(J.nabla_V_V));
        r.div_xi = std::max(r.div_xi, std::abs(J.div));
        r.norm_identity = std::max(r.norm_identity, std::abs(J.nabla_norm2 - (2 * m + trh2)));
        r.ricci_identity = std::max(r.ricci_identity, std::abs(J.nabla_norm2 - (4 * m - J.inner(J.QV, J.V))));
        r.laplacian = std::max(r.laplacian, J.norm(J.laplacian - (4.0 * m * J.V - J.QV)));
    }
    r.mean_tr_h2 = points.empty() ? 0.0 : tr_sum / points.size();
    r.pass = r.nabla_xi <= tol && r.nabla_xi_xi <= tol && r.div_xi <= tol && r.norm_identity <= tol &&
             r.ricci_identity <= tol && r.laplacian <= tol;
    return r;
}

HContactVerdict is_h_contact(const ContactMetricStructure& S, const std::vector<Point>& points, double tol) {
    const ChartedManifold& M = S.manifold();
    HContactVerdict v;
    v.min_eigenvalue = std::numeric_limits<double>::infinity();
    v.max_eigenvalue = -std::numeric_limits<double>::infinity();
    for (const Point& p : points) {
        const Mat g = M.metric(p);
        const Vec xi = S.xi.at(p);
        const Vec Qxi = ricci_operator(M, p) * xi;
        v.max_residual = std::max(v.max_residual, collinearity_residual(g, Qxi, xi));
        const double lam = Qxi.dot(g * xi) / xi.dot(g * xi);
        v.min_eigenvalue = std::min(v.min_eigenvalue, lam);
        v.max_eigenvalue = std::max(v.max_eigenvalue, lam);
    }
    v.h_contact = v.max_residual <= tol;
    return v;
}

ReebHarmonicReport reeb_harmonic_map_conditions(const ContactMetricStructure& S, const MetricSextet& F,
                                                const std::vector<Point>& points, double tol) {
    const ChartedManifold& M = S.manifold();
    const int m = S.m, n = M.dim;
    const CoefficientTable T = coefficient_table(F, 1.0, n);
    const SextetValues s = effective_values(F.at(1.0), n);
    const auto& A = T.A;
    const auto& B = T.B;
    const auto& C = T.C;
    const auto& D = T.D;
    const double E2 = T.E[2], F2 = T.F[2];

    ReebHarmonicReport r;
    r.points = points.size();
    r.special_case = std::abs(s.a2.v) <= 1e-12 && std::abs(s.b2.v) <= 1e-12;
    for (const Point& p : points) {
        const FieldJet J = field_jet(M, S.xi, p, true);
        const double gQ = J.inner(J.QV, J.V), gtr = J.inner(J.trR, J.V);
        const Vec hv = -2 * A[1] * J.QV + 2 * C[1] * J.trR +
                       (2 * A[2] + (2 * m + 1) * A[4] + A[5] + 4 * m * E2 + 2 * C[4] * gtr - (A[3] + E2) * gQ) * J.V;
        const Vec vv = (1 - B[1]) * J.QV + 2 * D[1] * J.trR +
                       (-4 * m + 2 * B[3] + (2 * m + 1) * B[5] + B[6] + 4 * m * F2 + 2 * D[4] * gtr - (B[4] + F2) * gQ) *
                           J.V;
        r.max_h_residual = std::max(r.max_h_residual, J.norm(hv));
        r.max_v_residual = std::max(r.max_v_residual, J.norm(vv));

        const TensionResult tr = tension_from_jet(J, F);
        const Vec dh = tr.tau_h - hv, dv = tr.tau_v - vv;
        const SextetValues sv = effective_values(F.at(J.r2), n);
        const double G2 = g_on_lifts(sv, J.g, J.V, dh, dh, Lift::H, Lift::H) +
                          2 * g_on_lifts(sv, J.g, J.V, dh, dv, Lift::H, Lift::V) +
                          g_on_lifts(sv, J.g, J.V, dv, dv, Lift::V, Lift::V);
        r.max_tension_mismatch = std::max(r.max_tension_mismatch, std::sqrt(std::max(0.0, G2)));

        if (r.special_case) {
            const Mat H = S.h_at(p);
            const double res = newxiv_condition(F, m, (H * H).trace());
            if (std::abs(res) > std::abs(r.newxiv_residual)) r.newxiv_residual = res;
            r.max_trR = std::max(r.max_trR, J.norm(J.trR));
        }
    }
    r.harmonic = r.max_h_residual <= tol && r.max_v_residual <= tol;
    if (r.special_case) {
        r.h_contact = is_h_contact(S, points, tol).h_contact;
        r.trR_vanishes = r.max_trR <= tol;
    }
    return r;
}

double newxiv_condition(const MetricSextet& F, int m, double tr_h2) {
    const int n = 2 * m + 1;
    const SextetValues s = effective_values(F.at(1.0), n);
    return (tr_h2 + 2 * m) * (s.a1.v + s.a1.d) + derived_scalars(F, 1.0, n).F_bracket_prime;
}

double kcontact_condition(const MetricSextet& F, int m) { return newxiv_condition(F, m, 0.0); }

double kmu_condition(const MetricSextet& F, int m, double kappa) {
    const int n = 2 * m + 1;
    const SextetValues s = effective_values(F.at(1.0), n);
    return 2 * m * (2 - kappa) * (s.a1.v + s.a1.d) + derived_scalars(F, 1.0, n).F_bracket_prime;
}

}  // namespace gnat
