#include "gnat/harmonicity.hpp"

#include "gnat/numeric.hpp"

#include <algorithm>

namespace gnat {

namespace {

SextetValues values_at(const MetricSextet& F, double t, int n) { return effective_values(F.at(t), n); }

double G_of(const SextetValues& s, const FieldJet& J, const Vec& h1, const Vec& v1, const Vec& h2, const Vec& v2) {
    return g_on_lifts(s, J.g, J.V, h1, h2, Lift::H, Lift::H) + g_on_lifts(s, J.g, J.V, h1, v2, Lift::H, Lift::V) +
           g_on_lifts(s, J.g, J.V, v1, h2, Lift::V, Lift::H) + g_on_lifts(s, J.g, J.V, v1, v2, Lift::V, Lift::V);
}

std::vector<double> default_grid(const MetricSextet& F) {
    double lo = std::max(0.0, F.t_lo());
    if (!F.defined_at(lo)) lo += 1e-2;
    double hi = std::min(10.0, F.t_hi());
    if (!F.defined_at(hi)) hi -= 1e-2;
    if (!(hi > lo)) throw PreconditionError("rigidity_family: empty t range for " + F.name());
    std::vector<double> grid(101);
    for (int i = 0; i <= 100; ++i) grid[i] = lo + (hi - lo) * i / 100.0;
    return grid;
}

}  // namespace

double pullback_metric(const ChartedManifold& M, const MetricSextet& F, const VectorField& V, const Point& p,
                       const Vec& X, const Vec& Y) {
    const FieldJet J = field_jet(M, V, p, false);
    const SextetValues s = values_at(F, J.r2, M.dim);
    const Vec NX = J.nabla * X, NY = J.nabla * Y;
    const double gXV = J.inner(X, J.V), gYV = J.inner(Y, J.V);
    return (s.a1.v + s.a3.v) * J.inner(X, Y) + (s.b1.v + s.b3.v) * gXV * gYV +
           s.a2.v * (J.inner(X, NY) + J.inner(Y, NX)) + s.b2.v * (gXV * J.inner(NY, J.V) + gYV * J.inner(NX, J.V)) +
           s.a1.v * J.inner(NX, NY) + s.b1.v * J.inner(NX, J.V) * J.inner(NY, J.V);
}

double energy_density(const FieldJet& J, const MetricSextet& F) {
    const int n = static_cast<int>(J.g.rows());
    const SextetValues s = values_at(F, J.r2, n);
    return 0.5 * (n * (s.a1.v + s.a3.v) + (s.b1.v + s.b3.v) * J.r2 + 2.0 * s.a2.v * J.div + s.b2.v * J.V_r2 +
                  s.a1.v * J.nabla_norm2 + 0.25 * s.b1.v * J.grad_r2_norm2);
}

double energy_density(const ChartedManifold& M, const MetricSextet& F, const VectorField& V, const Point& p) {
    return energy_density(field_jet(M, V, p, false), F);
}

double energy_density_trace(const ChartedManifold& M, const MetricSextet& F, const VectorField& V, const Point& p) {
    const Mat E = numeric::orthonormal_frame(M.metric(p));
    double s = 0.0;
    for (int a = 0; a < M.dim; ++a) s += pullback_metric(M, F, V, p, E.col(a), E.col(a));
    return 0.5 * s;
}

double energy(const ChartedManifold& M, const MetricSextet& F, const VectorField& V, const QuadratureRule& rule,
              int threads) {
    return integrate(rule, [&](const Point& p) { return energy_density(M, F, V, p); }, threads);
}

double energy_lower_bound(const MetricSextet& F, double rho, int n, double vol) {
    return 0.5 * derived_scalars(F, rho, n).F_bracket * vol;
}

double energy_constant_length(const MetricSextet& F, double rho, int n, double vol, double integral_nablaV2) {
    return energy_lower_bound(F, rho, n, vol) + 0.5 * values_at(F, rho, n).a1.v * integral_nablaV2;
}

double integral_nabla_norm2(const ChartedManifold& M, const VectorField& V, const QuadratureRule& rule, int threads) {
    return integrate(rule, [&](const Point& p) { return field_jet(M, V, p, false).nabla_norm2; }, threads);
}

TensionResult tension_from_jet(const FieldJet& J, const MetricSextet& F) {
    if (!J.second_order) throw PreconditionError("tension_from_jet: the jet lacks curvature terms");
    const int n = static_cast<int>(J.g.rows());
    const double r2 = J.r2;
    const SextetValues s = values_at(F, r2, n);
    const CoefficientTable T = coefficient_table(F, r2, n);
    const auto& A = T.A;
    const auto& B = T.B;
    const auto& C = T.C;
    const auto& D = T.D;
    const auto& E = T.E;
    const auto& Fc = T.F;

    TensionResult out;
    out.p = J.p;
    auto& dg = out.diagnostics;
    dg.r2 = r2;
    dg.div = J.div;
    dg.nabla_norm2 = J.nabla_norm2;
    dg.gQVV = J.inner(J.QV, J.V);
    dg.g_trR_V = J.inner(J.trR, J.V);
    dg.V_r2 = J.V_r2;
    dg.grad_r2_norm2 = J.grad_r2_norm2;

    const double hcoef = 2 * A[2] - A[3] * dg.gQVV + n * A[4] + A[5] * r2 + 2 * C[4] * dg.g_trR_V + 2 * C[5] * J.div +
                         C[6] * J.V_r2 + E[2] * J.nabla_norm2 + 0.25 * E[3] * J.grad_r2_norm2;
    out.tau_h = -2 * A[1] * J.QV + 2 * C[1] * J.trR + C[3] * J.grad_r2 + E[1] * J.nabla_grad_V +
                2 * C[2] * J.nabla_V_V + hcoef * J.V;

    const double vcoef = 2 * B[3] - B[4] * dg.gQVV + n * B[5] + B[6] * r2 + 2 * D[4] * dg.g_trR_V + 2 * D[5] * J.div +
                         D[6] * J.V_r2 + Fc[2] * J.nabla_norm2 + 0.25 * Fc[3] * J.grad_r2_norm2;
    out.tau_v = -J.laplacian - B[1] * J.QV + 2 * D[1] * J.trR + D[3] * J.grad_r2 + Fc[1] * J.nabla_grad_V +
                2 * D[2] * J.nabla_V_V + vcoef * J.V;

    out.T = s.a2.v * out.tau_h + s.b2.v * J.inner(out.tau_h, J.V) * J.V + s.a1.v * out.tau_v +
            s.b1.v * J.inner(out.tau_v, J.V) * J.V;
    out.G_norm2 = G_of(s, J, out.tau_h, out.tau_v, out.tau_h, out.tau_v);
    out.g_norm_T = J.norm(out.T);
    return out;
}

TensionResult tension_field(const ChartedManifold& M, const MetricSextet& F, const VectorField& V, const Point& p) {
    return tension_from_jet(field_jet(M, V, p, true), F);
}

HarmonicVerdict is_harmonic_map(const ChartedManifold& M, const MetricSextet& F, const VectorField& V,
                                const std::vector<Point>& points, double tol, int threads) {
    std::vector<TensionResult> res(points.size());
    numeric::parallel_for(points.size(), threads, [&](size_t i) { res[i] = tension_field(M, F, V, points[i]); });
    HarmonicVerdict v;
    v.points = points.size();
    for (size_t i = 0; i < res.size(); ++i) {
        const Mat g = M.metric(points[i]);
        v.max_G_norm = std::max(v.max_G_norm, res[i].G_norm());
        v.max_tau_h = std::max(v.max_tau_h, std::sqrt(res[i].tau_h.dot(g * res[i].tau_h)));
        v.max_tau_v = std::max(v.max_tau_v, std::sqrt(res[i].tau_v.dot(g * res[i].tau_v)));
    }
    v.harmonic = v.max_G_norm <= tol;
    return v;
}

double parallel_condition(const MetricSextet& F, double rho, int n) { return derived_scalars(F, rho, n).F_bracket_prime; }

std::string to_string(ConstantLengthCase c) {
    switch (c) {
        case ConstantLengthCase::I: return "i";
        case ConstantLengthCase::II: return "ii";
        case ConstantLengthCase::III: return "iii";
        case ConstantLengthCase::IV: return "iv";
    }
    return "?";
}

ClassificationVerdict classify_constant_length(const MetricSextet& F, double rho, int n, double zero_tol) {
    if (!(rho > 0.0)) throw PreconditionError("classify_constant_length: rho must be positive");
    const SextetValues s = values_at(F, rho, n);
    if (std::abs(s.a2.v) > zero_tol || std::abs(s.b2.v) > zero_tol)
        throw PreconditionError("classify_constant_length: needs alpha2(rho) = beta2(rho) = 0 for " + F.name());
    ClassificationVerdict v;
    v.rho = rho;
    v.alpha1_term = s.a1.v / rho + s.a1.d;
    v.bracket_prime = parallel_condition(F, rho, n);
    const bool z1 = std::abs(v.alpha1_term) <= zero_tol;
    const bool z2 = std::abs(v.bracket_prime) <= zero_tol;
    if (z1 && z2) v.tag = ConstantLengthCase::I;
    else if (!z1 && z2) v.tag = ConstantLengthCase::II;
    else if (z1) v.tag = ConstantLengthCase::III;
    else {
        v.tag = ConstantLengthCase::IV;
        v.required_nabla_norm2 = -rho * v.bracket_prime / (s.a1.v + rho * s.a1.d);
        v.realizable = *v.required_nabla_norm2 >= 0.0;
    }
    return v;
}

CurvatureResiduals constant_curvature_conditions(const ChartedManifold& M, const MetricSextet& F, const VectorField& V,
                                                 const Point& p, double k) {
    const int n = M.dim;
    const FieldJet J = field_jet(M, V, p, true);
    const double rho = J.r2;
    const CoefficientTable T = coefficient_table(F, rho, n);
    const auto& A = T.A;
    const auto& B = T.B;
    const auto& C = T.C;
    const auto& D = T.D;
    CurvatureResiduals r;
    const double hcoef = -2 * (n - 1) * k * A[1] + 2 * A[2] - (n - 1) * k * rho * A[3] + n * A[4] + rho * A[5] +
                         2 * (C[5] - k * C[1] - k * rho * C[4]) * J.div + J.nabla_norm2 * T.E[2];
    r.horizontal = 2 * (k * C[1] + C[2]) * J.nabla_V_V + hcoef * J.V;
    const double vcoef = -(n - 1) * k * B[1] + 2 * B[3] - (n - 1) * k * rho * B[4] + n * B[5] + rho * B[6] +
                         2 * (D[5] - k * D[1] - k * rho * D[4]) * J.div + J.nabla_norm2 * T.F[2];
    r.vertical = -J.laplacian + 2 * (k * D[1] + D[2]) * J.nabla_V_V + vcoef * J.V;
    return r;
}

std::string to_string(RigidityFamily f) {
    switch (f) {
        case RigidityFamily::Fam1: return "fam1";
        case RigidityFamily::Fam2: return "fam2";
        case RigidityFamily::None: return "none";
    }
    return "?";
}

RigidityFamily rigidity_family(const MetricSextet& F, int n, std::vector<double> grid, double tol) {
    if (grid.empty()) grid = default_grid(F);
    std::vector<SextetValues> vals;
    std::vector<DerivedScalars> ds;
    for (double t : grid) {
        vals.push_back(values_at(F, t, n));
        ds.push_back(derived_scalars(F, t, n));
    }
    auto all = [&](auto pred) {
        for (size_t i = 0; i < grid.size(); ++i)
            if (!pred(vals[i], ds[i])) return false;
        return true;
    };
    auto constant = [&](auto f) {
        const double f0 = f(vals[0], ds[0]);
        return all([&](const SextetValues& s, const DerivedScalars& d) {
            return std::abs(f(s, d) - f0) <= tol * std::max(1.0, std::abs(f0));
        });
    };
    auto zero = [&](double x) { return std::abs(x) <= tol; };

    const bool a1_const_pos = constant([](const SextetValues& s, const DerivedScalars&) { return s.a1.v; }) &&
                              all([](const SextetValues& s, const DerivedScalars&) { return s.a1.v > 0; });
    const bool fam1 = a1_const_pos &&
                      all([&](const SextetValues& s, const DerivedScalars&) {
                          return zero(s.a2.v) && zero(s.b2.v) && s.a3.v > -s.a1.v && zero(s.b1.v + s.b3.v) &&
                                 s.b1.v >= -tol && s.b1.d <= tol;
                      }) &&
                      constant([](const SextetValues& s, const DerivedScalars&) { return s.a3.v; });
    if (fam1) return RigidityFamily::Fam1;
    const bool fam2 = a1_const_pos &&
                      constant([](const SextetValues& s, const DerivedScalars&) { return s.a2.v; }) &&
                      all([&](const SextetValues& s, const DerivedScalars& d) {
                          return !zero(s.a2.v) && d.alpha > 0 && zero(s.b1.v) && zero(s.b2.v) && s.b3.v > 0;
                      }) &&
                      constant([](const SextetValues&, const DerivedScalars& d) { return d.F_bracket; });
    return fam2 ? RigidityFamily::Fam2 : RigidityFamily::None;
}

Vec x_harmonic_T(const FieldJet& J, const MetricSextet& F) {
    if (!J.second_order) throw PreconditionError("x_harmonic_T: the jet lacks the rough Laplacian");
    const int n = static_cast<int>(J.g.rows());
    const double t = J.r2;
    const SextetValues s = values_at(F, t, n);
    const DerivedScalars d = derived_scalars(F, t, n);
    const CoefficientTable T = coefficient_table(F, t, n);
    const double a1 = s.a1.v, a1p = s.a1.d, a2p = s.a2.d, b1 = s.b1.v, b2 = s.b2.v;
    const double vr2 = d.phi2 * T.C[6] + d.phi1 * T.D[6] + b2 * T.C[2] + b1 * T.D[2] + b2 * T.C[3] + b1 * T.D[3];
    const double gr2 = d.phi2 * T.E[3] + d.phi1 * T.F[3] + 2 * b2 * T.E[1] + 2 * b1 * T.F[1];
    const double brace = d.F_bracket_prime + (2 * a2p - b2) * J.div + (a1p - b1) * J.nabla_norm2 +
                         b1 * J.inner(J.laplacian, J.V) - vr2 * J.V_r2 - 0.25 * gr2 * J.grad_r2_norm2;
    return -a1 * J.laplacian + (a2p - b2 / 2) * J.grad_r2 + a1p * J.nabla_grad_V - brace * J.V;
}

Vec x_harmonic_T(const ChartedManifold& M, const MetricSextet& F, const VectorField& V, const Point& p) {
    return x_harmonic_T(field_jet(M, V, p, true), F);
}

double x_harmonic_constant_length_residual(const MetricSextet& F, double rho, int n, double nablaV2, double divV) {
    if (!(rho > 0.0)) throw PreconditionError("x_harmonic_constant_length_residual: rho must be positive");
    const SextetValues s = values_at(F, rho, n);
    return (s.a1.v / rho + s.a1.d) * nablaV2 + (2 * s.a2.d - s.b2.v) * divV + parallel_condition(F, rho, n);
}

double killing_einstein_condition(const MetricSextet& F, double rho, double S, int n) {
    const SextetValues s = values_at(F, rho, n);
    const double ta1p = s.a1.v + rho * s.a1.d;
    return ta1p * S / n + rho * parallel_condition(F, rho, n);
}

double collinearity_residual(const Mat& g, const Vec& W, const Vec& V) {
    const double wn = std::sqrt(std::max(0.0, W.dot(g * W)));
    if (wn == 0.0) return 0.0;
    const double vv = V.dot(g * V);
    if (vv == 0.0) return 1.0;
    const Vec rest = W - (W.dot(g * V) / vv) * V;
    return std::sqrt(std::max(0.0, rest.dot(g * rest))) / wn;
}

bool is_collinear(const Mat& g, const Vec& W, const Vec& V, double tol) { return collinearity_residual(g, W, V) <= tol; }

namespace {

// Left-invariant structures on S^3 in R^4 = H: J_a y for a = 1, 2, 3.
Vec quaternion_field(int a, const Vec& y) {
    Vec w(4);
    switch (a) {
        case 0: w << -y[1], y[0], -y[3], y[2]; break;
        case 1: w << -y[2], y[3], y[0], -y[1]; break;
        default: w << -y[3], -y[2], y[1], y[0]; break;
    }
    return w;
}

}  // namespace

VectorField random_constant_length_field(const ChartedManifold& M, double rho, std::uint64_t seed) {
    if (!(rho > 0.0)) throw PreconditionError("random_constant_length_field: rho must be positive");
    numeric::Rng rng(seed ^ 0xC0FFEE);
    const double scale = std::sqrt(rho);
    if (M.kind == ChartedManifold::Kind::Torus) {
        const int n = M.dim;
        const double P = M.period;
        Vec c0 = rng.normal_vec(n);
        c0 *= 2.0 / c0.norm();
        Mat amp(n, n), phase(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                amp(i, j) = rng.uniform(-0.5, 0.5) / n;
                phase(i, j) = rng.uniform(0.0, 2.0 * M_PI);
            }
        auto c = [=](const Vec& x) {
            Vec v = c0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) v[i] += amp(i, j) * std::sin(2.0 * M_PI * x[j] / P + phase(i, j));
            return v;
        };
        auto Mp = std::make_shared<ChartedManifold>(M);
        return field_from_chart0(M, "constant_length", [=](const Vec& x) {
            const Vec v = c(x);
            const Mat g = Mp->metric_fn(0, x);
            return Vec(scale * v / std::sqrt(v.dot(g * v)));
        });
    }
    if (M.kind == ChartedManifold::Kind::Sphere && M.dim == 3) {
        Vec c0 = rng.normal_vec(3);
        c0 *= 2.0 / c0.norm();
        Mat A(3, 4);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 4; ++j) A(i, j) = rng.uniform(-0.5, 0.5);
        const double R = M.sphere->radius;
        return ambient_field(M, "constant_length", [=](const Vec& y) {
            Vec c = c0 + A * y / R;
            c /= c.norm();
            Vec w = Vec::Zero(4);
            for (int a = 0; a < 3; ++a) w += c[a] * quaternion_field(a, y);
            return Vec(scale * w / R);
        });
    }
    throw PreconditionError("random_constant_length_field: supported on torus and sphere:3, got " + M.name);
}

VectorField random_field(const ChartedManifold& M, std::uint64_t seed) {
    numeric::Rng rng(seed ^ 0xF1E1D);
    const int n = M.dim;
    if (M.sphere) {
        const int N = n + 1;
        Mat A(N, N);
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) A(i, j) = rng.uniform(-1.0, 1.0);
        const Vec b = rng.normal_vec(N) * 0.5;
        const double R = M.sphere->radius;
        return ambient_field(M, "random", [=](const Vec& y) {
            const Vec z = y / R;
            return Vec(A * z + b * z[0] * z[1] + 0.3 * b);
        });
    }
    Vec c0 = rng.normal_vec(n);
    Mat amp(n, n), phase(n, n), freq(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            amp(i, j) = rng.uniform(-0.7, 0.7);
            phase(i, j) = rng.uniform(0.0, 2.0 * M_PI);
            freq(i, j) = 1.0 + static_cast<double>(rng.next() % 2);
        }
    const double P = (M.kind == ChartedManifold::Kind::Torus) ? M.period : 2.0 * M_PI;
    return field_from_chart0(M, "random", [=](const Vec& x) {
        Vec v = c0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                v[i] += amp(i, j) * std::sin(2.0 * M_PI * freq(i, j) * x[j] / P + phase(i, j));
        return v;
    });
}

}  // namespace gnat
