#pragma once

#include "gnat/geometry.hpp"
#include "gnat/quadrature.hpp"
#include "gnat/sextet.hpp"

#include <optional>
#include <string>
#include <vector>

namespace gnat {

// (V*G)(X, Y) at p for X, Y given in the chart of p.
double pullback_metric(const ChartedManifold& M, const MetricSextet& F, const VectorField& V, const Point& p,
                       const Vec& X, const Vec& Y);

// Closed-form energy density.
double energy_density(const ChartedManifold& M, const MetricSextet& F, const VectorField& V, const Point& p);
double energy_density(const FieldJet& J, const MetricSextet& F);
// 1/2 sum_a (V*G)(e_a, e_a) in the Gram-Schmidt frame.
double energy_density_trace(const ChartedManifold& M, const MetricSextet& F, const VectorField& V, const Point& p);

double energy(const ChartedManifold& M, const MetricSextet& F, const VectorField& V, const QuadratureRule& rule,
              int threads = 1);
// Energy of a field with |V|^2 = rho: 1/2 bracket(rho) vol + 1/2 alpha1(rho) int |nabla V|^2.
double energy_constant_length(const MetricSextet& F, double rho, int n, double vol, double integral_nablaV2);
// Lower bound for fields with |V|^2 = rho (equality exactly for parallel fields).
double energy_lower_bound(const MetricSextet& F, double rho, int n, double vol);
double integral_nabla_norm2(const ChartedManifold& M, const VectorField& V, const QuadratureRule& rule,
                            int threads = 1);

struct TensionDiagnostics {
    double r2 = 0, div = 0, nabla_norm2 = 0;
    double gQVV = 0;       // g(QV, V)
    double g_trR_V = 0;    // g(tr[R(nabla. V, V).], V)
    double V_r2 = 0;       // V(r^2)
    double grad_r2_norm2 = 0;
};

struct TensionResult {
    Point p;
    Vec tau_h, tau_v;
    Vec T;                 // alpha2 tau_h + beta2 g(tau_h,V)V + alpha1 tau_v + beta1 g(tau_v,V)V
    TensionDiagnostics diagnostics;
    double G_norm2 = 0;    // G(tau, tau) at V(p)
    double g_norm_T = 0;   // |T|_g

    double G_norm() const { return std::sqrt(std::max(0.0, G_norm2)); }
};

// The tension field assembled from the coefficient table.
TensionResult tension_field(const ChartedManifold& M, const MetricSextet& F, const VectorField& V, const Point& p);
TensionResult tension_from_jet(const FieldJet& J, const MetricSextet& F);

struct HarmonicVerdict {
    bool harmonic = false;
    double max_G_norm = 0;
    double max_tau_h = 0, max_tau_v = 0;  // g-norms
    size_t points = 0;
};
HarmonicVerdict is_harmonic_map(const ChartedManifold& M, const MetricSextet& F, const VectorField& V,
                                const std::vector<Point>& points, double tol, int threads = 1);

// Derivative of the bracket (n-1)(alpha1+alpha3) + phi1 + phi3 at rho.
double parallel_condition(const MetricSextet& F, double rho, int n);

enum class ConstantLengthCase { I, II, III, IV };
std::string to_string(ConstantLengthCase c);

struct ClassificationVerdict {
    ConstantLengthCase tag = ConstantLengthCase::I;
    double rho = 0;
    double alpha1_term = 0;       // (alpha1 / rho + alpha1')(rho)
    double bracket_prime = 0;     // bracket'(rho)
    std::optional<double> required_nabla_norm2;  // case iv
    bool realizable = true;       // case iv: required norm >= 0
};
// Zero tests use absolute tolerance `zero_tol`. Requires alpha2(rho) = beta2(rho) = 0.
ClassificationVerdict classify_constant_length(const MetricSextet& F, double rho, int n, double zero_tol = 1e-10);

// Residual vectors of the horizontal and vertical harmonicity equations for a
// constant-length field on a base of constant sectional curvature k.
struct CurvatureResiduals {
    Vec horizontal, vertical;
};
CurvatureResiduals constant_curvature_conditions(const ChartedManifold& M, const MetricSextet& F, const VectorField& V,
                                                 const Point& p, double k);

enum class RigidityFamily { Fam1, Fam2, None };
std::string to_string(RigidityFamily f);
// Membership on the grid (default: 101 points in the sextet's range intersected with [0, 10]).
RigidityFamily rigidity_family(const MetricSextet& F, int n = 2, std::vector<double> grid = {}, double tol = 1e-10);

// T(V) from its closed form in the sextet and its derivatives.
Vec x_harmonic_T(const ChartedManifold& M, const MetricSextet& F, const VectorField& V, const Point& p);
Vec x_harmonic_T(const FieldJet& J, const MetricSextet& F);

// (alpha1 / rho + alpha1') |nabla V|^2 + (2 alpha2' - beta2) div V + bracket'(rho).
double x_harmonic_constant_length_residual(const MetricSextet& F, double rho, int n, double nablaV2, double divV);

// (t alpha1)'(rho) S / n + rho bracket'(rho).
double killing_einstein_condition(const MetricSextet& F, double rho, double S, int n);

// |W - (g(W,V)/g(V,V)) V| / |W|, or 0 when W = 0.
double collinearity_residual(const Mat& g, const Vec& W, const Vec& V);
bool is_collinear(const Mat& g, const Vec& W, const Vec& V, double tol = 1e-6);

// Random fields of constant length sqrt(rho), seeded. Torus: V = sqrt(rho) c(x)/|c(x)| with a smooth
// periodic c. Sphere:3: V = sqrt(rho) sum_a c_a(y) J_a y / R with c a unit-vector function and J_a the
// left-invariant quaternionic structures.
VectorField random_constant_length_field(const ChartedManifold& M, double rho, std::uint64_t seed);
// Random smooth field of varying length.
VectorField random_field(const ChartedManifold& M, std::uint64_t seed);

}  // namespace gnat
