#pragma once

#include "gnat/manifold.hpp"

#include <string>
#include <vector>

namespace gnat {

// Christoffel symbols Gamma^k_ij at p: the analytic override when present,
// otherwise christoffel_fd.
Tensor3 christoffel(const ChartedManifold& M, const Point& p);
// Levi-Civita formula with central differences (one Richardson level) of g_ij.
Tensor3 christoffel_fd(const ChartedManifold& M, const Point& p);
// dG[i] = d Gamma / d x^i.
std::vector<Tensor3> christoffel_derivative(const ChartedManifold& M, const Point& p);

// R^l_ijk with R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z.
Tensor4 curvature(const ChartedManifold& M, const Point& p);
// R(X,Y)Z for component vectors at the same point.
Vec apply_curvature(const Tensor4& R, const Vec& X, const Vec& Y, const Vec& Z);
// Ricci operator Q with g(QX, Y) = Ric(X, Y) and Ric_jk = R^i_ijk.
Mat ricci_operator(const ChartedManifold& M, const Point& p);
Mat ricci_operator(const Tensor4& R, const Mat& g);

// Gamma(X, Y)^k = Gamma^k_ij X^i Y^j.
Vec contract(const Tensor3& G, const Vec& X, const Vec& Y);

// J(k, i) = d V^k / d x^i, analytic when the field supplies it.
Mat field_jacobian(const VectorField& V, const Point& p);
// N(k, i) = (nabla_{d_i} V)^k.
Mat nabla_matrix(const ChartedManifold& M, const VectorField& V, const Point& p);
TangentVector covariant_derivative(const ChartedManifold& M, const VectorField& V, const TangentVector& X);

// Everything the energy and tension formulas consume, evaluated once at p.
// Traces use the Gram-Schmidt frame `frame` (column a is e_a).
struct FieldJet {
    Point p;
    Mat g, ginv, frame;
    Tensor3 gamma;
    Vec V;
    Mat nabla;  // N(k, i) = (nabla_i V)^k
    double r2 = 0, div = 0, nabla_norm2 = 0;
    Vec grad_r2;          // g-gradient of r^2
    double V_r2 = 0;      // V(r^2)
    double grad_r2_norm2 = 0;
    Vec nabla_V_V;        // nabla_V V
    Vec nabla_grad_V;     // nabla_{grad r^2} V

    // Second-order part (with_second_order = true).
    bool second_order = false;
    Tensor4 R;
    Mat Q;
    Vec QV;
    Vec trR;              // sum_a R(nabla_{e_a} V, V) e_a
    Vec laplacian;        // rough Laplacian, -tr nabla^2 V

    double inner(const Vec& a, const Vec& b) const { return a.dot(g * b); }
    double norm(const Vec& a) const { return std::sqrt(std::max(0.0, inner(a, a))); }
};

FieldJet field_jet(const ChartedManifold& M, const VectorField& V, const Point& p, bool with_second_order = true);

Vec rough_laplacian(const ChartedManifold& M, const VectorField& V, const Point& p);
double divergence(const ChartedManifold& M, const VectorField& V, const Point& p);
Vec grad_r2(const ChartedManifold& M, const VectorField& V, const Point& p);
Vec nabla_grad_r2_V(const ChartedManifold& M, const VectorField& V, const Point& p);
Vec trace_R_term(const ChartedManifold& M, const VectorField& V, const Point& p);

// Sampled checks of the ChartedManifold invariants.
struct ManifoldReport {
    double min_eigenvalue = 0;       // over all samples
    double max_asymmetry = 0;        // |g - g^T|
    double max_overlap_error = 0;    // tensor transformation of g across charts
    double max_christoffel_error = 0;  // analytic vs finite differences
    size_t overlap_points = 0;
    bool ok = false;
};
ManifoldReport validate_manifold(const ChartedManifold& M, size_t samples, std::uint64_t seed, double tol = 1e-6);

// Overlap consistency of a field: V in chart b vs the transported chart-a components.
double field_overlap_error(const ChartedManifold& M, const VectorField& V, size_t samples, std::uint64_t seed);

}  // namespace gnat
