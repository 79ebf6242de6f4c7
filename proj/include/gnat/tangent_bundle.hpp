#pragma once

#include "gnat/geometry.hpp"
#include "gnat/sextet.hpp"

#include <vector>

namespace gnat {

// (x, u) in the induced chart of TM: u in the coordinate frame of base.chart.
struct TMPoint {
    Point base;
    Vec u;
};

// Tangent vector of TM in the horizontal/vertical splitting: hor^h + ver^v.
struct TMVector {
    Vec hor;
    Vec ver;
};

// raw = (hor, ver - Gamma(hor, u)) in the induced coordinates (x^i, u^i).
Vec to_raw(const Tensor3& gamma, const Vec& u, const TMVector& w);
TMVector from_raw(const Tensor3& gamma, const Vec& u, const Vec& raw);

// Columns 0..n-1 are d_i^h = d_{x^i} - u^j Gamma^k_ij d_{u^k}; columns n..2n-1 are d_i^v.
Mat hv_frame(const ChartedManifold& M, const TMPoint& q);
Mat hv_frame(const Tensor3& gamma, const Vec& u);
double condition_number(const Mat& A);

// G at q in the induced coordinates.
Mat g_matrix(const ChartedManifold& M, const MetricSextet& F, const TMPoint& q);
// Same, from the metric and Christoffel symbols at x (used by the finite-difference oracle).
Mat g_matrix(const MetricSextet& F, const Mat& g, const Tensor3& gamma, const Vec& u);

// Closed-form Levi-Civita connection of (TM, G) at a fixed q.
class LiftedConnection {
public:
    LiftedConnection(const ChartedManifold& M, const MetricSextet& F, const TMPoint& q);

    const CoefficientTable& table() const { return table_; }
    const Tensor3& gamma() const { return gamma_; }
    const Mat& metric() const { return g_; }
    const Vec& u() const { return u_; }

    Vec A(const Vec& X, const Vec& Y) const;
    Vec B(const Vec& X, const Vec& Y) const;
    Vec C(const Vec& X, const Vec& Y) const;
    Vec D(const Vec& X, const Vec& Y) const;
    Vec E(const Vec& X, const Vec& Y) const;
    Vec F(const Vec& X, const Vec& Y) const;

    // nabla-bar_{X^kx} Y^ky for a vector field Y on M with value Y and nabla_X Y = nablaXY at x.
    TMVector apply(Lift kx, const Vec& X, Lift ky, const Vec& Y, const Vec& nablaXY) const;

private:
    Vec R(const Vec& X, const Vec& Y, const Vec& Z) const { return apply_curvature(R_, X, Y, Z); }
    double ip(const Vec& a, const Vec& b) const { return a.dot(g_ * b); }

    Mat g_;
    Tensor3 gamma_;
    Tensor4 R_;
    Vec u_;
    CoefficientTable table_;
};

TMVector nabla_bar(const ChartedManifold& M, const MetricSextet& F, const TMPoint& q, Lift kx, const Vec& X, Lift ky,
                   const VectorField& Y);

struct OracleSteps {
    double base = 1e-4;   // multiplied by 1 + |x|_inf
    double fiber = 1e-4;  // multiplied by 1 + |u|_inf
};

// Christoffel symbols of the GMatrix field by central differences in the 2n induced coordinates.
Tensor3 oracle_christoffel_tm(const ChartedManifold& M, const MetricSextet& F, const TMPoint& q,
                              const OracleSteps& steps = {});

struct OracleComparison {
    double max_abs_error = 0;
    double max_oracle = 0;
    double rel_error = 0;       // max_abs_error / (1 + max_oracle)
    double frame_condition = 0;
    double g_condition = 0;
    double base_step = 0, fiber_step = 0;
};

// Closed form vs oracle on all pairs of lifted coordinate fields at q.
OracleComparison compare_with_oracle(const ChartedManifold& M, const MetricSextet& F, const TMPoint& q,
                                     const OracleSteps& steps = {});

// Tension of V : M -> (TM, G) computed directly from the oracle Christoffel symbols:
// tau^a = g^ij (d_i d_j f^a - Gamma^k_ij d_k f^a + Gbar^a_bc d_i f^b d_j f^c), f(x) = (x, V(x)).
TMVector tension_oracle(const ChartedManifold& M, const MetricSextet& F, const VectorField& V, const Point& p,
                        const OracleSteps& steps = {});

// Seeded sample of TM points with g(u, u) uniform in [t_lo, t_hi].
std::vector<TMPoint> sample_tm_points(const ChartedManifold& M, size_t count, std::uint64_t seed, double t_lo,
                                      double t_hi);

}  // namespace gnat
