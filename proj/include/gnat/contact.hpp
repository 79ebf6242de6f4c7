#pragma once

#include "gnat/harmonicity.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace gnat {

// (M, eta, g, xi, phi) with eta = g(xi, .); phi given chart-wise as a matrix phi(k, i).
struct ContactMetricStructure {
    std::string name;
    std::shared_ptr<const ChartedManifold> base;
    VectorField xi;
    std::function<Mat(int chart, const Vec& x)> phi;
    int m = 0;  // dim = 2m + 1

    const ChartedManifold& manifold() const { return *base; }
    Mat phi_at(const Point& p) const { return phi(p.chart, p.coords); }
    // h = 1/2 L_xi phi.
    Mat h_at(const Point& p) const;
};

// S^{2m+1} with xi = J y and phi = -nabla xi.
ContactMetricStructure hopf_structure(int m);
// "hopf:m".
ContactMetricStructure structure_from_spec(const std::string& spec);
// Wraps a field and tensor on any odd-dimensional manifold; throws on even dimension.
ContactMetricStructure make_structure(std::string name, const ChartedManifold& M, VectorField xi,
                                      std::function<Mat(int, const Vec&)> phi);
// Unit field cos(a) d_s + sin(a) e on R x S^2 with phi = 0; not a contact structure and not H-contact.
ContactMetricStructure tilted_structure(double angle);

struct ContactReport {
    double eta_xi = 0;        // |eta(xi) - 1|
    double phi_xi = 0;        // |phi xi|
    double eta_phi = 0;       // |eta o phi|
    double phi_squared = 0;   // |phi^2 + I - eta (x) xi|
    double d_eta = 0;         // |d eta - g(., phi .)|
    double skew = 0;          // |g(., phi .) + g(phi ., .)|
    double unit = 0;          // ||xi| - 1|
    size_t points = 0;
    bool pass = false;
};
ContactReport verify_contact(const ContactMetricStructure& S, const std::vector<Point>& points, double tol = 1e-6);

struct ReebReport {
    double nabla_xi = 0;      // |nabla xi + phi + phi h|
    double nabla_xi_xi = 0;   // |nabla_xi xi|
    double div_xi = 0;
    double norm_identity = 0; // ||nabla xi|^2 - (2m + tr h^2)|
    double ricci_identity = 0;// ||nabla xi|^2 - (4m - g(Q xi, xi))|
    double laplacian = 0;     // |Lap xi - (4m xi - Q xi)|
    double max_h = 0;
    double mean_tr_h2 = 0;
    size_t points = 0;
    bool pass = false;
};
ReebReport reeb_identities(const ContactMetricStructure& S, const std::vector<Point>& points, double tol = 1e-4);

struct HContactVerdict {
    bool h_contact = false;
    double max_residual = 0;  // collinearity of Q xi and xi
    double min_eigenvalue = 0, max_eigenvalue = 0;
};
HContactVerdict is_h_contact(const ContactMetricStructure& S, const std::vector<Point>& points, double tol = 1e-5);

struct ReebHarmonicReport {
    double max_h_residual = 0, max_v_residual = 0;  // g-norms of the two displayed vectors
    double max_tension_mismatch = 0;                // G-norm against the general tension field
    bool harmonic = false;
    bool special_case = false;                      // alpha2(1) = beta2(1) = 0
    // Special case only.
    bool h_contact = false;
    double newxiv_residual = 0;
    double max_trR = 0;
    bool trR_vanishes = false;
    size_t points = 0;
};
ReebHarmonicReport reeb_harmonic_map_conditions(const ContactMetricStructure& S, const MetricSextet& F,
                                                const std::vector<Point>& points, double tol = 1e-5);

// 2m (alpha1 + alpha1')(1) + [2m(alpha1 + alpha3) + phi1 + phi3]'(1).
double kcontact_condition(const MetricSextet& F, int m);
// 2m (2 - kappa) (alpha1 + alpha1')(1) + [..]'(1).
double kmu_condition(const MetricSextet& F, int m, double kappa);
// (tr h^2 + 2m)(alpha1 + alpha1')(1) + [..]'(1).
double newxiv_condition(const MetricSextet& F, int m, double tr_h2);

}  // namespace gnat
