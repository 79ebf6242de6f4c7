#pragma once

#include "gnat/core.hpp"
#include "gnat/manifold.hpp"

#include <array>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace gnat {

// alpha1..beta3 at one t, each as (value, d/dt).
struct SextetValues {
    Dual a1, a2, a3, b1, b2, b3;
};

// The six functions defining a g-natural metric. Evaluators are pure and the
// object is immutable after construction.
class MetricSextet {
public:
    using Evaluator = std::function<SextetValues(Dual t)>;

    MetricSextet() = default;
    MetricSextet(std::string name, Evaluator eval, double t_lo = 0.0,
                 double t_hi = std::numeric_limits<double>::infinity(), bool t_lo_open = false);

    const std::string& name() const { return name_; }
    // Throws DomainError for t < 0 or t outside the declared validity range.
    SextetValues at(double t) const;
    bool defined_at(double t) const;
    double t_lo() const { return t_lo_; }
    double t_hi() const { return t_hi_; }

private:
    std::string name_;
    Evaluator eval_;
    double t_lo_ = 0.0;
    double t_hi_ = std::numeric_limits<double>::infinity();
    bool t_lo_open_ = false;
};

// For n = 1 the beta functions do not enter the metric.
SextetValues effective_values(const SextetValues& v, int n);

struct DerivedScalars {
    double t = 0;
    double phi1 = 0, phi2 = 0, phi3 = 0;
    double alpha = 0, phi = 0;
    double F_bracket = 0, F_bracket_prime = 0;  // (n-1)(a1+a3) + phi1 + phi3
};
DerivedScalars derived_scalars(const MetricSextet& F, double t, int n);

struct RiemannianRow {
    double t = 0;
    double alpha1 = 0, phi1 = 0, alpha = 0, phi = 0;
    bool alpha1_ok = false, phi1_ok = false, alpha_ok = false, phi_ok = false;
    bool pass = false;
};
struct RiemannianReport {
    std::vector<RiemannianRow> rows;
    bool pass = false;
    size_t failures = 0;
};
RiemannianReport is_riemannian(const MetricSextet& F, const std::vector<double>& t_grid, int n = 2);

// Max |reported derivative - finite difference| / max(1, |reported|) over the grid.
double derivative_consistency(const MetricSextet& F, const std::vector<double>& t_grid);

// A1..A5, B1..B6, C1..C6, D1..D6, E1..E3, F1..F3; index 0 unused.
struct CoefficientTable {
    double t = 0;
    std::array<double, 6> A{};
    std::array<double, 7> B{}, C{}, D{};
    std::array<double, 4> E{}, F{};
};
CoefficientTable coefficient_table(const MetricSextet& F, double t, int n = 2);

enum class Lift { H, V };

// G(X^kx, Y^ky) at (x, u) for components in one chart with metric g.
double g_on_lifts(const SextetValues& s, const Mat& g, const Vec& u, const Vec& X, const Vec& Y, Lift kx, Lift ky);
double g_on_lifts(const MetricSextet& F, const Mat& g, const Vec& u, const Vec& X, const Vec& Y, Lift kx, Lift ky);
// Same, for tangent vectors; throws PreconditionError on mismatched base points.
double g_on_lifts(const MetricSextet& F, const ChartedManifold& M, const TangentVector& u, const TangentVector& X,
                  const TangentVector& Y, Lift kx, Lift ky);
// 2n x 2n Gram matrix of G on {d_1^h..d_n^h, d_1^v..d_n^v}.
Mat lift_gram(const SextetValues& s, const Mat& g, const Vec& u);

// Presets.
MetricSextet preset_sasaki();
MetricSextet preset_cheeger_gromoll();
// v and w are functions of one variable given as Dual evaluators.
MetricSextet preset_oproiu(std::function<Dual(Dual)> v, std::function<Dual(Dual)> w, std::string name = "oproiu");
MetricSextet preset_example_a(double lambda, double mu, double k, double eps);
MetricSextet preset_example_b(double lambda, double eta, double eps, double mu = 1.0);
MetricSextet preset_exp_family(double k1, double k2);
MetricSextet preset_broken();
// Expressions in t for any subset of alpha1..beta3 (missing ones are 0).
MetricSextet sextet_from_expressions(const std::string& name, const std::array<std::string, 6>& exprs,
                                     double t_lo = 0.0, double t_hi = std::numeric_limits<double>::infinity(),
                                     bool t_lo_open = false);

// "sasaki", "cheeger_gromoll" (or "cg"), "oproiu:v=<expr>,w=<expr>",
// "example_a:lambda=1,mu=2,k=1,eps=0.5", "example_b:lambda=1,eta=1,eps=0.5[,mu=1]",
// "exp_family:k1=1,k2=2", "broken", "custom:alpha1=<expr>,..,beta3=<expr>[,tmin=..,tmax=..]".
MetricSextet sextet_from_spec(const std::string& spec);
// {"name": .., "alpha1": "<expr in t>", .., "beta3": .., "domain": [lo, hi]}
MetricSextet sextet_from_json(const std::string& json_text);

// The C^2 cubic a + b t^2 + c t^3 matching c0 t^-p (value, first and second
// derivative) at t = eps; used below eps for the Example A/B presets.
Dual prolonged_power(Dual t, double c0, double p, double eps);

}  // namespace gnat
