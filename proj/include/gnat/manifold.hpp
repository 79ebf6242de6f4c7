#pragma once

#include "gnat/core.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gnat {

// Axis-aligned coordinate box; periodic axes wrap into [lo, hi).
struct Chart {
    int id = 0;
    Vec lo;
    Vec hi;
    std::vector<bool> periodic;

    int dim() const { return static_cast<int>(lo.size()); }
    Vec wrap(const Vec& x) const;
    bool contains(const Vec& x) const;
};

struct Point {
    int chart = 0;
    Vec coords;
};

// Components are taken in the coordinate frame of base.chart.
struct TangentVector {
    Point base;
    Vec comps;
};

// Embedding of a round sphere S^n(R) in R^{n+1}; used for ambient-defined fields,
// quadrature and sampling. Chart 0 projects from the north pole, chart 1 from the south.
struct SphereEmbedding {
    int n = 0;
    double radius = 1.0;

    Vec to_ambient(int chart, const Vec& x) const;
    // Chart whose coordinates have norm <= radius (the better-conditioned one).
    Point from_ambient(const Vec& y) const;
    // Chart components of an ambient vector W tangent at y = to_ambient(chart, x).
    Vec pushforward(int chart, const Vec& x, const Vec& W) const;
    // Differential of to_ambient: column i is d y / d x^i.
    Mat differential(int chart, const Vec& x) const;
};

// Riemannian manifold given by coordinate charts. Immutable after construction;
// all members are pure functions of their arguments.
class ChartedManifold {
public:
    using MetricFn = std::function<Mat(int chart, const Vec& x)>;
    using ChristoffelFn = std::function<Tensor3(int chart, const Vec& x)>;
    using CurvatureFn = std::function<Tensor4(int chart, const Vec& x)>;
    // Coordinates of x (chart `from`) in chart `to`, or nullopt outside the overlap.
    using TransitionFn = std::function<std::optional<Vec>(int from, int to, const Vec& x)>;
    using SamplerFn = std::function<std::vector<Point>(size_t count, std::uint64_t seed)>;

    enum class Kind { Euclidean, Torus, Sphere, Product, Custom };

    Kind kind = Kind::Custom;
    std::string name;
    int dim = 0;
    std::vector<Chart> charts;
    MetricFn metric_fn;
    ChristoffelFn christoffel_fn;  // optional analytic override
    CurvatureFn curvature_fn;      // optional analytic override
    TransitionFn transition_fn;    // required when there is more than one chart
    SamplerFn sampler;             // quasi-random sample points
    std::optional<double> constant_curvature;
    std::optional<double> volume;  // set for compact presets
    std::shared_ptr<const SphereEmbedding> sphere;
    std::shared_ptr<const ChartedManifold> factor;  // M' of a product R x M'
    double period = 0.0;                              // torus axis period

    const Chart& chart(int id) const;

    // Validates and wraps the coordinates; throws DomainError outside the chart box.
    Point point(int chart_id, const Vec& coords) const;
    // Re-expresses p in chart `to`; nullopt when p is outside that chart.
    std::optional<Point> to_chart(const Point& p, int to) const;
    // d x_to / d x_from at p (central differences of the transition map).
    Mat transition_jacobian(const Point& p, int to) const;
    std::optional<TangentVector> to_chart(const TangentVector& v, int to) const;

    Mat metric(const Point& p) const { return metric_fn(p.chart, p.coords); }
    std::vector<Point> sample_points(size_t count, std::uint64_t seed) const;

    bool is_compact() const { return volume.has_value(); }
};

// Named presets:
//   "euclidean:n", "torus:n[:period]", "sphere:n[:radius]", "product:r1x<name>"
// (the product separator may be 'x', '*' or the multiplication sign).
ChartedManifold make_euclidean(int n);
ChartedManifold make_torus(int n, double period = 2.0 * M_PI);
ChartedManifold make_sphere(int n, double radius = 1.0);
ChartedManifold make_product_line(const ChartedManifold& factor);
ChartedManifold manifold_from_spec(const std::string& spec);

// JSON description: {"dim": n, "metric": {"family": "constant", "matrix": [[..]]}}
// or {"family": "conformal", "factor": "<expression in x1..xn>"}; optional
// "domain": {"lo": [..], "hi": [..], "periodic": [..]}.
ChartedManifold manifold_from_json(const std::string& json_text);

// Vector field given chart-wise; the optional Jacobian J(k, i) = d V^k / d x^i
// replaces finite differences when present.
struct VectorField {
    std::string name;
    std::function<Vec(int chart, const Vec& x)> comps;
    std::function<Mat(int chart, const Vec& x)> jacobian;

    Vec at(const Point& p) const { return comps(p.chart, p.coords); }
};

// Field defined in chart 0 and carried to the other charts through the transition maps.
VectorField field_from_chart0(const ChartedManifold& M, std::string name,
                              std::function<Vec(const Vec&)> comps0);
VectorField parallel_field(const ChartedManifold& M, const Vec& comps);
VectorField zero_field(const ChartedManifold& M);
// Components given as expressions in x1..xn (chart 0).
VectorField expression_field(const ChartedManifold& M, const std::vector<std::string>& exprs);
// Ambient vector field on a sphere preset, projected to the tangent space.
VectorField ambient_field(const ChartedManifold& M, std::string name, std::function<Vec(const Vec& y)> W);
// xi(y) = J y / R with J the standard complex structure on R^{2m+2}; needs an odd sphere.
VectorField hopf_field(const ChartedManifold& M);
// Rotation in the (1,2)-plane: (-x2, x1, 0, ..) on R^n, ambient rotation on spheres.
VectorField rotation_field(const ChartedManifold& M);

// "parallel:c1,..,cn", "zero", "hopf", "rotation", "expr:e1;e2;..", "linear:a11,a12,..,a(n+1)(n+1)".
VectorField field_from_spec(const ChartedManifold& M, const std::string& spec);

}  // namespace gnat
