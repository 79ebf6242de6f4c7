#pragma once

#include "gnat/manifold.hpp"

#include <functional>
#include <string>
#include <vector>

namespace gnat {

// Product rule on a compact preset. Weights already include the volume element.
struct QuadratureRule {
    std::string manifold;
    std::vector<Point> nodes;
    std::vector<double> weights;
    int order = 0;

    size_t size() const { return nodes.size(); }
    double total_weight() const;
};

// torus: trapezoid, `resolution` nodes per axis (default 32).
// sphere:2: Gauss-Legendre in z times trapezoid in longitude (default 32 x 64).
// sphere:3: Hopf coordinates (w = sin^2 s, xi1, xi2), Gauss-Legendre in w (default 24^3).
// Throws PreconditionError on other manifolds.
QuadratureRule quadrature_rule(const ChartedManifold& M, int resolution = 0);

// sum_i w_i f(x_i), evaluated on `threads` workers with a fixed reduction order.
double integrate(const QuadratureRule& rule, const std::function<double(const Point&)>& f, int threads = 1);

}  // namespace gnat
