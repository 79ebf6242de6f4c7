#include "gnat/quadrature.hpp"

#include "gnat/numeric.hpp"

namespace gnat {

double QuadratureRule::total_weight() const { return numeric::pairwise_sum(weights); }

namespace {

QuadratureRule torus_rule(const ChartedManifold& M, int N) {
    QuadratureRule rule;
    rule.manifold = M.name;
    rule.order = N;
    const int n = M.dim;
    const double h = M.period / N;
    const double w = std::pow(h, n);
    size_t total = 1;
    for (int d = 0; d < n; ++d) total *= static_cast<size_t>(N);
    rule.nodes.reserve(total);
    rule.weights.assign(total, w);
    std::vector<int> idx(n, 0);
    for (size_t c = 0; c < total; ++c) {
        Vec x(n);
        for (int d = 0; d < n; ++d) x[d] = idx[d] * h;
        rule.nodes.push_back({0, x});
        for (int d = n - 1; d >= 0; --d) {
            if (++idx[d] < N) break;
            idx[d] = 0;
        }
    }
    return rule;
}

QuadratureRule sphere2_rule(const ChartedManifold& M, int N) {
    QuadratureRule rule;
    rule.manifold = M.name;
    rule.order = N;
    const double R = M.sphere->radius;
    std::vector<double> z, wz;
    numeric::gauss_legendre(N, z, wz);
    const int L = 2 * N;
    const double dphi = 2.0 * M_PI / L;
    for (int i = 0; i < N; ++i) {
        const double s = std::sqrt(1.0 - z[i] * z[i]);
        for (int j = 0; j < L; ++j) {
            const double ph = (j + 0.5) * dphi;
            Vec y(3);
            y << R * s * std::cos(ph), R * s * std::sin(ph), R * z[i];
            rule.nodes.push_back(M.sphere->from_ambient(y));
            rule.weights.push_back(wz[i] * dphi * R * R);
        }
    }
    return rule;
}

// y = R (cos s e^{i xi1}, sin s e^{i xi2}); with w = sin^2 s the volume element is (R^3 / 2) dw dxi1 dxi2.
QuadratureRule sphere3_rule(const ChartedManifold& M, int N) {
    QuadratureRule rule;
    rule.manifold = M.name;
    rule.order = N;
    const double R = M.sphere->radius;
    std::vector<double> x, wx;
    numeric::gauss_legendre(N, x, wx);
    const double dxi = 2.0 * M_PI / N;
    for (int i = 0; i < N; ++i) {
        const double w = 0.5 * (x[i] + 1.0);
        const double c = std::sqrt(1.0 - w), s = std::sqrt(w);
        for (int j = 0; j < N; ++j) {
            const double a = (j + 0.5) * dxi;
            for (int k = 0; k < N; ++k) {
                const double b = (k + 0.5) * dxi;
                Vec y(4);
                y << R * c * std::cos(a), R * c * std::sin(a), R * s * std::cos(b), R * s * std::sin(b);
                rule.nodes.push_back(M.sphere->from_ambient(y));
                rule.weights.push_back(0.5 * wx[i] * 0.5 * dxi * dxi * R * R * R);
            }
        }
    }
    return rule;
}

}  // namespace

QuadratureRule quadrature_rule(const ChartedManifold& M, int resolution) {
    if (resolution < 0) throw PreconditionError("quadrature_rule: negative resolution");
    if (M.kind == ChartedManifold::Kind::Torus) return torus_rule(M, resolution ? resolution : 32);
    if (M.kind == ChartedManifold::Kind::Sphere && M.dim == 2) return sphere2_rule(M, resolution ? resolution : 32);
    if (M.kind == ChartedManifold::Kind::Sphere && M.dim == 3) return sphere3_rule(M, resolution ? resolution : 24);
    throw PreconditionError("no quadrature rule for " + M.name + " (torus, sphere:2 and sphere:3 are supported)");
}

double integrate(const QuadratureRule& rule, const std::function<double(const Point&)>& f, int threads) {
    std::vector<double> terms(rule.size());
    numeric::parallel_for(rule.size(), threads, [&](size_t i) { terms[i] = rule.weights[i] * f(rule.nodes[i]); });
    return numeric::pairwise_sum(terms);
}

}  // namespace gnat
