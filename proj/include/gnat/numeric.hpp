#pragma once

#include "gnat/core.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <thread>
#include <vector>

namespace gnat::numeric {

// Base step for central differences at coordinate x: 1e-4 * (1 + |x|_inf).
inline double base_step(const Vec& x, double scale = 1e-4) {
    return scale * (1.0 + (x.size() ? x.cwiseAbs().maxCoeff() : 0.0));
}

// Central difference along axis i with one Richardson level:
//   D(h) = (f(x+h e_i) - f(x-h e_i)) / 2h,  result = (4 D(h/2) - D(h)) / 3.
// Works for any f returning a type with +, -, and scalar *.
template <class F>
auto partial(const F& f, const Vec& x, int i, double h) {
    auto central = [&](double s) {
        Vec xp = x, xm = x;
        xp[i] += s;
        xm[i] -= s;
        auto fp = f(xp);
        auto fm = f(xm);
        return decltype(fp)((fp - fm) * (1.0 / (2.0 * s)));
    };
    auto d1 = central(h);
    auto d2 = central(0.5 * h);
    return decltype(d1)((4.0 * d2 - d1) * (1.0 / 3.0));
}

// Derivative of a scalar function of one variable with the same stencil.
inline double derivative(const std::function<double(double)>& f, double t, double h) {
    auto central = [&](double s) { return (f(t + s) - f(t - s)) / (2.0 * s); };
    return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

// Jacobian J(k, i) = d f^k / d x^i of a vector-valued map.
inline Mat jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double h) {
    const int n = static_cast<int>(x.size());
    Mat J;
    for (int i = 0; i < n; ++i) {
        Vec col = partial(f, x, i, h);
        if (i == 0) J.resize(col.size(), n);
        J.col(i) = col;
    }
    return J;
}

// Pairwise (cascade) summation; the order depends only on the input length.
inline double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

// SplitMix64 generator with portable uniform/normal output.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ^ 0x9E3779B97F4A7C15ULL) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    Vec normal_vec(int n) {
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = normal();
        return v;
    }

private:
    std::uint64_t state_;
};

// Radical inverse in the given prime base (Halton sequence component).
inline double radical_inverse(std::uint64_t index, int base) {
    double inv = 1.0 / base, f = inv, r = 0.0;
    while (index > 0) {
        r += f * static_cast<double>(index % base);
        index /= base;
        f *= inv;
    }
    return r;
}

// Halton point in [0,1)^dim; dim <= 8.
inline Vec halton(std::uint64_t index, int dim) {
    static constexpr int primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
    if (dim > 8) throw PreconditionError("halton: dimension above 8 not supported");
    Vec v(dim);
    for (int d = 0; d < dim; ++d) v[d] = radical_inverse(index, primes[d]);
    return v;
}

// Default worker count: GNAT_THREADS if set, otherwise 1.
int default_threads();

// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
// visited exactly once; callers write into pre-sized, index-addressed storage.
void parallel_for(size_t count, int threads, const std::function<void(size_t)>& body);

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Gram-Schmidt on the coordinate frame with respect to g; column a of the result is e_a.
Mat orthonormal_frame(const Mat& g);

}  // namespace gnat::numeric
