#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace gnat {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A point or evaluation argument lies outside the declared domain.
class DomainError : public Error {
public:
    using Error::Error;
};

// A matrix or scalar that must be invertible vanished.
class SingularError : public Error {
public:
    using Error::Error;
};

// Inputs violate an operation's precondition (bad parameters, wrong dimension).
class PreconditionError : public Error {
public:
    using Error::Error;
};

// Dense rank-3 array indexed (a, b, c), each index in [0, n).
// Christoffel symbols are stored as (k, i, j) for Gamma^k_ij.
class Tensor3 {
public:
    Tensor3() = default;
    explicit Tensor3(int n) : n_(n), data_(static_cast<size_t>(n) * n * n, 0.0) {}

    int dim() const { return n_; }
    double& operator()(int a, int b, int c) { return data_[(static_cast<size_t>(a) * n_ + b) * n_ + c]; }
    double operator()(int a, int b, int c) const { return data_[(static_cast<size_t>(a) * n_ + b) * n_ + c]; }

    std::vector<double>& raw() { return data_; }
    const std::vector<double>& raw() const { return data_; }

    double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    int n_ = 0;
    std::vector<double> data_;
};

// Dense rank-4 array indexed (a, b, c, d). Curvature is stored as (l, i, j, k) for
// R^l_ijk, meaning R(d_i, d_j) d_k = R^l_ijk d_l.
class Tensor4 {
public:
    Tensor4() = default;
    explicit Tensor4(int n) : n_(n), data_(static_cast<size_t>(n) * n * n * n, 0.0) {}

    int dim() const { return n_; }
    double& operator()(int a, int b, int c, int d) {
        return data_[((static_cast<size_t>(a) * n_ + b) * n_ + c) * n_ + d];
    }
    double operator()(int a, int b, int c, int d) const {
        return data_[((static_cast<size_t>(a) * n_ + b) * n_ + c) * n_ + d];
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    int n_ = 0;
    std::vector<double> data_;
};

// First-order forward-mode dual number: value plus derivative with respect to t.
struct Dual {
    double v = 0.0;
    double d = 0.0;

    constexpr Dual() = default;
    constexpr Dual(double value) : v(value) {}  // NOLINT(google-explicit-constructor)
    constexpr Dual(double value, double deriv) : v(value), d(deriv) {}

    static constexpr Dual variable(double t) { return {t, 1.0}; }

    Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
    Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
    Dual& operator*=(const Dual& o) { d = d * o.v + v * o.d; v *= o.v; return *this; }
    Dual& operator/=(const Dual& o) {
        d = (d * o.v - v * o.d) / (o.v * o.v);
        v /= o.v;
        return *this;
    }
};

inline Dual operator+(Dual a, const Dual& b) { return a += b; }
inline Dual operator-(Dual a, const Dual& b) { return a -= b; }
inline Dual operator*(Dual a, const Dual& b) { return a *= b; }
inline Dual operator/(Dual a, const Dual& b) { return a /= b; }
inline Dual operator-(const Dual& a) { return {-a.v, -a.d}; }

inline Dual exp(const Dual& a) { const double e = std::exp(a.v); return {e, e * a.d}; }
inline Dual log(const Dual& a) { return {std::log(a.v), a.d / a.v}; }
inline Dual sqrt(const Dual& a) { const double s = std::sqrt(a.v); return {s, a.d / (2.0 * s)}; }
inline Dual sin(const Dual& a) { return {std::sin(a.v), std::cos(a.v) * a.d}; }
inline Dual cos(const Dual& a) { return {std::cos(a.v), -std::sin(a.v) * a.d}; }
inline Dual tanh(const Dual& a) {
    const double th = std::tanh(a.v);
    return {th, (1.0 - th * th) * a.d};
}
inline Dual pow(const Dual& a, const Dual& b) {
    if (b.d == 0.0) {
        const double p = std::pow(a.v, b.v);
        const double dp = (b.v == 0.0) ? 0.0 : b.v * std::pow(a.v, b.v - 1.0) * a.d;
        return {p, dp};
    }
    return exp(b * log(a));
}

// Scalar overloads so expression code can be written once for double and Dual.
inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.v; }

}  // namespace gnat
