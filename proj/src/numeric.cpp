#include "gnat/numeric.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>

namespace gnat::numeric {

int default_threads() {
    if (const char* env = std::getenv("GNAT_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

void parallel_for(size_t count, int threads, const std::function<void(size_t)>& body) {
    threads = std::max(1, std::min<int>(threads, static_cast<int>(count)));
    if (threads <= 1) {
        for (size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (size_t i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw PreconditionError("gauss_legendre: need at least one node");
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
}

Mat orthonormal_frame(const Mat& g) {
    const int n = static_cast<int>(g.rows());
    Mat E = Mat::Identity(n, n);
    for (int a = 0; a < n; ++a) {
        Vec v = E.col(a);
        for (int b = 0; b < a; ++b) {
            const Vec eb = E.col(b);
            v -= (eb.dot(g * v)) * eb;
        }
        const double norm2 = v.dot(g * v);
        if (!(norm2 > 0.0)) throw SingularError("orthonormal_frame: metric not positive definite");
        E.col(a) = v / std::sqrt(norm2);
    }
    return E;
}

}  // namespace gnat::numeric
