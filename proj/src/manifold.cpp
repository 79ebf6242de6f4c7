#include "gnat/manifold.hpp"

#include "gnat/expr.hpp"
#include "gnat/numeric.hpp"

#include <json.hpp>

#include <algorithm>
#include <limits>
#include <sstream>

namespace gnat {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int parse_int(const std::string& s, const std::string& what) {
    try {
        size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw PreconditionError("cannot parse integer '" + s + "' in " + what);
    }
}

double parse_double(const std::string& s, const std::string& what) {
    try {
        size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw PreconditionError("cannot parse number '" + s + "' in " + what);
    }
}

Chart box_chart(int id, int n, double lo, double hi, bool periodic) {
    Chart c;
    c.id = id;
    c.lo = Vec::Constant(n, lo);
    c.hi = Vec::Constant(n, hi);
    c.periodic.assign(n, periodic);
    return c;
}

Tensor3 zero_christoffel(int n) { return Tensor3(n); }

// Halton points in a box; infinite sides are replaced by [-1, 1].
std::vector<Point> box_samples(const Chart& c, size_t count, std::uint64_t seed) {
    std::vector<Point> pts;
    pts.reserve(count);
    const int n = c.dim();
    for (size_t i = 0; i < count; ++i) {
        Vec u = numeric::halton(i + 1 + seed, n);
        Vec x(n);
        for (int a = 0; a < n; ++a) {
            const double lo = std::isfinite(c.lo[a]) ? c.lo[a] : -1.0;
            const double hi = std::isfinite(c.hi[a]) ? c.hi[a] : 1.0;
            x[a] = lo + (hi - lo) * u[a];
        }
        pts.push_back({c.id, x});
    }
    return pts;
}

}  // namespace

Vec Chart::wrap(const Vec& x) const {
    Vec y = x;
    for (int a = 0; a < dim(); ++a) {
        if (!periodic[a]) continue;
        const double len = hi[a] - lo[a];
        double r = std::fmod(y[a] - lo[a], len);
        if (r < 0) r += len;
        y[a] = lo[a] + r;
    }
    return y;
}

bool Chart::contains(const Vec& x) const {
    if (x.size() != lo.size()) return false;
    for (int a = 0; a < dim(); ++a) {
        if (!std::isfinite(x[a])) return false;
        if (periodic[a]) continue;
        if (x[a] < lo[a] || x[a] > hi[a]) return false;
    }
    return true;
}

// --- sphere embedding -------------------------------------------------------

Vec SphereEmbedding::to_ambient(int chart, const Vec& x) const {
    const double R2 = radius * radius;
    const double s = x.squaredNorm();
    const double D = R2 + s;
    Vec y(n + 1);
    y.head(n) = (2.0 * R2 / D) * x;
    y[n] = (chart == 0 ? 1.0 : -1.0) * radius * (s - R2) / D;
    return y;
}

Point SphereEmbedding::from_ambient(const Vec& y) const {
    const int chart = (y[n] <= 0.0) ? 0 : 1;
    const double denom = (chart == 0) ? (radius - y[n]) : (radius + y[n]);
    return {chart, radius * y.head(n) / denom};
}

Vec SphereEmbedding::pushforward(int chart, const Vec& x, const Vec& W) const {
    const Vec y = to_ambient(chart, x);
    const double sign = (chart == 0) ? 1.0 : -1.0;
    const double denom = radius - sign * y[n];
    return radius * W.head(n) / denom + sign * radius * y.head(n) * W[n] / (denom * denom);
}

Mat SphereEmbedding::differential(int chart, const Vec& x) const {
    const double R2 = radius * radius;
    const double D = R2 + x.squaredNorm();
    Mat dy(n + 1, n);
    dy.topRows(n) = (2.0 * R2 / D) * Mat::Identity(n, n) - (4.0 * R2 / (D * D)) * x * x.transpose();
    const double sign = (chart == 0) ? 1.0 : -1.0;
    dy.row(n) = (sign * 4.0 * R2 * radius / (D * D)) * x.transpose();
    return dy;
}

// --- ChartedManifold ----------------------------------------------------------

const Chart& ChartedManifold::chart(int id) const {
    if (id < 0 || id >= static_cast<int>(charts.size()))
        throw DomainError(name + ": no chart with id " + std::to_string(id));
    return charts[static_cast<size_t>(id)];
}

Point ChartedManifold::point(int chart_id, const Vec& coords) const {
    const Chart& c = chart(chart_id);
    if (coords.size() != dim)
        throw DomainError(name + ": point has " + std::to_string(coords.size()) + " coordinates, expected " +
                          std::to_string(dim));
    Vec x = c.wrap(coords);
    if (!c.contains(x)) {
        std::ostringstream os;
        os << name << ": coordinates (" << coords.transpose() << ") outside chart " << chart_id;
        throw DomainError(os.str());
    }
    return {chart_id, x};
}

std::optional<Point> ChartedManifold::to_chart(const Point& p, int to) const {
    if (p.chart == to) return p;
    if (!transition_fn) return std::nullopt;
    auto x = transition_fn(p.chart, to, p.coords);
    if (!x) return std::nullopt;
    const Chart& c = chart(to);
    Vec w = c.wrap(*x);
    if (!c.contains(w)) return std::nullopt;
    return Point{to, w};
}

Mat ChartedManifold::transition_jacobian(const Point& p, int to) const {
    if (p.chart == to) return Mat::Identity(dim, dim);
    if (!transition_fn) throw DomainError(name + ": no transition maps");
    auto f = [&](const Vec& x) -> Vec {
        auto y = transition_fn(p.chart, to, x);
        if (!y) throw DomainError(name + ": transition stencil left the chart overlap");
        return *y;
    };
    return numeric::jacobian(f, p.coords, numeric::base_step(p.coords));
}

std::optional<TangentVector> ChartedManifold::to_chart(const TangentVector& v, int to) const {
    auto q = to_chart(v.base, to);
    if (!q) return std::nullopt;
    return TangentVector{*q, transition_jacobian(v.base, to) * v.comps};
}

std::vector<Point> ChartedManifold::sample_points(size_t count, std::uint64_t seed) const {
    if (sampler) return sampler(count, seed);
    return box_samples(charts.front(), count, seed);
}

// --- presets -------------------------------------------------------------------

ChartedManifold make_euclidean(int n) {
    if (n < 1) throw PreconditionError("euclidean: dimension must be positive");
    ChartedManifold M;
    M.kind = ChartedManifold::Kind::Euclidean;
    M.name = "euclidean:" + std::to_string(n);
    M.dim = n;
    M.charts.push_back(box_chart(0, n, -kInf, kInf, false));
    M.metric_fn = [n](int, const Vec&) { return Mat(Mat::Identity(n, n)); };
    M.christoffel_fn = [n](int, const Vec&) { return zero_christoffel(n); };
    M.constant_curvature = 0.0;
    return M;
}

ChartedManifold make_torus(int n, double period) {
    if (n < 1) throw PreconditionError("torus: dimension must be positive");
    if (!(period > 0.0) || !std::isfinite(period)) throw PreconditionError("torus: period must be finite and positive");
    ChartedManifold M;
    M.kind = ChartedManifold::Kind::Torus;
    std::ostringstream os;
    os << "torus:" << n;
    if (std::abs(period - 2.0 * M_PI) > 1e-15) os << ":" << period;
    M.name = os.str();
    M.dim = n;
    M.period = period;
    M.charts.push_back(box_chart(0, n, 0.0, period, true));
    M.metric_fn = [n](int, const Vec&) { return Mat(Mat::Identity(n, n)); };
    M.christoffel_fn = [n](int, const Vec&) { return zero_christoffel(n); };
    M.constant_curvature = 0.0;
    M.volume = std::pow(period, n);
    return M;
}

ChartedManifold make_sphere(int n, double radius) {
    if (n < 1) throw PreconditionError("sphere: dimension must be positive");
    if (!(radius > 0.0)) throw PreconditionError("sphere: radius must be positive");
    auto emb = std::make_shared<SphereEmbedding>();
    emb->n = n;
    emb->radius = radius;

    ChartedManifold M;
    M.kind = ChartedManifold::Kind::Sphere;
    std::ostringstream os;
    os << "sphere:" << n;
    if (radius != 1.0) os << ":" << radius;
    M.name = os.str();
    M.dim = n;
    M.sphere = emb;
    const double box = 10.0 * radius;
    M.charts.push_back(box_chart(0, n, -box, box, false));
    M.charts.push_back(box_chart(1, n, -box, box, false));

    const double R2 = radius * radius;
    M.metric_fn = [n, R2](int, const Vec& x) {
        const double D = R2 + x.squaredNorm();
        return Mat(Mat::Identity(n, n) * (4.0 * R2 * R2 / (D * D)));
    };
    // g = exp(2 sigma) delta with sigma = log(2R^2) - log(R^2 + |x|^2).
    M.christoffel_fn = [n, R2](int, const Vec& x) {
        const double D = R2 + x.squaredNorm();
        const Vec ds = (-2.0 / D) * x;
        Tensor3 G(n);
        for (int k = 0; k < n; ++k)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    G(k, i, j) = (k == i ? ds[j] : 0.0) + (k == j ? ds[i] : 0.0) - (i == j ? ds[k] : 0.0);
        return G;
    };
    M.transition_fn = [R2](int from, int to, const Vec& x) -> std::optional<Vec> {
        if (from == to) return x;
        const double s = x.squaredNorm();
        if (s == 0.0) return std::nullopt;
        return Vec(x * (R2 / s));
    };
    M.constant_curvature = 1.0 / R2;
    M.volume = 2.0 * std::pow(M_PI, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1)) * std::pow(radius, n);
    M.sampler = [emb, n, radius](size_t count, std::uint64_t seed) {
        std::vector<Point> pts;
        pts.reserve(count);
        numeric::Rng rng(seed);
        for (size_t i = 0; i < count; ++i) {
            Vec y(n + 1);
            if (n == 2) {
                const Vec u = numeric::halton(i + 1 + seed, 2);
                const double z = 2.0 * u[0] - 1.0, ph = 2.0 * M_PI * u[1];
                const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
                y << rho * std::cos(ph), rho * std::sin(ph), z;
            } else if (n == 3) {
                // Hopf coordinates: s = sin^2(eta) is uniform for the round measure.
                const Vec u = numeric::halton(i + 1 + seed, 3);
                const double c = std::sqrt(1.0 - u[0]), s = std::sqrt(u[0]);
                const double a = 2.0 * M_PI * u[1], b = 2.0 * M_PI * u[2];
                y << c * std::cos(a), c * std::sin(a), s * std::cos(b), s * std::sin(b);
            } else {
                y = rng.normal_vec(n + 1);
                y /= y.norm();
            }
            pts.push_back(emb->from_ambient(radius * y));
        }
        return pts;
    };
    return M;
}

ChartedManifold make_product_line(const ChartedManifold& factor) {
    auto F = std::make_shared<ChartedManifold>(factor);
    const int m = factor.dim;
    const int n = m + 1;
    ChartedManifold M;
    M.kind = ChartedManifold::Kind::Product;
    M.name = "product:r1x" + factor.name;
    M.dim = n;
    M.factor = F;
    for (const Chart& c : factor.charts) {
        Chart pc;
        pc.id = c.id;
        pc.lo.resize(n);
        pc.hi.resize(n);
        pc.lo << -kInf, c.lo;
        pc.hi << kInf, c.hi;
        pc.periodic.push_back(false);
        pc.periodic.insert(pc.periodic.end(), c.periodic.begin(), c.periodic.end());
        M.charts.push_back(pc);
    }
    M.metric_fn = [F, n, m](int chart, const Vec& x) {
        Mat g = Mat::Zero(n, n);
        g(0, 0) = 1.0;
        g.bottomRightCorner(m, m) = F->metric_fn(chart, x.tail(m));
        return g;
    };
    if (factor.christoffel_fn) {
        M.christoffel_fn = [F, n, m](int chart, const Vec& x) {
            const Tensor3 Gf = F->christoffel_fn(chart, x.tail(m));
            Tensor3 G(n);
            for (int k = 0; k < m; ++k)
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j) G(k + 1, i + 1, j + 1) = Gf(k, i, j);
            return G;
        };
    }
    if (factor.transition_fn) {
        M.transition_fn = [F, m](int from, int to, const Vec& x) -> std::optional<Vec> {
            auto y = F->transition_fn(from, to, x.tail(m));
            if (!y) return std::nullopt;
            Vec out(m + 1);
            out << x[0], *y;
            return out;
        };
    }
    if (factor.constant_curvature && *factor.constant_curvature == 0.0) M.constant_curvature = 0.0;
    M.sampler = [F, m](size_t count, std::uint64_t seed) {
        std::vector<Point> base = F->sample_points(count, seed);
        std::vector<Point> pts;
        pts.reserve(count);
        for (size_t i = 0; i < count; ++i) {
            Vec x(m + 1);
            x << 2.0 * numeric::radical_inverse(i + 1 + seed, 23) - 1.0, base[i].coords;
            pts.push_back({base[i].chart, x});
        }
        return pts;
    };
    return M;
}

ChartedManifold manifold_from_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    const std::string rest = colon == std::string::npos ? std::string() : spec.substr(colon + 1);
    if (head == "product") {
        std::string tail = rest;
        if (tail.rfind("r1", 0) != 0) throw PreconditionError("product manifold spec must start with r1: " + spec);
        tail = tail.substr(2);
        for (const std::string sep : {"\xC3\x97", "x", "*"}) {
            if (tail.rfind(sep, 0) == 0) {
                return make_product_line(manifold_from_spec(tail.substr(sep.size())));
            }
        }
        throw PreconditionError("product manifold spec needs a separator after r1: " + spec);
    }
    const auto parts = split_top_level(rest, ':');
    if (rest.empty()) throw PreconditionError("manifold spec '" + spec + "' needs a dimension");
    const int n = parse_int(parts[0], spec);
    if (head == "euclidean") {
        if (parts.size() != 1) throw PreconditionError("euclidean takes only a dimension: " + spec);
        return make_euclidean(n);
    }
    if (head == "torus") {
        if (parts.size() > 2) throw PreconditionError("torus takes dimension[:period]: " + spec);
        return make_torus(n, parts.size() == 2 ? parse_double(parts[1], spec) : 2.0 * M_PI);
    }
    if (head == "sphere") {
        if (parts.size() > 2) throw PreconditionError("sphere takes dimension[:radius]: " + spec);
        return make_sphere(n, parts.size() == 2 ? parse_double(parts[1], spec) : 1.0);
    }
    throw PreconditionError("unknown manifold preset '" + head + "'");
}

ChartedManifold manifold_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const std::exception& e) {
        throw PreconditionError(std::string("custom manifold: invalid JSON: ") + e.what());
    }
    if (!j.contains("dim") || !j.contains("metric")) throw PreconditionError("custom manifold: need 'dim' and 'metric'");
    const int n = j.at("dim").get<int>();
    if (n < 1) throw PreconditionError("custom manifold: dim must be positive");

    ChartedManifold M;
    M.kind = ChartedManifold::Kind::Custom;
    M.name = j.value("name", std::string("custom"));
    M.dim = n;

    Chart c = box_chart(0, n, -kInf, kInf, false);
    if (j.contains("domain")) {
        const auto& d = j.at("domain");
        auto read = [&](const char* key, Vec& out) {
            if (!d.contains(key)) return;
            auto v = d.at(key).get<std::vector<double>>();
            if (static_cast<int>(v.size()) != n) throw PreconditionError(std::string("custom manifold: domain.") + key + " has wrong length");
            out = Eigen::Map<Vec>(v.data(), n);
        };
        read("lo", c.lo);
        read("hi", c.hi);
        if (d.contains("periodic")) {
            auto p = d.at("periodic").get<std::vector<bool>>();
            if (static_cast<int>(p.size()) != n) throw PreconditionError("custom manifold: domain.periodic has wrong length");
            c.periodic = p;
        }
        for (int a = 0; a < n; ++a) {
            if (!(c.lo[a] < c.hi[a])) throw PreconditionError("custom manifold: empty domain box");
            if (c.periodic[a] && !(std::isfinite(c.lo[a]) && std::isfinite(c.hi[a])))
                throw PreconditionError("custom manifold: periodic axis needs a finite period");
        }
    }
    M.charts.push_back(c);

    const auto& metric = j.at("metric");
    const std::string family = metric.value("family", std::string());
    if (family == "constant") {
        auto rows = metric.at("matrix").get<std::vector<std::vector<double>>>();
        if (static_cast<int>(rows.size()) != n) throw PreconditionError("custom manifold: metric matrix has wrong size");
        Mat g(n, n);
        for (int a = 0; a < n; ++a) {
            if (static_cast<int>(rows[a].size()) != n) throw PreconditionError("custom manifold: metric matrix has wrong size");
            for (int b = 0; b < n; ++b) g(a, b) = rows[a][b];
        }
        if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-14) throw PreconditionError("custom manifold: metric matrix not symmetric");
        Eigen::SelfAdjointEigenSolver<Mat> es(g);
        if (es.eigenvalues().minCoeff() <= 0.0) throw PreconditionError("custom manifold: metric matrix not positive definite");
        M.metric_fn = [g](int, const Vec&) { return g; };
        M.christoffel_fn = [n](int, const Vec&) { return zero_christoffel(n); };
        M.constant_curvature = 0.0;
    } else if (family == "conformal") {
        std::vector<std::string> vars;
        for (int a = 1; a <= n; ++a) vars.push_back("x" + std::to_string(a));
        auto factor = std::make_shared<Expression>(Expression::parse(metric.at("factor").get<std::string>(), vars));
        M.metric_fn = [factor, n](int, const Vec& x) {
            std::vector<double> xs(x.data(), x.data() + n);
            const double f = factor->eval<double>(xs);
            if (!(f > 0.0)) throw SingularError("custom manifold: conformal factor not positive");
            return Mat(Mat::Identity(n, n) * f);
        };
    } else {
        throw PreconditionError("custom manifold: unknown metric family '" + family + "'");
    }
    if (j.contains("volume")) M.volume = j.at("volume").get<double>();
    return M;
}

// --- vector fields -------------------------------------------------------------

VectorField field_from_chart0(const ChartedManifold& M, std::string name, std::function<Vec(const Vec&)> comps0) {
    VectorField V;
    V.name = std::move(name);
    auto Mp = std::make_shared<ChartedManifold>(M);
    V.comps = [Mp, f = std::move(comps0)](int chart, const Vec& x) -> Vec {
        if (chart == 0) return f(x);
        auto p0 = Mp->to_chart(Point{chart, x}, 0);
        if (!p0) throw DomainError(Mp->name + ": field defined in chart 0 is not available at this point");
        return Mp->transition_jacobian(*p0, chart) * f(p0->coords);
    };
    return V;
}

VectorField parallel_field(const ChartedManifold& M, const Vec& comps) {
    if (comps.size() != M.dim) throw PreconditionError("parallel field: expected " + std::to_string(M.dim) + " components");
    if (M.charts.size() == 1) {
        VectorField V;
        V.name = "parallel";
        V.comps = [comps](int, const Vec&) { return comps; };
        const int n = M.dim;
        V.jacobian = [n](int, const Vec&) { return Mat(Mat::Zero(n, n)); };
        return V;
    }
    return field_from_chart0(M, "parallel", [comps](const Vec&) { return comps; });
}

VectorField zero_field(const ChartedManifold& M) {
    const int n = M.dim;
    VectorField V;
    V.name = "zero";
    V.comps = [n](int, const Vec&) { return Vec(Vec::Zero(n)); };
    V.jacobian = [n](int, const Vec&) { return Mat(Mat::Zero(n, n)); };
    return V;
}

VectorField expression_field(const ChartedManifold& M, const std::vector<std::string>& exprs) {
    const int n = M.dim;
    if (static_cast<int>(exprs.size()) != n)
        throw PreconditionError("expression field: expected " + std::to_string(n) + " components");
    std::vector<std::string> vars;
    for (int a = 1; a <= n; ++a) vars.push_back("x" + std::to_string(a));
    auto parsed = std::make_shared<std::vector<Expression>>();
    for (const auto& e : exprs) parsed->push_back(Expression::parse(e, vars));
    auto f = [parsed, n](const Vec& x) {
        std::vector<double> xs(x.data(), x.data() + n);
        Vec v(n);
        for (int a = 0; a < n; ++a) v[a] = (*parsed)[a].eval<double>(xs);
        return v;
    };
    return field_from_chart0(M, "expr", f);
}

VectorField ambient_field(const ChartedManifold& M, std::string name, std::function<Vec(const Vec& y)> W) {
    if (!M.sphere) throw PreconditionError("ambient fields need a sphere preset, got " + M.name);
    auto emb = M.sphere;
    VectorField V;
    V.name = std::move(name);
    V.comps = [emb, W = std::move(W)](int chart, const Vec& x) {
        const Vec y = emb->to_ambient(chart, x);
        Vec w = W(y);
        w -= (y.dot(w) / y.squaredNorm()) * y;
        return emb->pushforward(chart, x, w);
    };
    return V;
}

VectorField hopf_field(const ChartedManifold& M) {
    if (!M.sphere || M.dim % 2 == 0) throw PreconditionError("hopf field needs an odd-dimensional sphere, got " + M.name);
    const double R = M.sphere->radius;
    return ambient_field(M, "hopf", [R](const Vec& y) {
        Vec w(y.size());
        for (int a = 0; a + 1 < y.size(); a += 2) {
            w[a] = -y[a + 1] / R;
            w[a + 1] = y[a] / R;
        }
        return w;
    });
}

VectorField rotation_field(const ChartedManifold& M) {
    if (M.dim < 2 && !M.sphere) throw PreconditionError("rotation field needs dimension >= 2");
    if (M.sphere) {
        return ambient_field(M, "rotation", [](const Vec& y) {
            Vec w = Vec::Zero(y.size());
            w[0] = -y[1];
            w[1] = y[0];
            return w;
        });
    }
    if (M.kind != ChartedManifold::Kind::Euclidean)
        throw PreconditionError("rotation field is defined on euclidean and sphere presets, got " + M.name);
    const int n = M.dim;
    VectorField V;
    V.name = "rotation";
    V.comps = [n](int, const Vec& x) {
        Vec v = Vec::Zero(n);
        v[0] = -x[1];
        v[1] = x[0];
        return v;
    };
    V.jacobian = [n](int, const Vec&) {
        Mat J = Mat::Zero(n, n);
        J(0, 1) = -1.0;
        J(1, 0) = 1.0;
        return J;
    };
    return V;
}

VectorField field_from_spec(const ChartedManifold& M, const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    const std::string rest = colon == std::string::npos ? std::string() : spec.substr(colon + 1);
    if (head == "zero") return zero_field(M);
    if (head == "hopf") return hopf_field(M);
    if (head == "rotation") return rotation_field(M);
    if (head == "parallel") {
        auto parts = split_top_level(rest, ',');
        Vec c(static_cast<int>(parts.size()));
        for (size_t i = 0; i < parts.size(); ++i) c[static_cast<int>(i)] = parse_double(parts[i], spec);
        return parallel_field(M, c);
    }
    if (head == "expr") return expression_field(M, split_top_level(rest, ';'));
    if (head == "linear") {
        if (!M.sphere) throw PreconditionError("linear fields need a sphere preset");
        const int N = M.dim + 1;
        auto parts = split_top_level(rest, ',');
        if (static_cast<int>(parts.size()) != N * N)
            throw PreconditionError("linear field needs " + std::to_string(N * N) + " matrix entries");
        Mat A(N, N);
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b) A(a, b) = parse_double(parts[static_cast<size_t>(a * N + b)], spec);
        return ambient_field(M, "linear", [A](const Vec& y) { return Vec(A * y); });
    }
    throw PreconditionError("unknown vector field preset '" + head + "'");
}

}  // namespace gnat
