#include "gnat/sextet.hpp"

#include "gnat/expr.hpp"
#include "gnat/numeric.hpp"

#include <json.hpp>

#include <map>
#include <memory>
#include <sstream>

namespace gnat {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

std::map<std::string, std::string> parse_params(const std::string& text, const std::string& spec) {
    std::map<std::string, std::string> out;
    if (text.empty()) return out;
    for (const std::string& item : split_top_level(text, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw PreconditionError("sextet spec '" + spec + "': expected key=value, got '" + item + "'");
        std::string key = item.substr(0, eq);
        key.erase(key.find_last_not_of(" \t") + 1);
        out[key] = item.substr(eq + 1);
    }
    return out;
}

double number(const std::map<std::string, std::string>& params, const std::string& key, const std::string& spec,
              std::optional<double> fallback = std::nullopt) {
    auto it = params.find(key);
    if (it == params.end()) {
        if (fallback) return *fallback;
        throw PreconditionError("sextet spec '" + spec + "': missing parameter " + key);
    }
    try {
        size_t used = 0;
        const double v = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument(it->second);
        return v;
    } catch (const std::exception&) {
        throw PreconditionError("sextet spec '" + spec + "': bad value for " + key);
    }
}

void only_keys(const std::map<std::string, std::string>& params, std::initializer_list<const char*> keys,
               const std::string& spec) {
    for (const auto& [k, v] : params) {
        bool known = false;
        for (const char* key : keys) known = known || k == key;
        if (!known) throw PreconditionError("sextet spec '" + spec + "': unknown parameter " + k);
    }
}

}  // namespace

MetricSextet::MetricSextet(std::string name, Evaluator eval, double t_lo, double t_hi, bool t_lo_open)
    : name_(std::move(name)), eval_(std::move(eval)), t_lo_(t_lo), t_hi_(t_hi), t_lo_open_(t_lo_open) {}

bool MetricSextet::defined_at(double t) const {
    if (!(t >= 0.0)) return false;
    if (t_lo_open_ ? !(t > t_lo_) : !(t >= t_lo_)) return false;
    return t <= t_hi_;
}

SextetValues MetricSextet::at(double t) const {
    if (!(t >= 0.0)) throw DomainError(name_ + ": negative argument t = " + fmt(t));
    if (!defined_at(t))
        throw DomainError(name_ + ": t = " + fmt(t) + " outside the validity range " + (t_lo_open_ ? "(" : "[") +
                          fmt(t_lo_) + ", " + fmt(t_hi_) + "]");
    if (!eval_) throw PreconditionError("empty metric sextet");
    const SextetValues v = eval_(Dual::variable(t));
    for (const Dual& x : {v.a1, v.a2, v.a3, v.b1, v.b2, v.b3})
        if (!std::isfinite(x.v) || !std::isfinite(x.d))
            throw DomainError(name_ + ": non-finite value at t = " + fmt(t));
    return v;
}

SextetValues effective_values(const SextetValues& v, int n) {
    if (n != 1) return v;
    SextetValues w = v;
    w.b1 = w.b2 = w.b3 = Dual(0.0);
    return w;
}

DerivedScalars derived_scalars(const MetricSextet& F, double t, int n) {
    if (n < 1) throw PreconditionError("derived_scalars: dimension must be positive");
    const SextetValues s = effective_values(F.at(t), n);
    const Dual T = Dual::variable(t);
    const Dual p1 = s.a1 + T * s.b1, p2 = s.a2 + T * s.b2, p3 = s.a3 + T * s.b3;
    const Dual bracket = double(n - 1) * (s.a1 + s.a3) + p1 + p3;
    DerivedScalars d;
    d.t = t;
    d.phi1 = p1.v;
    d.phi2 = p2.v;
    d.phi3 = p3.v;
    d.alpha = s.a1.v * (s.a1.v + s.a3.v) - s.a2.v * s.a2.v;
    d.phi = p1.v * (p1.v + p3.v) - p2.v * p2.v;
    d.F_bracket = bracket.v;
    d.F_bracket_prime = bracket.d;
    return d;
}

RiemannianReport is_riemannian(const MetricSextet& F, const std::vector<double>& t_grid, int n) {
    if (t_grid.empty()) throw PreconditionError("is_riemannian: empty t grid");
    RiemannianReport rep;
    for (double t : t_grid) {
        const DerivedScalars d = derived_scalars(F, t, n);
        RiemannianRow row;
        row.t = t;
        row.alpha1 = effective_values(F.at(t), n).a1.v;
        row.phi1 = d.phi1;
        row.alpha = d.alpha;
        row.phi = d.phi;
        row.alpha1_ok = row.alpha1 > 0.0;
        row.alpha_ok = row.alpha > 0.0;
        row.phi1_ok = n == 1 || row.phi1 > 0.0;
        row.phi_ok = n == 1 || row.phi > 0.0;
        row.pass = row.alpha1_ok && row.alpha_ok && row.phi1_ok && row.phi_ok;
        if (!row.pass) ++rep.failures;
        rep.rows.push_back(row);
    }
    rep.pass = rep.failures == 0;
    return rep;
}

double derivative_consistency(const MetricSextet& F, const std::vector<double>& t_grid) {
    double worst = 0.0;
    for (double t : t_grid) {
        const SextetValues s = F.at(t);
        const double h = 1e-4 * (1.0 + std::abs(t));
        const bool one_sided = !F.defined_at(t - h);
        const Dual SextetValues::*members[] = {&SextetValues::a1, &SextetValues::a2, &SextetValues::a3,
                                               &SextetValues::b1, &SextetValues::b2, &SextetValues::b3};
        for (auto m : members) {
            auto f = [&](double x) { return (F.at(x).*m).v; };
            double fd;
            if (one_sided) {
                auto fwd = [&](double s) { return (-3.0 * f(t) + 4.0 * f(t + s) - f(t + 2.0 * s)) / (2.0 * s); };
                fd = (4.0 * fwd(0.5 * h) - fwd(h)) / 3.0;
            } else {
                fd = numeric::derivative(f, t, h);
            }
            const double d = (s.*m).d;
            worst = std::max(worst, std::abs(fd - d) / std::max(1.0, std::abs(d)));
        }
    }
    return worst;
}

CoefficientTable coefficient_table(const MetricSextet& Fs, double t, int n) {
    const SextetValues s = effective_values(Fs.at(t), n);
    const double a1 = s.a1.v, a2 = s.a2.v, a3 = s.a3.v, b1 = s.b1.v, b2 = s.b2.v, b3 = s.b3.v;
    const double a1p = s.a1.d, a2p = s.a2.d, b1p = s.b1.d, b2p = s.b2.d;
    const double s13 = a1 + a3, b13 = b1 + b3;
    const double s13p = s.a1.d + s.a3.d, b13p = s.b1.d + s.b3.d;
    const double ph1 = a1 + t * b1, ph2 = a2 + t * b2, ph3 = a3 + t * b3;
    const double al = a1 * s13 - a2 * a2;
    const double ph = ph1 * (ph1 + ph3) - ph2 * ph2;
    if (al == 0.0 || !std::isfinite(al)) throw SingularError(Fs.name() + ": alpha vanishes at t = " + fmt(t));
    if (ph == 0.0 || !std::isfinite(ph)) throw SingularError(Fs.name() + ": phi vanishes at t = " + fmt(t));

    CoefficientTable T;
    T.t = t;
    auto& A = T.A;
    auto& B = T.B;
    auto& C = T.C;
    auto& D = T.D;
    auto& E = T.E;
    auto& F = T.F;

    A[1] = -(a1 * a2) / (2 * al);
    A[2] = a2 * b13 / (2 * al);
    A[3] = a2 * (a1 * (ph1 * b13 - ph2 * b2) + a2 * (b1 * a2 - b2 * a1)) / (al * ph);
    A[4] = ph2 * s13p / ph;
    A[5] = (al * ph2 * b13p + b13 * (a2 * (ph2 * b2 - ph1 * b13) + s13 * (a1 * b2 - a2 * b1))) / (al * ph);

    B[1] = a2 * a2 / al;
    B[2] = -(a1 * s13) / (2 * al);
    B[3] = -(s13 * b13) / (2 * al);
    B[4] = a2 * (a2 * (ph2 * b2 - ph1 * b13) + s13 * (b2 * a1 - b1 * a2)) / (al * ph);
    B[5] = -((ph1 + ph3) * s13p) / ph;
    B[6] = (-al * (ph1 + ph3) * b13p +
            b13 * (s13 * ((ph1 + ph3) * b1 - ph2 * b2) + a2 * (a2 * b13 - s13 * b2))) /
           (al * ph);

    C[1] = -(a1 * a1) / (2 * al);
    C[2] = a1 * b13 / (2 * al);
    C[3] = (a1 * s13p - a2 * (a2p - b2 / 2)) / al;
    C[4] = a1 * (a2 * (a2 * b1 - a1 * b2) + a1 * (ph1 * b13 - ph2 * b2)) / (2 * al * ph);
    C[5] = (ph1 * b13 + ph2 * (2 * a2p - b2)) / (2 * ph);
    C[6] = (al * ph1 * b13p + (a2 * (a1 * b2 - a2 * b1) + a1 * (ph2 * b2 - b13 * ph1)) * (s13p + b13 / 2)) / (al * ph) +
           ((a2 * (b1 * (ph1 + ph3) - b2 * ph2) - a1 * (b2 * s13 - a2 * b13)) * (a2p - b2 / 2)) / (al * ph);

    D[1] = a1 * a2 / (2 * al);
    D[2] = -(a2 * b13) / (2 * al);
    D[3] = (-a2 * s13p + s13 * (a2p - b2 / 2)) / al;
    D[4] = a1 * (s13 * (a1 * b2 - a2 * b1) + a2 * (ph2 * b2 - ph1 * b13)) / (2 * al * ph);
    D[5] = -(ph2 * b13 + (ph1 + ph3) * (2 * a2p - b2)) / (2 * ph);
    D[6] = (-al * ph2 * b13p + (s13 * (a2 * b1 - a1 * b2) + a2 * (ph1 * b13 - ph2 * b2)) * (s13p + b13 / 2)) / (al * ph) +
           ((s13 * (b2 * ph2 - b1 * (ph1 + ph3)) + a2 * (b2 * s13 - a2 * b13)) * (a2p - b2 / 2)) / (al * ph);

    E[1] = (a1 * (a2p + b2 / 2) - a2 * a1p) / al;
    E[2] = (ph1 * b2 - ph2 * (b1 - a1p)) / ph;
    E[3] = (al * (2 * ph1 * b2p - ph2 * b1p) +
            2 * a1p * (a1 * (a2 * b13 - b2 * s13) + a2 * (b1 * (ph1 + ph3) - b2 * ph2))) /
               (al * ph) +
           ((2 * a2p + b2) * (a1 * (ph2 * b2 - ph1 * b13) + a2 * (a1 * b2 - a2 * b1))) / (al * ph);

    F[1] = (-a2 * (a2p + b2 / 2) + s13 * a1p) / al;
    F[2] = ((ph1 + ph3) * (b1 - a1p) - ph2 * b2) / ph;
    F[3] = (al * ((ph1 + ph3) * b1p - 2 * ph2 * b2p) +
            2 * a1p * (a2 * (b2 * s13 - a2 * b13) + s13 * (b2 * ph2 - b1 * (ph1 + ph3)))) /
               (al * ph) +
           ((2 * a2p + b2) * (a2 * (ph1 * b13 - ph2 * b2) + s13 * (a2 * b1 - a1 * b2))) / (al * ph);
    return T;
}

double g_on_lifts(const SextetValues& s0, const Mat& g, const Vec& u, const Vec& X, const Vec& Y, Lift kx, Lift ky) {
    const SextetValues s = effective_values(s0, static_cast<int>(g.rows()));
    const double gxy = X.dot(g * Y), gxu = X.dot(g * u), gyu = Y.dot(g * u);
    if (kx == Lift::H && ky == Lift::H) return (s.a1.v + s.a3.v) * gxy + (s.b1.v + s.b3.v) * gxu * gyu;
    if (kx == Lift::V && ky == Lift::V) return s.a1.v * gxy + s.b1.v * gxu * gyu;
    return s.a2.v * gxy + s.b2.v * gxu * gyu;
}

double g_on_lifts(const MetricSextet& F, const Mat& g, const Vec& u, const Vec& X, const Vec& Y, Lift kx, Lift ky) {
    return g_on_lifts(F.at(u.dot(g * u)), g, u, X, Y, kx, ky);
}

double g_on_lifts(const MetricSextet& F, const ChartedManifold& M, const TangentVector& u, const TangentVector& X,
                  const TangentVector& Y, Lift kx, Lift ky) {
    auto same = [](const Point& a, const Point& b) { return a.chart == b.chart && a.coords == b.coords; };
    if (!same(u.base, X.base) || !same(u.base, Y.base))
        throw PreconditionError("g_on_lifts: vectors are based at different points");
    return g_on_lifts(F, M.metric(u.base), u.comps, X.comps, Y.comps, kx, ky);
}

Mat lift_gram(const SextetValues& s0, const Mat& g, const Vec& u) {
    const int n = static_cast<int>(g.rows());
    const SextetValues s = effective_values(s0, n);
    const Vec gu = g * u;
    const Mat uu = gu * gu.transpose();
    Mat G(2 * n, 2 * n);
    G.topLeftCorner(n, n) = (s.a1.v + s.a3.v) * g + (s.b1.v + s.b3.v) * uu;
    G.topRightCorner(n, n) = s.a2.v * g + s.b2.v * uu;
    G.bottomLeftCorner(n, n) = G.topRightCorner(n, n);
    G.bottomRightCorner(n, n) = s.a1.v * g + s.b1.v * uu;
    return G;
}

// --- presets ------------------------------------------------------------------

MetricSextet preset_sasaki() {
    return MetricSextet("sasaki", [](Dual) { return SextetValues{Dual(1.0), {}, {}, {}, {}, {}}; });
}

MetricSextet preset_cheeger_gromoll() {
    return MetricSextet("cheeger_gromoll", [](Dual t) {
        const Dual f = Dual(1.0) / (Dual(1.0) + t);
        return SextetValues{f, {}, t * f, f, {}, -f};
    });
}

MetricSextet preset_oproiu(std::function<Dual(Dual)> v, std::function<Dual(Dual)> w, std::string name) {
    return MetricSextet(std::move(name), [v = std::move(v), w = std::move(w)](Dual t) {
        const Dual s = t * 0.5;
        const Dual V = v(s), W = w(s);
        const Dual a1 = Dual(1.0) / V;
        const Dual b1 = -W / (V * (V + t * W));
        return SextetValues{a1, {}, V - a1, b1, {}, W - b1};
    });
}

Dual prolonged_power(Dual t, double c0, double p, double eps) {
    if (t.v >= eps) return c0 * pow(t, Dual(-p));
    const double f = c0 * std::pow(eps, -p);
    const double f1 = -p * c0 * std::pow(eps, -p - 1.0);
    const double f2 = p * (p + 1.0) * c0 * std::pow(eps, -p - 2.0);
    const double c = (f2 * eps - f1) / (3.0 * eps * eps);
    const double b = 0.5 * (f2 - 6.0 * c * eps);
    const double a = f - b * eps * eps - c * eps * eps * eps;
    return Dual(a) + t * t * (Dual(b) + c * t);
}

MetricSextet preset_example_a(double lambda, double mu, double k, double eps) {
    if (!(lambda > 0.0)) throw PreconditionError("example_a: lambda must be positive");
    if (!(mu > std::max(0.0, k * lambda))) throw PreconditionError("example_a: mu must exceed max(0, k*lambda)");
    if (!(eps > 0.0)) throw PreconditionError("example_a: eps must be positive");
    std::ostringstream name;
    name << "example_a:lambda=" << lambda << ",mu=" << mu << ",k=" << k << ",eps=" << eps;
    return MetricSextet(name.str(), [=](Dual t) {
        const Dual a1 = prolonged_power(t, lambda, 1.0, eps);
        return SextetValues{a1, {}, Dual(mu) - a1, {}, {}, -k * a1};
    });
}

MetricSextet preset_example_b(double lambda, double eta, double eps, double mu) {
    if (!(lambda > 0.0) || !(eta > 0.0)) throw PreconditionError("example_b: lambda and eta must be positive");
    if (!(mu > 0.0)) throw PreconditionError("example_b: mu must be positive");
    if (!(eps > 0.0)) throw PreconditionError("example_b: eps must be positive");
    std::ostringstream name;
    name << "example_b:lambda=" << lambda << ",eta=" << eta << ",eps=" << eps << ",mu=" << mu;
    return MetricSextet(name.str(), [=](Dual t) {
        const Dual a1 = prolonged_power(t, lambda, 1.0, eps);
        return SextetValues{a1, {}, Dual(mu) - a1, {}, {}, prolonged_power(t, eta, 2.0, eps)};
    });
}

MetricSextet preset_exp_family(double k1, double k2) {
    if (!(k1 > 0.0) || !(k2 > 0.0)) throw PreconditionError("exp_family: k1 and k2 must be positive");
    std::ostringstream name;
    name << "exp_family:k1=" << k1 << ",k2=" << k2;
    return MetricSextet(name.str(), [=](Dual t) {
        const Dual a1 = k1 * exp(-t);
        return SextetValues{a1, {}, Dual(k2) - a1, {}, {}, {}};
    });
}

MetricSextet preset_broken() {
    return MetricSextet("broken", [](Dual) { return SextetValues{Dual(-1.0), {}, {}, {}, {}, {}}; });
}

MetricSextet sextet_from_expressions(const std::string& name, const std::array<std::string, 6>& exprs, double t_lo,
                                     double t_hi, bool t_lo_open) {
    auto parsed = std::make_shared<std::array<Expression, 6>>();
    for (size_t i = 0; i < 6; ++i) (*parsed)[i] = Expression::parse(exprs[i].empty() ? "0" : exprs[i], {"t"});
    return MetricSextet(name, [parsed](Dual t) {
        std::array<Dual, 1> vars{t};
        std::array<Dual, 6> v;
        for (size_t i = 0; i < 6; ++i) v[i] = (*parsed)[i].eval<Dual>(vars);
        return SextetValues{v[0], v[1], v[2], v[3], v[4], v[5]};
    }, t_lo, t_hi, t_lo_open);
}

namespace {
const char* kSextetKeys[6] = {"alpha1", "alpha2", "alpha3", "beta1", "beta2", "beta3"};
}

MetricSextet sextet_from_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    const std::string rest = colon == std::string::npos ? std::string() : spec.substr(colon + 1);
    const auto params = parse_params(rest, spec);
    if (head == "sasaki") {
        only_keys(params, {}, spec);
        return preset_sasaki();
    }
    if (head == "cheeger_gromoll" || head == "cg") {
        only_keys(params, {}, spec);
        return preset_cheeger_gromoll();
    }
    if (head == "broken") {
        only_keys(params, {}, spec);
        return preset_broken();
    }
    if (head == "example_a") {
        only_keys(params, {"lambda", "mu", "k", "eps"}, spec);
        return preset_example_a(number(params, "lambda", spec), number(params, "mu", spec), number(params, "k", spec),
                                number(params, "eps", spec));
    }
    if (head == "example_b") {
        only_keys(params, {"lambda", "eta", "eps", "mu"}, spec);
        return preset_example_b(number(params, "lambda", spec), number(params, "eta", spec), number(params, "eps", spec),
                                number(params, "mu", spec, 1.0));
    }
    if (head == "exp_family") {
        only_keys(params, {"k1", "k2"}, spec);
        return preset_exp_family(number(params, "k1", spec), number(params, "k2", spec));
    }
    if (head == "oproiu") {
        only_keys(params, {"v", "w"}, spec);
        if (!params.count("v") || !params.count("w")) throw PreconditionError("oproiu needs v=<expr> and w=<expr>");
        auto v = std::make_shared<Expression>(Expression::parse(params.at("v"), {"t"}));
        auto w = std::make_shared<Expression>(Expression::parse(params.at("w"), {"t"}));
        return preset_oproiu([v](Dual s) { std::array<Dual, 1> a{s}; return v->eval<Dual>(a); },
                             [w](Dual s) { std::array<Dual, 1> a{s}; return w->eval<Dual>(a); }, spec);
    }
    if (head == "custom") {
        only_keys(params, {"alpha1", "alpha2", "alpha3", "beta1", "beta2", "beta3", "tmin", "tmax"}, spec);
        std::array<std::string, 6> exprs;
        for (size_t i = 0; i < 6; ++i)
            if (auto it = params.find(kSextetKeys[i]); it != params.end()) exprs[i] = it->second;
        const double lo = number(params, "tmin", spec, 0.0);
        const double hi = number(params, "tmax", spec, std::numeric_limits<double>::infinity());
        return sextet_from_expressions(spec, exprs, lo, hi, params.count("tmin") && lo > 0.0);
    }
    throw PreconditionError("unknown sextet preset '" + head + "'");
}

MetricSextet sextet_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const std::exception& e) {
        throw PreconditionError(std::string("custom sextet: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw PreconditionError("custom sextet: expected a JSON object");
    std::array<std::string, 6> exprs;
    for (size_t i = 0; i < 6; ++i)
        if (j.contains(kSextetKeys[i])) exprs[i] = j.at(kSextetKeys[i]).get<std::string>();
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    bool open = false;
    if (j.contains("domain")) {
        auto d = j.at("domain").get<std::vector<double>>();
        if (d.size() != 2 || !(d[0] < d[1])) throw PreconditionError("custom sextet: domain must be [lo, hi] with lo < hi");
        lo = d[0];
        hi = d[1];
        open = lo > 0.0;
    }
    return sextet_from_expressions(j.value("name", std::string("custom")), exprs, lo, hi, open);
}

}  // namespace gnat
