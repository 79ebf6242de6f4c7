#include "gnat/scenario.hpp"

#include "gnat/contact.hpp"
#include "gnat/harmonicity.hpp"
#include "gnat/numeric.hpp"
#include "gnat/tangent_bundle.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <sstream>

namespace gnat {

namespace {

std::string num(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

Json point_json(const Point& p) {
    Json j;
    j["chart"] = p.chart;
    j["coords"] = std::vector<double>(p.coords.data(), p.coords.data() + p.coords.size());
    return j;
}

Json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

// Adds "random" and "constant-length[:rho]" to the manifold field specs.
VectorField resolve_field(const ChartedManifold& M, const Scenario& s) {
    if (s.field == "random") return random_field(M, s.seed);
    if (s.field.rfind("constant-length", 0) == 0) {
        const auto colon = s.field.find(':');
        double rho = s.rho;
        if (colon != std::string::npos) {
            try {
                rho = std::stod(s.field.substr(colon + 1));
            } catch (const std::exception&) {
                throw PreconditionError("bad field spec '" + s.field + "'");
            }
        }
        return random_constant_length_field(M, rho, s.seed);
    }
    return field_from_spec(M, s.field);
}

int dimension_for(const Scenario& s) { return s.n > 0 ? s.n : manifold_from_spec(s.manifold).dim; }

double tol_or(const Scenario& s, double def) { return s.tol >= 0 ? s.tol : def; }

// Uniform grid over [lo, hi], nudged inside an open lower bound.
std::vector<double> t_grid(const MetricSextet& F, double lo, double hi, int steps) {
    if (steps < 2 || !(hi > lo)) throw PreconditionError("grid needs steps >= 2 and t_max > t_min");
    if (!F.defined_at(lo)) lo = std::nextafter(std::max(lo, F.t_lo()), hi) + 1e-9 * (hi - lo);
    std::vector<double> g(steps);
    for (int i = 0; i < steps; ++i) g[i] = (i == steps - 1) ? hi : lo + (hi - lo) * i / (steps - 1);
    return g;
}

bool check_expect(const Json& expect, bool verdict) { return expect.is_null() ? verdict : expect.get<bool>() == verdict; }

RunResult op_check_metric(const Scenario& s) {
    const MetricSextet F = sextet_from_spec(s.sextet);
    const int n = dimension_for(s);
    const auto grid = t_grid(F, s.t_min.value_or(std::max(0.0, F.t_lo())), s.t_max.value_or(10.0), s.steps);
    const RiemannianReport rr = is_riemannian(F, grid, n);
    const double deriv = derivative_consistency(F, grid);

    double b1_identity = 0.0, orth = 0.0;
    size_t singular = 0;
    double min_a1 = INFINITY, min_phi1 = INFINITY, min_alpha = INFINITY, min_phi = INFINITY;
    for (const auto& row : rr.rows) {
        min_a1 = std::min(min_a1, row.alpha1);
        min_phi1 = std::min(min_phi1, row.phi1);
        min_alpha = std::min(min_alpha, row.alpha);
        min_phi = std::min(min_phi, row.phi);
        try {
            const CoefficientTable T = coefficient_table(F, row.t, n);
            if (T.C[1] != 0.0)
                b1_identity = std::max(b1_identity, std::abs(T.B[1] - 2 * T.A[1] * T.D[1] / T.C[1]) /
                                                        (1.0 + std::abs(T.B[1])));
            const SextetValues v = effective_values(F.at(row.t), n);
            if (v.a2.v == 0.0 && v.b2.v == 0.0)
                for (double x : {T.A[1], T.A[2], T.A[3], T.D[1], T.D[2]}) orth = std::max(orth, std::abs(x));
        } catch (const SingularError&) {
            ++singular;
        }
    }

    const double tol = tol_or(s, 1e-6);
    RunResult out;
    Json& r = out.report;
    r["riemannian"] = rr.pass;
    r["riemannian_failures"] = rr.failures;
    r["grid_points"] = grid.size();
    r["min_alpha1"] = min_a1;
    r["min_phi1"] = min_phi1;
    r["min_alpha"] = min_alpha;
    r["min_phi"] = min_phi;
    r["derivative_consistency"] = deriv;
    r["b1_identity_error"] = b1_identity;
    r["orthogonal_coefficients_max"] = orth;
    r["singular_table_points"] = singular;
    bool pass = rr.pass && deriv <= tol && b1_identity <= 1e-10 && orth <= 1e-12;
    if (s.n == 0) {
        const ChartedManifold M = manifold_from_spec(s.manifold);
        const ManifoldReport mr = validate_manifold(M, static_cast<size_t>(s.points), s.seed, tol);
        r["manifold"] = {{"name", M.name},
                         {"min_eigenvalue", mr.min_eigenvalue},
                         {"max_asymmetry", mr.max_asymmetry},
                         {"max_overlap_error", mr.max_overlap_error},
                         {"max_christoffel_error", mr.max_christoffel_error},
                         {"overlap_points", mr.overlap_points},
                         {"ok", mr.ok}};
        pass = pass && mr.ok;
    }
    out.pass = check_expect(s.expect, pass);
    r["verdict"] = pass;
    return out;
}

RunResult op_tension(const Scenario& s) {
    const ChartedManifold M = manifold_from_spec(s.manifold);
    const MetricSextet F = sextet_from_spec(s.sextet);
    const VectorField V = resolve_field(M, s);
    const auto pts = M.sample_points(static_cast<size_t>(s.points), s.seed);
    std::vector<TensionResult> res(pts.size());
    numeric::parallel_for(pts.size(), s.threads, [&](size_t i) { res[i] = tension_field(M, F, V, pts[i]); });

    const double tol = tol_or(s, 1e-6);
    double maxG = 0, maxT = 0, maxh = 0, maxv = 0;
    Json rows = Json::array();
    for (size_t i = 0; i < res.size(); ++i) {
        const Mat g = M.metric(pts[i]);
        const double nh = std::sqrt(res[i].tau_h.dot(g * res[i].tau_h));
        const double nv = std::sqrt(res[i].tau_v.dot(g * res[i].tau_v));
        maxG = std::max(maxG, res[i].G_norm());
        maxT = std::max(maxT, res[i].g_norm_T);
        maxh = std::max(maxh, nh);
        maxv = std::max(maxv, nv);
        rows.push_back({{"point", point_json(pts[i])},
                        {"tau_h", vec_json(res[i].tau_h)},
                        {"tau_v", vec_json(res[i].tau_v)},
                        {"T", vec_json(res[i].T)},
                        {"G_norm", res[i].G_norm()},
                        {"r2", res[i].diagnostics.r2},
                        {"div", res[i].diagnostics.div},
                        {"nabla_norm2", res[i].diagnostics.nabla_norm2},
                        {"gQVV", res[i].diagnostics.gQVV},
                        {"g_trR_V", res[i].diagnostics.g_trR_V},
                        {"V_r2", res[i].diagnostics.V_r2},
                        {"grad_r2_norm2", res[i].diagnostics.grad_r2_norm2}});
    }
    RunResult out;
    Json& r = out.report;
    const bool harmonic = maxG <= tol;
    const bool x_harmonic = maxT <= tol;
    r["harmonic_map"] = harmonic;
    r["x_harmonic"] = x_harmonic;
    r["max_G_norm"] = maxG;
    r["max_tau_h"] = maxh;
    r["max_tau_v"] = maxv;
    r["max_T"] = maxT;
    r["points"] = rows;
    r["verdict"] = harmonic;
    out.pass = check_expect(s.expect, harmonic);
    return out;
}

RunResult op_energy(const Scenario& s) {
    const ChartedManifold M = manifold_from_spec(s.manifold);
    const MetricSextet F = sextet_from_spec(s.sextet);
    const VectorField V = resolve_field(M, s);
    const QuadratureRule rule = quadrature_rule(M, s.resolution);

    std::vector<double> e(rule.size()), nab(rule.size()), r2(rule.size());
    numeric::parallel_for(rule.size(), s.threads, [&](size_t i) {
        const FieldJet J = field_jet(M, V, rule.nodes[i], false);
        e[i] = rule.weights[i] * energy_density(J, F);
        nab[i] = rule.weights[i] * J.nabla_norm2;
        r2[i] = J.r2;
    });
    const double E = numeric::pairwise_sum(e);
    const double vol = rule.total_weight();
    const auto [lo, hi] = std::minmax_element(r2.begin(), r2.end());
    const bool constant_length = (*hi - *lo) <= 1e-10 * std::max(1.0, *hi);
    const double tol = tol_or(s, 1e-6);

    RunResult out;
    Json& r = out.report;
    r["energy"] = E;
    r["volume"] = vol;
    r["nodes"] = rule.size();
    r["constant_length"] = constant_length;
    bool pass = std::isfinite(E);
    if (constant_length && *hi > 0.0) {
        const double rho = 0.5 * (*lo + *hi);
        const double closed = energy_constant_length(F, rho, M.dim, vol, numeric::pairwise_sum(nab));
        const double bound = energy_lower_bound(F, rho, M.dim, vol);
        r["rho"] = rho;
        r["closed_form"] = closed;
        r["lower_bound"] = bound;
        r["relative_error"] = std::abs(E - closed) / std::abs(closed);
        pass = pass && std::abs(E - closed) <= tol * std::abs(closed) && E >= bound - tol * std::abs(bound);
    }
    r["verdict"] = pass;
    out.pass = check_expect(s.expect, pass);
    return out;
}

RunResult op_classify(const Scenario& s) {
    const MetricSextet F = sextet_from_spec(s.sextet);
    const int n = dimension_for(s);
    const ClassificationVerdict v = classify_constant_length(F, s.rho, n, tol_or(s, 1e-10));
    RunResult out;
    Json& r = out.report;
    r["case"] = to_string(v.tag);
    r["rho"] = v.rho;
    r["n"] = n;
    r["alpha1_term"] = v.alpha1_term;
    r["bracket_prime"] = v.bracket_prime;
    if (v.required_nabla_norm2) {
        r["required_nabla_norm2"] = *v.required_nabla_norm2;
        r["realizable"] = v.realizable;
    }
    r["rigidity_family"] = to_string(rigidity_family(F, n));
    r["verdict"] = to_string(v.tag);
    out.pass = s.expect.is_null() || s.expect.get<std::string>() == to_string(v.tag);
    return out;
}

RunResult op_contact(const Scenario& s) {
    const ContactMetricStructure S = structure_from_spec(s.structure);
    const MetricSextet F = sextet_from_spec(s.sextet);
    const auto pts = S.manifold().sample_points(static_cast<size_t>(s.points), s.seed);
    const double tol = tol_or(s, 1e-4);
    const ContactReport c = verify_contact(S, pts, tol);
    const ReebReport rb = reeb_identities(S, pts, tol);
    const HContactVerdict hc = is_h_contact(S, pts, tol);
    const ReebHarmonicReport h = reeb_harmonic_map_conditions(S, F, pts, tol);

    RunResult out;
    Json& r = out.report;
    r["contact"] = {{"eta_xi", c.eta_xi}, {"phi_xi", c.phi_xi},   {"eta_phi", c.eta_phi}, {"phi_squared", c.phi_squared},
                    {"d_eta", c.d_eta},   {"skew", c.skew},       {"unit", c.unit},       {"pass", c.pass}};
    r["reeb"] = {{"nabla_xi", rb.nabla_xi},
                 {"nabla_xi_xi", rb.nabla_xi_xi},
                 {"div_xi", rb.div_xi},
                 {"norm_identity", rb.norm_identity},
                 {"ricci_identity", rb.ricci_identity},
                 {"laplacian", rb.laplacian},
                 {"max_h", rb.max_h},
                 {"mean_tr_h2", rb.mean_tr_h2},
                 {"pass", rb.pass}};
    r["h_contact"] = {{"verdict", hc.h_contact},
                      {"max_residual", hc.max_residual},
                      {"min_eigenvalue", hc.min_eigenvalue},
                      {"max_eigenvalue", hc.max_eigenvalue}};
    Json hj = {{"max_h_residual", h.max_h_residual},
               {"max_v_residual", h.max_v_residual},
               {"max_tension_mismatch", h.max_tension_mismatch},
               {"harmonic", h.harmonic},
               {"orthogonal_case", h.special_case}};
    if (h.special_case) {
        hj["h_contact"] = h.h_contact;
        hj["newxiv_residual"] = h.newxiv_residual;
        hj["max_trR"] = h.max_trR;
        hj["trR_vanishes"] = h.trR_vanishes;
    }
    r["reeb_harmonic"] = hj;
    r["kcontact_residual"] = kcontact_condition(F, S.m);
    r["kmu_residual"] = kmu_condition(F, S.m, s.kappa);
    r["verdict"] = h.harmonic;
    out.pass = c.pass && rb.pass && check_expect(s.expect, h.harmonic);
    return out;
}

RunResult op_oracle(const Scenario& s) {
    const ChartedManifold M = manifold_from_spec(s.manifold);
    const MetricSextet F = sextet_from_spec(s.sextet);
    const double lo = s.t_min.value_or(0.25), hi = s.t_max.value_or(4.0);
    const auto qs = sample_tm_points(M, static_cast<size_t>(s.points), s.seed, lo, hi);
    std::vector<OracleComparison> res(qs.size());
    numeric::parallel_for(qs.size(), s.threads, [&](size_t i) { res[i] = compare_with_oracle(M, F, qs[i]); });
    const double tol = tol_or(s, 1e-5);
    double worst = 0.0;
    Json rows = Json::array();
    for (size_t i = 0; i < qs.size(); ++i) {
        worst = std::max(worst, res[i].rel_error);
        rows.push_back({{"point", point_json(qs[i].base)},
                        {"u", vec_json(qs[i].u)},
                        {"rel_error", res[i].rel_error},
                        {"max_abs_error", res[i].max_abs_error},
                        {"base_step", res[i].base_step},
                        {"fiber_step", res[i].fiber_step},
                        {"frame_condition", res[i].frame_condition},
                        {"g_condition", res[i].g_condition}});
    }
    RunResult out;
    Json& r = out.report;
    r["max_rel_error"] = worst;
    r["points"] = rows;
    r["verdict"] = worst <= tol;
    out.pass = check_expect(s.expect, worst <= tol);
    return out;
}

using Quantity = std::function<std::vector<double>(const MetricSextet&, double t, int n)>;

const std::map<std::string, std::pair<std::vector<std::string>, Quantity>>& quantities(double kappa) {
    static std::map<std::string, std::pair<std::vector<std::string>, Quantity>> table;
    static double cached_kappa = NAN;
    if (cached_kappa == kappa) return table;
    cached_kappa = kappa;
    table.clear();
    table["riemannian-margin"] = {{"alpha1", "phi1", "alpha", "phi", "margin"}, [](const MetricSextet& F, double t, int n) {
                                      const RiemannianRow r = is_riemannian(F, {t}, n).rows[0];
                                      double m = std::min(r.alpha1, r.alpha);
                                      if (n > 1) m = std::min({m, r.phi1, r.phi});
                                      return std::vector<double>{r.alpha1, r.phi1, r.alpha, r.phi, m};
                                  }};
    table["bracket"] = {{"bracket"}, [](const MetricSextet& F, double t, int n) {
                            return std::vector<double>{derived_scalars(F, t, n).F_bracket};
                        }};
    table["bracket-prime"] = {{"bracket_prime"}, [](const MetricSextet& F, double t, int n) {
                                  return std::vector<double>{derived_scalars(F, t, n).F_bracket_prime};
                              }};
    table["alpha1-term"] = {{"alpha1_term"}, [](const MetricSextet& F, double t, int n) {
                                const SextetValues v = effective_values(F.at(t), n);
                                return std::vector<double>{v.a1.v / t + v.a1.d};
                            }};
    table["kcontact"] = {{"kcontact"}, [](const MetricSextet& F, double, int n) {
                             return std::vector<double>{kcontact_condition(F, (n - 1) / 2)};
                         }};
    table["kmu"] = {{"kmu"}, [kappa](const MetricSextet& F, double, int n) {
                        return std::vector<double>{kmu_condition(F, (n - 1) / 2, kappa)};
                    }};
    return table;
}

RunResult op_sweep(const Scenario& s) {
    const auto& table = quantities(s.kappa);
    const auto it = table.find(s.quantity);
    if (it == table.end()) {
        std::string names;
        for (const auto& [k, v] : table) names += (names.empty() ? "" : ", ") + k;
        throw PreconditionError("unknown sweep quantity '" + s.quantity + "' (expected one of " + names + ")");
    }
    const auto& [columns, f] = it->second;
    const int n = dimension_for(s);
    const auto hole = s.sextet.find("{}");
    const bool parametric = hole != std::string::npos;
    if ((s.quantity == "kcontact" || s.quantity == "kmu") && n % 2 == 0)
        throw PreconditionError("sweep " + s.quantity + " needs an odd dimension n = 2m + 1");

    std::vector<double> xs;
    std::vector<std::vector<double>> ys;
    if (parametric) {
        const double lo = s.t_min.value_or(0.5), hi = s.t_max.value_or(5.0);
        if (s.steps < 2 || !(hi > lo)) throw PreconditionError("sweep needs steps >= 2 and t_max > t_min");
        for (int i = 0; i < s.steps; ++i) {
            const double x = (i == s.steps - 1) ? hi : lo + (hi - lo) * i / (s.steps - 1);
            std::string spec = s.sextet;
            spec.replace(hole, 2, num(x));
            xs.push_back(x);
            ys.push_back(f(sextet_from_spec(spec), s.at, n));
        }
    } else {
        const MetricSextet F = sextet_from_spec(s.sextet);
        xs = t_grid(F, s.t_min.value_or(std::max(0.0, F.t_lo())), s.t_max.value_or(10.0), s.steps);
        for (double t : xs) ys.push_back(f(F, t, n));
    }

    RunResult out;
    std::ostringstream csv;
    csv << (parametric ? "param" : "t");
    for (const auto& c : columns) csv << ',' << c;
    csv << '\n';
    for (size_t i = 0; i < xs.size(); ++i) {
        csv << num(xs[i]);
        for (double y : ys[i]) csv << ',' << num(y);
        csv << '\n';
    }
    out.csv = csv.str();

    const double tol = tol_or(s, 1e-10);
    auto all = [&](auto pred) {
        for (const auto& row : ys)
            if (!pred(row.back())) return false;
        return true;
    };
    bool verdict = true;
    std::string expect = s.expect.is_null() ? "" : s.expect.get<std::string>();
    if (expect == "positive") verdict = all([](double y) { return y > 0; });
    else if (expect == "negative") verdict = all([](double y) { return y < 0; });
    else if (expect == "zero") verdict = all([&](double y) { return std::abs(y) <= tol; });
    else if (expect == "nonzero") verdict = all([&](double y) { return std::abs(y) > tol; });
    else if (!expect.empty()) throw PreconditionError("sweep expect must be positive, negative, zero or nonzero");

    Json& r = out.report;
    r["rows"] = xs.size();
    r["columns"] = columns;
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& row : ys) {
        lo = std::min(lo, row.back());
        hi = std::max(hi, row.back());
    }
    r["min"] = lo;
    r["max"] = hi;
    r["verdict"] = verdict;
    out.pass = verdict;
    return out;
}

}  // namespace

void Scenario::merge(const Json& j) {
    if (!j.is_object()) throw PreconditionError("scenario must be a JSON object");
    for (const auto& [key, v] : j.items()) {
        try {
            if (key == "operation") operation = v.get<std::string>();
            else if (key == "manifold") manifold = v.get<std::string>();
            else if (key == "sextet") sextet = v.get<std::string>();
            else if (key == "field") field = v.get<std::string>();
            else if (key == "structure") structure = v.get<std::string>();
            else if (key == "quantity") quantity = v.get<std::string>();
            else if (key == "tol") tol = v.get<double>();
            else if (key == "points") points = v.get<int>();
            else if (key == "seed") seed = v.get<std::uint64_t>();
            else if (key == "threads") threads = v.get<int>();
            else if (key == "resolution") resolution = v.get<int>();
            else if (key == "rho") rho = v.get<double>();
            else if (key == "t_min") t_min = v.get<double>();
            else if (key == "t_max") t_max = v.get<double>();
            else if (key == "steps") steps = v.get<int>();
            else if (key == "n") n = v.get<int>();
            else if (key == "kappa") kappa = v.get<double>();
            else if (key == "at") at = v.get<double>();
            else if (key == "output") output = v.get<std::string>();
            else if (key == "expect") expect = v;
            else if (key == "description") continue;
            else throw PreconditionError("unknown scenario key '" + key + "'");
        } catch (const nlohmann::json::exception& e) {
            throw PreconditionError("scenario key '" + key + "': " + e.what());
        }
    }
    if (points < 1) throw PreconditionError("scenario: points must be positive");
    if (threads < 1) throw PreconditionError("scenario: threads must be positive");
}

Json Scenario::to_json() const {
    Json j;
    j["operation"] = operation;
    j["manifold"] = manifold;
    j["sextet"] = sextet;
    j["field"] = field;
    j["structure"] = structure;
    if (operation == "sweep") j["quantity"] = quantity;
    if (tol >= 0) j["tol"] = tol;
    j["points"] = points;
    j["seed"] = seed;
    j["resolution"] = resolution;
    j["rho"] = rho;
    if (t_min) j["t_min"] = *t_min;
    if (t_max) j["t_max"] = *t_max;
    j["steps"] = steps;
    j["n"] = n;
    j["kappa"] = kappa;
    j["at"] = at;
    if (!expect.is_null()) j["expect"] = expect;
    return j;
}

RunResult run_scenario(const Scenario& s) {
    static const std::map<std::string, std::function<RunResult(const Scenario&)>> ops = {
        {"check-metric", op_check_metric}, {"tension", op_tension}, {"energy", op_energy}, {"classify", op_classify},
        {"contact", op_contact},           {"oracle", op_oracle},   {"sweep", op_sweep}};
    const auto it = ops.find(s.operation);
    if (it == ops.end()) throw PreconditionError("unknown operation '" + s.operation + "'");
    RunResult out = it->second(s);
    Json report;
    report["scenario"] = s.to_json();
    report["pass"] = out.pass;
    for (auto& [k, v] : out.report.items()) report[k] = v;
    out.report = std::move(report);
    return out;
}

}  // namespace gnat
