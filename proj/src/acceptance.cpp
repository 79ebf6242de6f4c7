#include "gnat/acceptance.hpp"

#include "gnat/contact.hpp"
#include "gnat/harmonicity.hpp"
#include "gnat/numeric.hpp"
#include "gnat/quadrature.hpp"
#include "gnat/tangent_bundle.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>

namespace gnat {

namespace {

constexpr const char* kExampleA = "example_a:lambda=1,mu=2,k=1,eps=0.5";
constexpr const char* kExampleB = "example_b:lambda=1,eta=1,eps=0.5";
constexpr const char* kExpFamily = "exp_family:k1=1,k2=2";
constexpr const char* kFam1 = "custom:alpha1=1,alpha3=0.5,beta1=0.3/(1+t),beta3=-0.3/(1+t)";

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

std::uint64_t sub_seed(std::uint64_t seed, int criterion, int k = 0) {
    return seed * 1000003ULL + static_cast<std::uint64_t>(criterion) * 7919ULL + static_cast<std::uint64_t>(k);
}

// 1: closed-form connection vs the finite-difference oracle.
CriterionResult c1_oracle(std::uint64_t seed, int threads) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<std::string> presets = {"sasaki", "cg", kExampleA, kExpFamily};
    const std::vector<std::string> bases = {"torus:2", "sphere:2", "sphere:3"};
    CriterionResult r;
    Json rows = Json::array();
    double worst = 0;
    size_t count = 0;
    for (size_t b = 0; b < bases.size(); ++b) {
        const ChartedManifold M = manifold_from_spec(bases[b]);
        const auto qs = sample_tm_points(M, 10, sub_seed(seed, 1, static_cast<int>(b)), 0.25, 4.0);
        for (const auto& ps : presets) {
            const MetricSextet F = sextet_from_spec(ps);
            std::vector<double> err(qs.size());
            numeric::parallel_for(qs.size(), threads,
                                  [&](size_t i) { err[i] = compare_with_oracle(M, F, qs[i]).rel_error; });
            const double mx = *std::max_element(err.begin(), err.end());
            worst = std::max(worst, mx);
            count += qs.size();
            rows.push_back({{"base", bases[b]}, {"sextet", F.name()}, {"max_rel_error", mx}});
        }
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.pass = worst <= 1e-5 && r.seconds <= 60.0;
    r.details = {{"comparisons", count}, {"max_rel_error", worst}, {"tolerance", 1e-5}, {"cases", rows}};
    r.summary = std::to_string(count) + " points, max rel error " + sci(worst) + " (tol 1e-5)";
    return r;
}

// 2: Sasaki tension equals (-tr R(nabla V, V), -rough Laplacian).
CriterionResult c2_sasaki(std::uint64_t seed, int) {
    const ChartedManifold M = make_sphere(2);
    const MetricSextet F = preset_sasaki();
    const auto pts = M.sample_points(20, sub_seed(seed, 2));
    double eh = 0, ev = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
        const VectorField V = random_field(M, sub_seed(seed, 2, static_cast<int>(i) + 1));
        const TensionResult t = tension_field(M, F, V, pts[i]);
        const Mat g = M.metric(pts[i]);
        const Vec dh = t.tau_h + trace_R_term(M, V, pts[i]);
        const Vec dv = t.tau_v + rough_laplacian(M, V, pts[i]);
        eh = std::max(eh, std::sqrt(dh.dot(g * dh)));
        ev = std::max(ev, std::sqrt(dv.dot(g * dv)));
    }
    CriterionResult r;
    r.pass = eh <= 1e-10 && ev <= 1e-10;
    r.details = {{"inputs", pts.size()}, {"max_h_error", eh}, {"max_v_error", ev}, {"tolerance", 1e-10}};
    r.summary = "20 inputs on S2, h error " + sci(eh) + ", v error " + sci(ev) + " (tol 1e-10)";
    return r;
}

// 3: Cheeger-Gromoll vertical tension and T(V) on the flat torus.
CriterionResult c3_cg(std::uint64_t seed, int) {
    const ChartedManifold M = make_torus(2);
    const MetricSextet F = preset_cheeger_gromoll();
    const auto pts = M.sample_points(20, sub_seed(seed, 3));
    double ev = 0, eT = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
        const VectorField V = random_field(M, sub_seed(seed, 3, static_cast<int>(i) + 1));
        const FieldJet J = field_jet(M, V, pts[i], true);
        const TensionResult t = tension_from_jet(J, F);
        const double q = 1 + J.r2;
        const double N = J.nabla_norm2, G = J.grad_r2_norm2;
        const Vec tv = -J.laplacian - J.nabla_grad_V / q + ((2 + J.r2) * N + 0.25 * G) / (q * q) * J.V;
        const Vec T = -J.laplacian / q - J.nabla_grad_V / (q * q) +
                      (-J.inner(J.laplacian, J.V) + (2 + J.r2) / q * N - G / (4 * q)) / q * J.V;
        const double sv = 1 + J.norm(tv), sT = 1 + J.norm(T);
        ev = std::max(ev, J.norm(t.tau_v - tv) / sv);
        eT = std::max(eT, std::max(J.norm(t.T - T), J.norm(x_harmonic_T(J, F) - T)) / sT);
    }
    CriterionResult r;
    r.pass = ev <= 1e-8 && eT <= 1e-8;
    r.details = {{"inputs", pts.size()}, {"max_tau_v_error", ev}, {"max_T_error", eT}, {"tolerance", 1e-8}};
    r.summary = "20 inputs on T2, tau_v error " + sci(ev) + ", T error " + sci(eT) + " (tol 1e-8)";
    return r;
}

// 4: parallel fields on T3 are harmonic; energy matches the closed form.
CriterionResult c4_parallel(std::uint64_t seed, int threads) {
    const ChartedManifold M = make_torus(3);
    const auto pts = M.sample_points(50, sub_seed(seed, 4));
    const QuadratureRule rule = quadrature_rule(M);
    const Vec c = (Vec(3) << 0.6, -0.8, 0.5).finished();
    const VectorField V = parallel_field(M, c);
    const double rho = c.squaredNorm();
    Json rows = Json::array();
    bool pass = true;
    for (const char* ps : {"sasaki", "cg"}) {
        const MetricSextet F = sextet_from_spec(ps);
        const HarmonicVerdict h = is_harmonic_map(M, F, V, pts, 1e-10, threads);
        const double E = energy(M, F, V, rule, threads);
        const SextetValues s = F.at(rho);
        const double closed = 0.5 * (3 * (s.a1.v + s.a3.v) + rho * (s.b1.v + s.b3.v)) * std::pow(2 * M_PI, 3);
        const double rel = std::abs(E - closed) / std::abs(closed);
        pass = pass && h.harmonic && rel <= 1e-6;
        rows.push_back({{"sextet", F.name()},
                        {"max_G_norm", h.max_G_norm},
                        {"energy", E},
                        {"closed_form", closed},
                        {"relative_error", rel}});
    }
    CriterionResult r;
    r.pass = pass;
    r.details = {{"points", pts.size()}, {"rho", rho}, {"cases", rows}};
    r.summary = "Sasaki |tau|=" + sci(rows[0]["max_G_norm"].get<double>()) +
                " CG |tau|=" + sci(rows[1]["max_G_norm"].get<double>()) +
                ", energy rel error " +
                sci(std::max(rows[0]["relative_error"].get<double>(), rows[1]["relative_error"].get<double>()));
    return r;
}

// 5: the Hopf field under Sasaki has tau_v = T = -2 xi.
CriterionResult c5_hopf_sasaki(std::uint64_t seed, int threads) {
    const ChartedManifold M = make_sphere(3);
    const MetricSextet F = preset_sasaki();
    const VectorField xi = hopf_field(M);
    const auto pts = M.sample_points(50, sub_seed(seed, 5));
    std::vector<double> h(pts.size()), v(pts.size()), T(pts.size());
    numeric::parallel_for(pts.size(), threads, [&](size_t i) {
        const FieldJet J = field_jet(M, xi, pts[i], true);
        const TensionResult t = tension_from_jet(J, F);
        h[i] = J.norm(t.tau_h);
        v[i] = J.norm(t.tau_v + 2 * J.V);
        T[i] = J.norm(x_harmonic_T(J, F) + 2 * J.V);
    });
    const double mh = *std::max_element(h.begin(), h.end());
    const double mv = *std::max_element(v.begin(), v.end());
    const double mT = *std::max_element(T.begin(), T.end());
    CriterionResult r;
    r.pass = mh <= 1e-4 && mv <= 1e-3 && mT <= 1e-3;
    r.details = {{"points", pts.size()}, {"max_tau_h", mh}, {"max_tau_v_plus_2xi", mv}, {"max_T_plus_2xi", mT}};
    r.summary = "|tau_h|=" + sci(mh) + ", |tau_v+2xi|=" + sci(mv) + ", |T+2xi|=" + sci(mT);
    return r;
}

// 6: the Hopf field is a harmonic map for Example A.
CriterionResult c6_hopf_example_a(std::uint64_t seed, int threads) {
    const ChartedManifold M = make_sphere(3);
    const MetricSextet F = sextet_from_spec(kExampleA);
    const auto pts = M.sample_points(50, sub_seed(seed, 6));
    const HarmonicVerdict h = is_harmonic_map(M, F, hopf_field(M), pts, 1e-4, threads);
    const double k = kcontact_condition(F, 1);
    CriterionResult r;
    r.pass = h.harmonic && std::abs(k) <= 1e-12;
    r.details = {{"points", pts.size()}, {"max_G_norm", h.max_G_norm}, {"kcontact_residual", k}};
    r.summary = "|tau|_G=" + sci(h.max_G_norm) + " (tol 1e-4), K-contact residual " + sci(std::abs(k));
    return r;
}

// 7: classification of parallel constant-length fields.
CriterionResult c7_classify(std::uint64_t, int) {
    struct Case {
        const char* label;
        const char* spec;
        ConstantLengthCase expected;
    };
    const std::vector<Case> cases = {{"Sasaki", "sasaki", ConstantLengthCase::II},
                                     {"CG", "cg", ConstantLengthCase::II},
                                     {"A", kExampleA, ConstantLengthCase::I},
                                     {"B", kExampleB, ConstantLengthCase::III}};
    Json rows = Json::array();
    bool pass = true;
    std::string tags;
    for (const auto& c : cases) {
        const MetricSextet F = sextet_from_spec(c.spec);
        for (double rho : {0.5, 1.0, 2.0, 5.0, 10.0}) {
            for (int n : {2, 3}) {
                const ClassificationVerdict v = classify_constant_length(F, rho, n);
                const bool ok = v.tag == c.expected;
                pass = pass && ok;
                rows.push_back({{"sextet", F.name()},
                                {"rho", rho},
                                {"n", n},
                                {"case", to_string(v.tag)},
                                {"expected", to_string(c.expected)}});
            }
        }
        tags += std::string(tags.empty() ? "" : " ") + c.label + "=" + to_string(c.expected);
    }
    CriterionResult r;
    r.pass = pass;
    r.details = {{"cases", rows}};
    r.summary = std::to_string(rows.size()) + " classifications match " + tags;
    return r;
}

// 8: Riemannian conditions on grids.
CriterionResult c8_riemannian(std::uint64_t, int) {
    auto grid = [](double lo, double hi, int k) {
        std::vector<double> g(k);
        for (int i = 0; i < k; ++i) g[i] = (i == k - 1) ? hi : lo + (hi - lo) * i / (k - 1);
        return g;
    };
    Json rows = Json::array();
    bool pass = true;
    auto add = [&](const std::string& spec, double lo, bool expect_pass) {
        const MetricSextet F = sextet_from_spec(spec);
        for (int n : {2, 3}) {
            const RiemannianReport rr = is_riemannian(F, grid(lo, 10.0, 401), n);
            const bool ok = expect_pass ? rr.pass : rr.failures == rr.rows.size();
            pass = pass && ok;
            rows.push_back({{"sextet", F.name()}, {"n", n}, {"t_min", lo}, {"failures", rr.failures}, {"ok", ok}});
        }
    };
    add("cg", 0.0, true);
    add("broken", 0.0, false);
    add(kExampleA, 0.5, true);
    add(kExampleB, 0.5, true);
    CriterionResult r;
    r.pass = pass;
    r.details = {{"grid_points", 401}, {"cases", rows}};
    r.summary = "CG and Examples A/B pass on 401 points, broken fails everywhere";
    return r;
}

// 9: energy density identity, the constant-length lower bound and the Hopf energy.
CriterionResult c9_energy(std::uint64_t seed, int threads) {
    const std::vector<std::string> bases = {"torus:2", "sphere:2", "sphere:3", "torus:3"};
    const std::vector<std::string> sextets = {
        "sasaki", "cg", kExpFamily,
        "custom:alpha1=1+0.2*t,alpha2=0.3/(1+t),alpha3=0.4,beta1=0.1,beta2=0.2*exp(-t),beta3=0.05*t"};
    const int draws = 500;
    std::vector<double> err(draws);
    numeric::parallel_for(draws, threads, [&](size_t i) {
        const ChartedManifold M = manifold_from_spec(bases[i % bases.size()]);
        const MetricSextet F = sextet_from_spec(sextets[(i / bases.size()) % sextets.size()]);
        const VectorField V = random_field(M, sub_seed(seed, 9, static_cast<int>(i)));
        const Point p = M.sample_points(1, sub_seed(seed, 9, 10000 + static_cast<int>(i)))[0];
        const double e = energy_density(M, F, V, p);
        err[i] = std::abs(e - energy_density_trace(M, F, V, p)) / (1 + std::abs(e));
    });
    const double density_error = *std::max_element(err.begin(), err.end());

    const ChartedManifold S3 = make_sphere(3);
    const QuadratureRule rule = quadrature_rule(S3);
    const double vol = rule.total_weight();
    const std::vector<std::string> presets = {"sasaki", "cg", kExampleA};
    std::vector<MetricSextet> Fs;
    for (const auto& s : presets) Fs.push_back(sextet_from_spec(s));
    numeric::Rng rng(sub_seed(seed, 9, 20000));
    double min_gap = INFINITY;
    bool bound_ok = true;
    Json fields = Json::array();
    for (int f = 0; f < 20; ++f) {
        const double rho = rng.uniform(0.5, 2.0);
        const VectorField V = random_constant_length_field(S3, rho, sub_seed(seed, 9, 30000 + f));
        std::vector<std::vector<double>> dens(Fs.size(), std::vector<double>(rule.size()));
        numeric::parallel_for(rule.size(), threads, [&](size_t i) {
            const FieldJet J = field_jet(S3, V, rule.nodes[i], false);
            for (size_t k = 0; k < Fs.size(); ++k) dens[k][i] = rule.weights[i] * energy_density(J, Fs[k]);
        });
        Json row = {{"rho", rho}};
        for (size_t k = 0; k < Fs.size(); ++k) {
            const double E = numeric::pairwise_sum(dens[k]);
            const double bound = energy_lower_bound(Fs[k], rho, 3, vol);
            const double gap = (E - bound) / std::abs(bound);
            min_gap = std::min(min_gap, gap);
            bound_ok = bound_ok && E >= bound * (1 - 1e-12);
            row[Fs[k].name()] = {{"energy", E}, {"lower_bound", bound}};
        }
        fields.push_back(row);
    }

    const double hopf = energy(S3, preset_sasaki(), hopf_field(S3), rule, threads);
    const double hopf_expected = 2.5 * 2 * M_PI * M_PI;
    const double hopf_err = std::abs(hopf - hopf_expected);

    CriterionResult r;
    r.pass = density_error <= 1e-10 && bound_ok && hopf_err <= 1e-3;
    r.details = {{"density_draws", draws},
                 {"max_density_error", density_error},
                 {"lower_bound_holds", bound_ok},
                 {"min_relative_gap", min_gap},
                 {"fields", fields},
                 {"hopf_energy", hopf},
                 {"hopf_expected", hopf_expected},
                 {"hopf_error", hopf_err}};
    r.summary = "density error " + sci(density_error) + ", bound holds on 20x3 fields, Hopf energy error " +
                sci(hopf_err);
    return r;
}

// 10: contact axioms, Reeb identities and H-contact on the Hopf structure.
CriterionResult c10_contact(std::uint64_t seed, int) {
    const ContactMetricStructure S = hopf_structure(1);
    const auto pts = S.manifold().sample_points(50, sub_seed(seed, 10));
    const ContactReport c = verify_contact(S, pts, 1e-4);
    const ReebReport rb = reeb_identities(S, pts, 1e-4);
    const HContactVerdict hc = is_h_contact(S, pts, 1e-5);
    double trR = 0;
    for (const Point& p : pts) {
        const FieldJet J = field_jet(S.manifold(), S.xi, p, true);
        trR = std::max(trR, J.norm(J.trR));
    }
    const bool eig = std::abs(hc.min_eigenvalue - 2) <= 1e-5 && std::abs(hc.max_eigenvalue - 2) <= 1e-5;
    const double axioms = std::max({c.eta_xi, c.phi_xi, c.eta_phi, c.phi_squared, c.d_eta, c.skew, c.unit});
    const double reeb = std::max({rb.nabla_xi, rb.nabla_xi_xi, rb.div_xi, rb.norm_identity, rb.ricci_identity,
                                  rb.laplacian});
    CriterionResult r;
    r.pass = c.pass && rb.pass && hc.h_contact && eig && trR <= 1e-5;
    r.details = {{"points", pts.size()},
                 {"max_axiom_residual", axioms},
                 {"max_reeb_residual", reeb},
                 {"h_contact", hc.h_contact},
                 {"min_eigenvalue", hc.min_eigenvalue},
                 {"max_eigenvalue", hc.max_eigenvalue},
                 {"max_trR", trR}};
    r.summary = "axioms " + sci(axioms) + ", Reeb " + sci(reeb) + ", eigenvalue " + sci(hc.max_eigenvalue) +
                ", |trR| " + sci(trR);
    return r;
}

// 11: T(V) vanishes exactly when tau_v does, for a first-family sextet.
CriterionResult c11_coupling(std::uint64_t seed, int) {
    const ChartedManifold M = make_torus(2);
    const MetricSextet F = sextet_from_spec(kFam1);
    const RigidityFamily fam = rigidity_family(F, 2);
    const auto pts = M.sample_points(20, sub_seed(seed, 11));
    const double tol = 1e-9;
    bool iff = true, sandwich = true;
    size_t zeros = 0;
    Json rows = Json::array();
    for (size_t i = 0; i < pts.size(); ++i) {
        const VectorField V = (i % 2 == 0)
                                  ? parallel_field(M, (Vec(2) << 0.3 + 0.1 * i, -0.7).finished())
                                  : random_field(M, sub_seed(seed, 11, static_cast<int>(i) + 1));
        const FieldJet J = field_jet(M, V, pts[i], true);
        const TensionResult t = tension_from_jet(J, F);
        const double nv = J.norm(t.tau_v), nT = J.norm(t.T);
        const SextetValues s = F.at(J.r2);
        const double a1 = s.a1.v, p1 = s.a1.v + J.r2 * s.b1.v;
        const double lo = std::min(a1, p1) * nv, hi = std::max(a1, p1) * nv;
        sandwich = sandwich && nT >= lo * (1 - 1e-9) - 1e-14 && nT <= hi * (1 + 1e-9) + 1e-14;
        iff = iff && ((nT <= tol) == (nv <= tol));
        zeros += nv <= tol;
        rows.push_back({{"tau_v", nv}, {"T", nT}, {"alpha1", a1}, {"phi1", p1}});
    }
    CriterionResult r;
    r.pass = fam == RigidityFamily::Fam1 && iff && sandwich && zeros > 0 && zeros < pts.size();
    r.details = {{"family", to_string(fam)}, {"zero_cases", zeros}, {"iff", iff}, {"sandwich", sandwich},
                 {"inputs", rows}};
    r.summary = "family " + to_string(fam) + ", " + std::to_string(zeros) + "/20 zero cases agree, bounds hold";
    return r;
}

const std::vector<std::pair<const char*, std::function<CriterionResult(std::uint64_t, int)>>>& table() {
    static const std::vector<std::pair<const char*, std::function<CriterionResult(std::uint64_t, int)>>> t = {
        {"oracle equivalence", c1_oracle},
        {"Sasaki tension reduction", c2_sasaki},
        {"Cheeger-Gromoll tension reduction", c3_cg},
        {"parallel fields on T3", c4_parallel},
        {"Hopf field under Sasaki", c5_hopf_sasaki},
        {"Hopf field under Example A", c6_hopf_example_a},
        {"constant-length classification", c7_classify},
        {"Riemannian checker", c8_riemannian},
        {"energy identities", c9_energy},
        {"contact axioms and Reeb identities", c10_contact},
        {"T(V) and tau_v coupling", c11_coupling},
    };
    return t;
}

Json criterion_json(const CriterionResult& c, bool timing) {
    Json j = {{"id", c.id}, {"name", c.name}, {"pass", c.pass}, {"summary", c.summary}, {"details", c.details}};
    if (timing) j["seconds"] = c.seconds;
    return j;
}

std::string run_bytes(std::uint64_t seed) {
    Json all = Json::array();
    for (int id = 1; id <= 11; ++id) all.push_back(criterion_json(run_criterion(id, seed, 1), false));
    return all.dump();
}

}  // namespace

CriterionResult run_criterion(int id, std::uint64_t seed, int threads) {
    if (id < 1 || id > static_cast<int>(table().size()))
        throw PreconditionError("criterion id must be in 1.." + std::to_string(table().size()));
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
        r = table()[id - 1].second(seed, threads);
    } catch (const Error& e) {
        r.pass = false;
        r.summary = std::string("error: ") + e.what();
    }
    if (r.seconds == 0) r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    r.id = id;
    r.name = table()[id - 1].first;
    return r;
}

AcceptanceReport run_acceptance(const AcceptanceOptions& opt) {
    AcceptanceReport rep;
    rep.seed = opt.seed;
    rep.timing = opt.timing;
    auto wanted = [&](int id) { return opt.only.empty() || std::find(opt.only.begin(), opt.only.end(), id) != opt.only.end(); };
    for (int id = 1; id <= 11; ++id)
        if (wanted(id)) rep.criteria.push_back(run_criterion(id, opt.seed, opt.threads));
    if (wanted(12)) {
        const auto t0 = std::chrono::steady_clock::now();
        const std::string a = run_bytes(opt.seed), b = run_bytes(opt.seed);
        CriterionResult r;
        r.id = 12;
        r.name = "determinism";
        r.pass = a == b;
        r.details = {{"report_bytes", a.size()}, {"identical", a == b}};
        r.summary = "criteria 1-11 run twice at 1 thread, " + std::to_string(a.size()) + " bytes, " +
                    (a == b ? "identical" : "different");
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        rep.criteria.push_back(r);
    }
    return rep;
}

bool AcceptanceReport::pass() const {
    return std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& c) { return c.pass; });
}

Json AcceptanceReport::to_json() const {
    Json j;
    j["seed"] = seed;
    j["pass"] = pass();
    j["criteria"] = Json::array();
    for (const auto& c : criteria) j["criteria"].push_back(criterion_json(c, timing));
    return j;
}

std::vector<std::string> AcceptanceReport::lines() const {
    std::vector<std::string> out;
    for (const auto& c : criteria) {
        std::string s = std::string(c.pass ? "[PASS] " : "[FAIL] ") + std::to_string(c.id) + " " + c.name + ": " +
                        c.summary;
        if (timing) s += " (" + sci(c.seconds) + " s)";
        out.push_back(s);
    }
    return out;
}

}  // namespace gnat
