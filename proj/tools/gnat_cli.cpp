#include "gnat/acceptance.hpp"
#include "gnat/numeric.hpp"
#include "gnat/scenario.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitPass = 0, kExitFail = 1, kExitError = 2;

// Options shared by every operation subcommand; only the flags actually given override the scenario.
struct Flags {
    std::string scenario_path;
    std::string manifold, sextet, field, structure, quantity, output, report, expect;
    double tol = 0, rho = 0, t_min = 0, t_max = 0, kappa = 0, at = 0;
    int points = 0, threads = 0, resolution = 0, steps = 0, n = 0;
    std::uint64_t seed = 0;
    bool timing = false;
};

void add_flags(CLI::App* sub, Flags& f, bool with_file) {
    if (with_file) sub->add_option("--scenario", f.scenario_path, "Scenario JSON file")->check(CLI::ExistingFile);
    sub->add_option("--manifold", f.manifold, "torus:n, sphere:n[:R], euclidean:n, product:r1xsphere:2");
    sub->add_option("--sextet", f.sextet, "sasaki, cg, example_a:..., custom:alpha1=...");
    sub->add_option("--field", f.field, "zero, parallel:c1,..., hopf, rotation, expr:..., random, constant-length[:rho]");
    sub->add_option("--structure", f.structure, "hopf:m or tilted[:angle]");
    sub->add_option("--quantity", f.quantity, "sweep quantity");
    sub->add_option("--tol", f.tol, "verdict tolerance");
    sub->add_option("--points", f.points, "sample points");
    sub->add_option("--seed", f.seed, "random seed");
    sub->add_option("--threads", f.threads, "worker threads (default GNAT_THREADS or 1)");
    sub->add_option("--resolution", f.resolution, "quadrature nodes per axis");
    sub->add_option("--rho", f.rho, "squared length for classify");
    sub->add_option("--t-min", f.t_min, "grid start");
    sub->add_option("--t-max", f.t_max, "grid end");
    sub->add_option("--steps", f.steps, "grid points");
    sub->add_option("-n,--dim", f.n, "base dimension for sextet-only operations");
    sub->add_option("--kappa", f.kappa, "kappa for the (kappa,mu) condition");
    sub->add_option("--at", f.at, "t at which parameter sweeps evaluate");
    sub->add_option("--expect", f.expect, "expected verdict (true/false, case tag, or sweep sign)");
    sub->add_option("-o,--output", f.output, "report path (CSV for sweeps)");
    sub->add_option("--report", f.report, "JSON report path for sweeps");
    sub->add_flag("--timing", f.timing, "include runtime in the report");
}

gnat::Json overrides(const CLI::App* sub, const Flags& f) {
    gnat::Json j = gnat::Json::object();
    auto given = [&](const char* name) { return sub->count(name) > 0; };
    if (given("--manifold")) j["manifold"] = f.manifold;
    if (given("--sextet")) j["sextet"] = f.sextet;
    if (given("--field")) j["field"] = f.field;
    if (given("--structure")) j["structure"] = f.structure;
    if (given("--quantity")) j["quantity"] = f.quantity;
    if (given("--tol")) j["tol"] = f.tol;
    if (given("--points")) j["points"] = f.points;
    if (given("--seed")) j["seed"] = f.seed;
    if (given("--threads")) j["threads"] = f.threads;
    if (given("--resolution")) j["resolution"] = f.resolution;
    if (given("--rho")) j["rho"] = f.rho;
    if (given("--t-min")) j["t_min"] = f.t_min;
    if (given("--t-max")) j["t_max"] = f.t_max;
    if (given("--steps")) j["steps"] = f.steps;
    if (given("--dim")) j["n"] = f.n;
    if (given("--kappa")) j["kappa"] = f.kappa;
    if (given("--at")) j["at"] = f.at;
    if (given("--output")) j["output"] = f.output;
    if (given("--expect")) {
        if (f.expect == "true" || f.expect == "false") j["expect"] = f.expect == "true";
        else j["expect"] = f.expect;
    }
    return j;
}

gnat::Json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw gnat::PreconditionError("cannot open " + path);
    try {
        return gnat::Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw gnat::PreconditionError(path + ": " + e.what());
    }
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw gnat::PreconditionError("cannot write " + path);
    out << text;
}

int run(const std::string& operation, const CLI::App* sub, const Flags& f) {
    gnat::Scenario s;
    s.threads = gnat::numeric::default_threads();
    if (!f.scenario_path.empty()) s.merge(read_json(f.scenario_path));
    if (!operation.empty()) {
        if (!s.operation.empty() && s.operation != operation)
            throw gnat::PreconditionError("scenario operation '" + s.operation + "' does not match subcommand '" +
                                          operation + "'");
        s.operation = operation;
    }
    if (s.operation.empty()) throw gnat::PreconditionError("scenario has no operation");
    s.merge(overrides(sub, f));

    const auto t0 = std::chrono::steady_clock::now();
    gnat::RunResult r = gnat::run_scenario(s);
    if (f.timing)
        r.report["runtime_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const std::string json = r.report.dump(2) + "\n";
    if (s.operation == "sweep") {
        write_text(s.output, r.csv);
        if (!f.report.empty()) write_text(f.report, json);
    } else {
        write_text(s.output, json);
    }
    std::cerr << (r.pass ? "PASS" : "FAIL") << " " << s.operation << "\n";
    return r.pass ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"g-natural metrics on tangent bundles: harmonicity checks and verification suite"};
    app.require_subcommand(1);

    Flags f;
    std::vector<std::pair<std::string, CLI::App*>> ops;
    for (const char* name : {"check-metric", "tension", "energy", "classify", "contact", "oracle", "sweep"}) {
        CLI::App* sub = app.add_subcommand(name, std::string("run the ") + name + " operation");
        add_flags(sub, f, true);
        ops.emplace_back(name, sub);
    }

    CLI::App* run_cmd = app.add_subcommand("run", "run a scenario file");
    run_cmd->add_option("scenario", f.scenario_path, "scenario JSON file")->required()->check(CLI::ExistingFile);
    add_flags(run_cmd, f, false);

    gnat::AcceptanceOptions acc;
    std::string acc_output;
    bool acc_timing = false;
    CLI::App* accept = app.add_subcommand("accept", "run the acceptance suite");
    accept->add_option("--seed", acc.seed, "random seed");
    accept->add_option("--threads", acc.threads, "worker threads (default GNAT_THREADS or 1)");
    accept->add_option("--only", acc.only, "criterion ids")->delimiter(',')->check(CLI::Range(1, 12));
    accept->add_option("-o,--output", acc_output, "JSON report path");
    accept->add_flag("--timing", acc_timing, "include runtimes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitError;
    }

    try {
        if (accept->parsed()) {
            if (accept->count("--threads") == 0) acc.threads = gnat::numeric::default_threads();
            acc.timing = acc_timing;
            const gnat::AcceptanceReport rep = gnat::run_acceptance(acc);
            for (const auto& line : rep.lines()) std::cout << line << "\n";
            if (!acc_output.empty()) write_text(acc_output, rep.to_json().dump(2) + "\n");
            return rep.pass() ? kExitPass : kExitFail;
        }
        if (run_cmd->parsed()) return run("", run_cmd, f);
        for (const auto& [name, sub] : ops)
            if (sub->parsed()) return run(name, sub, f);
    } catch (const gnat::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
