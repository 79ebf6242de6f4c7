#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gnat/core.hpp"
#include "gnat/scenario.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace gnat;

namespace {

Scenario make(const char* text) {
    Scenario s;
    s.merge(Json::parse(text));
    return s;
}

size_t lines(const std::string& s) { return static_cast<size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("merge overrides present keys only") {
    Scenario s;
    s.merge(Json::parse(R"({"operation": "tension", "manifold": "sphere:2", "points": 7, "t_max": 3.5})"));
    CHECK(s.operation == "tension");
    CHECK(s.manifold == "sphere:2");
    CHECK(s.points == 7);
    CHECK(s.sextet == "sasaki");
    REQUIRE(s.t_max.has_value());
    CHECK(*s.t_max == 3.5);
    CHECK_FALSE(s.t_min.has_value());
    s.merge(Json::parse(R"({"sextet": "cg", "description": "ignored"})"));
    CHECK(s.manifold == "sphere:2");
    CHECK(s.sextet == "cg");
}

TEST_CASE("merge rejects unknown keys and wrong types") {
    Scenario s;
    CHECK_THROWS_AS(s.merge(Json::parse(R"({"manifol": "torus:2"})")), PreconditionError);
    CHECK_THROWS(s.merge(Json::parse(R"({"points": "many"})")));
    CHECK_THROWS(s.merge(Json::parse("[1, 2]")));
}

TEST_CASE("to_json round trips through merge") {
    const Scenario a = make(R"({"operation": "sweep", "sextet": "cg", "quantity": "bracket", "steps": 5,
                               "t_min": 0.5, "expect": "positive", "kappa": 0.5})");
    Scenario b;
    b.merge(a.to_json());
    CHECK(b.to_json().dump() == a.to_json().dump());
}

TEST_CASE("unknown operations and bad specs are errors") {
    CHECK_THROWS_AS(run_scenario(make(R"({"operation": "dance"})")), PreconditionError);
    CHECK_THROWS_AS(run_scenario(make(R"({"operation": "tension", "manifold": "klein:2"})")), Error);
    CHECK_THROWS_AS(run_scenario(make(R"({"operation": "tension", "sextet": "custom:alpha1=1+"})")), Error);
    CHECK_THROWS_AS(run_scenario(make(R"({"operation": "sweep", "quantity": "nope"})")), PreconditionError);
}

TEST_CASE("check-metric operation") {
    const RunResult cg = run_scenario(make(R"({"operation": "check-metric", "sextet": "cg", "n": 3})"));
    CHECK(cg.pass);
    CHECK(cg.report["riemannian"] == true);
    CHECK(cg.report["scenario"]["operation"] == "check-metric");
    const RunResult bad = run_scenario(make(R"({"operation": "check-metric", "sextet": "custom:alpha1=1-t,alpha3=0", "n": 3})"));
    CHECK_FALSE(bad.pass);
    CHECK(bad.report["riemannian_failures"].size() > 0);
    const RunResult expected_bad = run_scenario(
        make(R"({"operation": "check-metric", "sextet": "custom:alpha1=1-t,alpha3=0", "n": 3, "expect": false})"));
    CHECK(expected_bad.pass);
}

TEST_CASE("tension operation") {
    const RunResult par = run_scenario(make(R"({"operation": "tension", "manifold": "torus:2", "sextet": "cg",
                                                "field": "parallel:1,2", "points": 10})"));
    CHECK(par.pass);
    CHECK(par.report["harmonic_map"] == true);
    CHECK(par.report["points"].size() == 10);
    const RunResult hopf = run_scenario(make(R"({"operation": "tension", "manifold": "sphere:3",
                                                 "field": "hopf", "points": 10, "expect": false})"));
    CHECK(hopf.pass);
    CHECK(hopf.report["harmonic_map"] == false);
}

TEST_CASE("energy operation") {
    const RunResult r = run_scenario(make(R"({"operation": "energy", "manifold": "sphere:3", "field": "hopf"})"));
    CHECK(r.pass);
    CHECK(r.report["energy"].get<double>() == doctest::Approx(5 * M_PI * M_PI).epsilon(1e-10));
    CHECK(r.report["constant_length"] == true);
    const RunResult c = run_scenario(make(R"({"operation": "energy", "manifold": "torus:2", "sextet": "cg",
                                              "field": "constant-length:0.8", "resolution": 24})"));
    CHECK(c.pass);
    CHECK(c.report["nodes"] == 24 * 24);
    CHECK(c.report["relative_error"].get<double>() < 1e-4);
    CHECK(c.report["energy"].get<double>() >= c.report["lower_bound"].get<double>());
}

TEST_CASE("classify operation") {
    const RunResult a = run_scenario(make(R"({"operation": "classify", "sextet": "example_a:lambda=1,mu=2,k=1,eps=0.5",
                                              "n": 3, "rho": 1.5, "expect": "i"})"));
    CHECK(a.pass);
    const RunResult b = run_scenario(make(R"({"operation": "classify", "sextet": "sasaki", "n": 3, "expect": "i"})"));
    CHECK_FALSE(b.pass);
    CHECK(b.report["case"] == "ii");
    CHECK(b.report["rigidity_family"] == "fam1");
}

TEST_CASE("contact operation") {
    const RunResult s = run_scenario(make(R"({"operation": "contact", "structure": "hopf:1", "points": 10,
                                              "expect": false})"));
    CHECK(s.pass);
    CHECK(s.report["contact"]["pass"] == true);
    CHECK(s.report["kcontact_residual"].get<double>() == doctest::Approx(2.0));
    const RunResult e = run_scenario(make(R"({"operation": "contact", "sextet": "exp_family:k1=1,k2=2",
                                              "points": 10, "expect": true})"));
    CHECK(e.pass);
}

TEST_CASE("oracle operation") {
    const RunResult r = run_scenario(make(R"({"operation": "oracle", "manifold": "sphere:2", "sextet": "cg",
                                              "points": 5})"));
    CHECK(r.pass);
    CHECK(r.report["max_rel_error"].get<double>() < 1e-5);
    CHECK(r.report["points"].size() == 5);
}

TEST_CASE("sweeps produce one CSV row per step") {
    const RunResult r = run_scenario(make(R"({"operation": "sweep", "sextet": "cg", "n": 3,
                                              "quantity": "riemannian-margin", "t_min": 0, "t_max": 10,
                                              "steps": 41, "expect": "positive"})"));
    CHECK(r.pass);
    CHECK(lines(r.csv) == 42);
    CHECK(r.csv.rfind("t,alpha1,phi1,alpha,phi,margin\n", 0) == 0);
    CHECK(r.report["rows"] == 41);
    CHECK(r.report["min"].get<double>() > 0);
}

TEST_CASE("Example B bracket derivative never vanishes") {
    const RunResult r = run_scenario(make(R"({"operation": "sweep", "sextet": "example_b:lambda=1,eta=1,eps=0.5",
                                              "n": 3, "quantity": "bracket-prime", "t_min": 0.1, "t_max": 10,
                                              "steps": 50, "expect": "nonzero"})"));
    CHECK(r.pass);
}

TEST_CASE("parameter sweep of the K-contact condition") {
    const RunResult r = run_scenario(make(R"({"operation": "sweep", "sextet": "exp_family:k1={},k2=2", "n": 3,
                                              "quantity": "kcontact", "steps": 10, "expect": "zero"})"));
    CHECK(r.pass);
    CHECK(r.csv.rfind("param,kcontact\n", 0) == 0);
    CHECK(lines(r.csv) == 11);
    CHECK_THROWS_AS(run_scenario(make(R"({"operation": "sweep", "sextet": "cg", "n": 2, "quantity": "kcontact"})")),
                    PreconditionError);
    const RunResult sas = run_scenario(make(R"({"operation": "sweep", "sextet": "sasaki", "n": 3, "quantity": "kmu",
                                                "kappa": 2, "steps": 3, "expect": "zero"})"));
    CHECK(sas.pass);
}

TEST_CASE("reports are deterministic and thread independent") {
    const char* text = R"({"operation": "tension", "manifold": "sphere:2", "sextet": "cg", "field": "random",
                           "points": 12, "seed": 5})";
    Scenario a = make(text), b = make(text);
    b.threads = 3;
    Json ra = run_scenario(a).report, rb = run_scenario(b).report;
    ra["scenario"].erase("threads");
    rb["scenario"].erase("threads");
    CHECK(ra.dump() == rb.dump());
    CHECK(run_scenario(a).report.dump() == run_scenario(a).report.dump());
}

TEST_CASE("bundled scenario files run") {
    size_t count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(std::string(GNAT_SOURCE_DIR) + "/scenarios")) {
        if (entry.path().extension() != ".json") continue;
        std::ifstream in(entry.path());
        Scenario s;
        s.merge(Json::parse(in));
        INFO(entry.path().filename().string());
        CHECK(run_scenario(s).pass);
        ++count;
    }
    CHECK(count >= 8);
}
