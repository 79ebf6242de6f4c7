#pragma once

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace gnat {

using Json = nlohmann::ordered_json;

// One batch job. Unset numeric fields fall back to per-operation defaults.
struct Scenario {
    std::string operation;            // check-metric, tension, energy, classify, contact, oracle, sweep
    std::string manifold = "torus:2";
    std::string sextet = "sasaki";
    std::string field = "zero";
    std::string structure = "hopf:1";
    std::string quantity = "bracket-prime";  // sweep only
    double tol = -1;                  // < 0: operation default
    int points = 50;
    std::uint64_t seed = 1;
    int threads = 1;
    int resolution = 0;               // quadrature nodes per axis, 0 = default
    double rho = 1.0;
    std::optional<double> t_min, t_max;  // per-operation defaults when absent
    int steps = 101;
    int n = 0;                        // dimension for sextet-only operations, 0 = from the manifold
    double kappa = 1.0;
    double at = 1.0;                  // t at which parameter sweeps evaluate
    std::string output;               // report or CSV path; empty = stdout
    // Expected verdict: bool for tension/contact, case tag for classify,
    // "positive" | "negative" | "zero" | "nonzero" for sweeps. Null: the verdict itself must hold.
    Json expect;

    // Fields present in `j` override the current values; unknown keys raise PreconditionError.
    void merge(const Json& j);
    Json to_json() const;
};

struct RunResult {
    Json report;
    bool pass = false;
    std::string csv;  // sweep only
};

// Throws gnat::Error (or a subclass) on unresolvable specs or incompatible operations.
RunResult run_scenario(const Scenario& s);

}  // namespace gnat
