#pragma once

#include "gnat/scenario.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gnat {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string summary;  // one line, deterministic
    Json details;
    double seconds = 0;   // wall time, reported only on request
};

struct AcceptanceOptions {
    std::uint64_t seed = 1;
    int threads = 1;
    std::vector<int> only;  // empty: all twelve
    bool timing = false;
};

struct AcceptanceReport {
    std::vector<CriterionResult> criteria;
    std::uint64_t seed = 1;
    bool timing = false;

    bool pass() const;
    Json to_json() const;
    // "[PASS] 4 parallel fields: ..." per criterion.
    std::vector<std::string> lines() const;
};

// Runs a single criterion (1..11).
CriterionResult run_criterion(int id, std::uint64_t seed, int threads);
AcceptanceReport run_acceptance(const AcceptanceOptions& opt);

}  // namespace gnat
