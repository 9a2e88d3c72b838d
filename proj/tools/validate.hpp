#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace branching::cli {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Invariant suite driven by cfg.seed, cfg.samples, cfg.alpha and cfg.corrupt_wells.
std::vector<CheckResult> run_validation(const RunConfig& cfg);

}  // namespace branching::cli
