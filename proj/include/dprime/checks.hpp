#pragma once

#include <string>
#include <vector>

#include "dprime/experiments.hpp"

namespace dprime {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Full invariant suite over the model configuration; deterministic (fixed
/// RNG seed). Used by the check subcommand and by the acceptance tests.
std::vector<CheckResult> run_invariant_suite(const ModelParams& params, PhasePoint xi,
                                             const QuadratureOptions& opts = {});

}  // namespace dprime
