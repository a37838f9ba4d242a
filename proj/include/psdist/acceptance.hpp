// acceptance.hpp - the release gate: one named check per validation
// criterion, each comparing independent computation paths or frozen
// reference values.

#pragma once

#include <string>
#include <vector>

namespace psdist::acceptance {

struct CheckResult {
    std::string name;
    bool pass = false;
    double worst_ratio = 0.0;  // worst residual over tolerance; <= 1 passes
    std::string detail;
};

struct AcceptanceOptions {
    double tol_scale = 1.0;  // < 1 tightens every quantitative tolerance
};

// run every check in a fixed order; one result per check, no throws for
// check failures (only for broken environments)
std::vector<CheckResult> run_acceptance(const AcceptanceOptions& opt = {});

}  // namespace psdist::acceptance
