// acceptance_main.cpp - runs the full validation suite and prints one
// pass/fail line per check; exits nonzero when any check fails.

#include "psdist/acceptance.hpp"

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
    psdist::acceptance::AcceptanceOptions opt;
    if (argc > 1) opt.tol_scale = std::atof(argv[1]);
    const auto checks = psdist::acceptance::run_acceptance(opt);
    int failed = 0;
    for (const auto& r : checks) {
        std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  ("
                  << r.detail << ")\n";
        if (!r.pass) ++failed;
    }
    std::cout << (checks.size() - failed) << "/" << checks.size()
              << " checks passed\n";
    return failed == 0 ? 0 : 1;
}
