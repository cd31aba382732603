#pragma once

#include <string>
#include <vector>

namespace ats {

struct CheckResult {
    std::string name;
    bool passed = false;
    double max_deviation = 0.0;
    std::string detail;
};

// Fast invariant suite: transform laws, Fredholm identity, shape and
// monotonicity properties, closed-form moment spot checks, parity.
std::vector<CheckResult> run_quick();

// Everything in run_quick plus the Monte Carlo distributional checks
// (Euler and compound-Poisson terminal laws, simulated vs Fourier price).
std::vector<CheckResult> run_full();

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace ats
