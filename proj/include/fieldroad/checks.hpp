#pragma once

// The property suite run by `fieldroad check` and by the acceptance binary:
// one self-contained audit per acceptance criterion, numbered 1..13.

#include <cstdint>
#include <string>
#include <vector>

namespace fieldroad {

struct CheckOptions {
    std::uint64_t seed = 0;
    bool quick = false;  // smaller samples and grids, for smoke runs
};

struct CheckResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

std::vector<int> all_check_ids();

/// Throws ConfigError for an unknown id. Library errors raised inside an
/// audit are reported as a failed result carrying the error text.
CheckResult run_check(int id, const CheckOptions& options = {});

/// "criterion <id> <name>: PASS|FAIL (<seconds> s) <detail>"
std::string format_check_line(const CheckResult& result);

}  // namespace fieldroad
