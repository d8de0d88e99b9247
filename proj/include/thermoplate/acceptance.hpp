#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace thermoplate::acceptance {

struct CriterionResult {
    int number;
    std::string name;
    bool pass;
    std::string detail;
    double seconds;
};

struct Options {
    std::string out_dir = "out";
    std::uint64_t seed = 20240101;
    bool quiet = false;  // suppress per-criterion lines (summary only)
};

// Runs the full verification suite, printing one pass/fail line per
// criterion and writing the deterministic artifact bundle under out_dir.
std::vector<CriterionResult> run_all(const Options& opts);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace thermoplate::acceptance
