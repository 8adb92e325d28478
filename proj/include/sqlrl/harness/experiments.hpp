#pragma once

#include <string>
#include <vector>

#include "sqlrl/harness/cohort.hpp"
#include "sqlrl/harness/config.hpp"

namespace sqlrl {

// Named, fully pinned experiment setups (seeds included) so every result can
// be regenerated identically. The *-smoke variants shrink budgets from hours
// to minutes while keeping the qualitative behavior; their pass conditions
// are scaled accordingly.
std::vector<std::string> experiment_names();
ExperimentConfig experiment_config(const std::string& name);  // ConfigError on unknown name

struct CheckResult {
    bool pass = true;
    std::string detail;  // one line per condition, prefixed PASS/FAIL
};

// The per-experiment pass condition behind `repro --check`. Reads the
// training metric files named in the result where a condition needs them.
CheckResult check_experiment(const ExperimentConfig& cfg, const CohortResult& result);

}  // namespace sqlrl
