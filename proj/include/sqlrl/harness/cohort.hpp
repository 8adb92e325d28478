#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sqlrl/harness/config.hpp"
#include "sqlrl/harness/stats.hpp"

namespace sqlrl {

struct AgentOutcome {
    int agent_id = 0;
    std::uint64_t seed = 0;
    std::string train_file;
    std::vector<int> test_steps;
    SummaryStats test_stats;               // over test_steps
    long long final_distinct_states = 0;   // tabular: Q-table size at the end
    long episodes_trained = 0;
    double train_seconds = 0.0;
};

struct CohortResult {
    std::vector<AgentOutcome> agents;
    SummaryStats aggregate_test;  // pooled over every agent's test episodes
    std::string test_file;
    std::string summary_file;
};

// Trains cfg.cohort agents (sequentially, or on up to `jobs` worker threads),
// runs the greedy test protocol on each, and writes one training metrics file
// per agent, one pooled test file, and a summary document into cfg.out_dir.
// Output is a pure function of the config: re-running produces byte-identical
// metric files regardless of the job count. Progress goes to stderr unless
// quiet.
CohortResult run_cohort(const ExperimentConfig& cfg, int jobs = 1, bool quiet = false);

}  // namespace sqlrl
