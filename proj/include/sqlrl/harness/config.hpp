#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sqlrl/dqn_agent.hpp"
#include "sqlrl/qtable_agent.hpp"

namespace sqlrl {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class AgentKind { Tabular, Dqn };

const char* to_string(AgentKind kind);
AgentKind agent_kind_from_string(const std::string& s);  // throws ConfigError

// One experiment = one cohort of identically configured agents on disjoint
// seed streams. Serialized as a nested key/value document with a stable key
// order; unknown keys are rejected with their full path so a typo cannot
// silently fall back to a default.
struct ExperimentConfig {
    std::string name = "sim1";
    AgentKind agent = AgentKind::Tabular;
    int cohort = 10;
    std::uint64_t base_seed = 1;       // agent i runs on base_seed + i...
    std::vector<std::uint64_t> seeds;  // ...unless explicit seeds are given
    long train_episodes = 1'000'000;   // tabular budget (the deep agent budgets steps)
    long test_episodes = 100;
    int max_episode_steps = 1000;
    bool save_snapshots = false;
    std::string out_dir = "out";
    Hyperparams tabular;
    DqnConfig dqn;

    std::vector<std::uint64_t> effective_seeds() const;
    void validate() const;  // throws ConfigError

    bool operator==(const ExperimentConfig&) const = default;
};

std::string to_json_text(const ExperimentConfig& cfg);
ExperimentConfig config_from_json_text(const std::string& text,
                                       const std::string& origin = "<string>");
ExperimentConfig load_config(const std::string& path);
void save_config(const std::string& path, const ExperimentConfig& cfg);

}  // namespace sqlrl
