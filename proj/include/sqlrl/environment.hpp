#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sqlrl/actionspace.hpp"
#include "sqlrl/envgen.hpp"
#include "sqlrl/rng.hpp"

namespace sqlrl {

enum class Response { Negative, Positive, Flag };

const char* to_string(Response r);

// Deterministic response rule: mismatched escape is always Negative; with a
// matching escape, 1=1 probes answer Positive and 1=2 probes Negative, and
// UNION actions answer by column-count match (Flag only for injections).
Response classify(const Action& action, const QueryTemplate& tmpl);

inline constexpr double kFlagReward = 10.0;
inline constexpr double kStepPenalty = -1.0;

// Which actions were tried this episode and what they answered. The MDP
// state h. Responses are deterministic per episode, so an entry never
// changes once recorded.
class HistoryState {
public:
    HistoryState() { outcomes_.fill(0); }

    void record(int action_index, Response r) {
        std::int8_t& slot = outcomes_[action_index];
        if (slot == 0) {
            slot = (r == Response::Negative) ? -1 : +1;
            ++tried_;
        }
    }

    // 0 untried, +1 positive, -1 negative.
    std::int8_t outcome(int action_index) const { return outcomes_[action_index]; }
    int tried_count() const { return tried_; }

    // Canonical key: signed 1-based indices in ascending action order,
    // +(i+1) for Positive, -(i+1) for Negative, one byte each. Invariant
    // under the order outcomes were recorded in.
    std::string canonical_key() const {
        std::string key;
        key.reserve(tried_);
        for (int i = 0; i < kNumActions; ++i) {
            if (outcomes_[i] != 0) {
                key.push_back(static_cast<char>(outcomes_[i] * (i + 1)));
            }
        }
        return key;
    }

    // Human-readable form of the canonical key, e.g. "+9|-17|+22".
    std::string display_key() const;

    bool operator==(const HistoryState&) const = default;

private:
    std::array<std::int8_t, kNumActions> outcomes_;
    int tried_ = 0;
};

struct StepResult {
    Response response = Response::Negative;
    double reward = kStepPenalty;
    bool done = false;
    HistoryState state_after;
};

struct EpisodeConfig {
    int max_steps = 1000;  // must be >= 51
    std::uint64_t seed = 0;
};

// The MDP. Each reset draws a fresh hidden instance from the seeded stream;
// the agent only ever observes responses. One Environment per agent; never
// shared across threads.
class Environment {
public:
    explicit Environment(const EpisodeConfig& cfg);

    const HistoryState& reset();
    // Fixed instance for tests; does not consume from the seed stream.
    const HistoryState& reset_with_instance_seed(std::uint64_t instance_seed);

    // Throws std::logic_error if the episode is already done.
    StepResult step(const Action& action);
    StepResult step(int action_index) { return step(action_table()[action_index]); }

    const HistoryState& state() const { return state_; }
    bool done() const { return done_; }
    int steps_taken() const { return steps_; }
    int max_steps() const { return cfg_.max_steps; }

    // The hidden ground truth; for tests and the trace exporter only.
    const EnvInstance& instance() const { return instance_; }

private:
    EpisodeConfig cfg_;
    Rng instance_rng_;
    EnvInstance instance_;
    HistoryState state_;
    int steps_ = 0;
    bool done_ = true;  // step() before the first reset() is a contract violation
};

// Episode trace export: one record per step, delimiter-separated with a
// header row.
class TraceWriter {
public:
    explicit TraceWriter(std::ostream& os);
    void append(long episode_id, int step_index, const Action& action, const StepResult& result);

private:
    std::ostream& os_;
};

}  // namespace sqlrl
