#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "sqlrl/environment.hpp"
#include "sqlrl/rng.hpp"

namespace sqlrl {

struct Hyperparams {
    double gamma = 0.9;    // discount factor
    double epsilon = 0.1;  // exploration rate
    double eta = 0.1;      // learning rate

    bool operator==(const Hyperparams&) const = default;
};

using QRow = std::array<float, kNumActions>;

// Sparse Q-table keyed by canonical history. Rows are created just in time,
// zero-initialized, only for states actually encountered.
class QTable {
public:
    QTable() { entries_.max_load_factor(0.7f); }

    QRow& row(const std::string& key) {
        auto [it, inserted] = entries_.try_emplace(key);
        if (inserted) it->second.fill(0.0f);
        return it->second;
    }

    const QRow* find(const std::string& key) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? nullptr : &it->second;
    }

    std::size_t size() const { return entries_.size(); }
    void reserve(std::size_t n) { entries_.reserve(n); }

    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    // Versioned little-endian binary snapshot.
    void save(const std::string& path) const;
    static QTable load(const std::string& path);

private:
    std::unordered_map<std::string, QRow> entries_;
};

struct TrainMetrics {
    std::vector<std::int32_t> steps;           // per episode
    std::vector<double> returns;               // discounted return G per episode
    std::vector<std::int64_t> distinct_states; // cumulative, non-decreasing
    std::uint64_t seed = 0;
    Hyperparams hyperparams;
};

// epsilon-greedy over one Q-row; argmax ties broken uniformly at random.
int select_action(const QRow& q_row, double epsilon, Rng& rng);

// One temporal-difference update:
//   Q(s,a) += eta * (r + gamma * max_a' Q(s_next, a') * (1 - terminal) - Q(s,a))
// The s_next row is created just in time for non-terminal transitions.
// Returns the updated Q(s,a).
float td_update(QTable& q, const std::string& state_key, int action, double reward,
                const std::string& next_key, bool terminal, const Hyperparams& hp);

struct QTrainResult {
    QTable table;
    TrainMetrics metrics;
};

// Standard online loop: reset, then select/step/update until done, for the
// given number of episodes. policy_seed drives only the agent's own draws.
QTrainResult qtable_train(Environment& env, long episodes, const Hyperparams& hp,
                          std::uint64_t policy_seed);

// Greedy test episodes (epsilon forced to 0); learning stays on with the
// given eta. Returns per-episode step counts.
std::vector<int> qtable_test(QTable& q, Environment& env, long episodes, const Hyperparams& hp,
                             std::uint64_t policy_seed);

}  // namespace sqlrl
