#include "sqlrl/qtable_agent.hpp"

#include <algorithm>
#include <cassert>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace sqlrl {

namespace {

constexpr char kQTableMagic[4] = {'Q', 'T', 'B', 'L'};
constexpr std::uint32_t kQTableVersion = 1;

float max_q(const QRow& row) {
    return *std::max_element(row.begin(), row.end());
}

}  // namespace

int select_action(const QRow& q_row, double epsilon, Rng& rng) {
    if (epsilon > 0.0 && rng.uniform_real() < epsilon) {
        return rng.uniform_int(0, kNumActions - 1);
    }
    // Uniform tie-breaking among argmax entries via reservoir selection.
    float best = q_row[0];
    int chosen = 0;
    int ties = 1;
    for (int i = 1; i < kNumActions; ++i) {
        if (q_row[i] > best) {
            best = q_row[i];
            chosen = i;
            ties = 1;
        } else if (q_row[i] == best) {
            ++ties;
            if (rng.uniform_index(static_cast<std::size_t>(ties)) == 0) chosen = i;
        }
    }
    return chosen;
}

float td_update(QTable& q, const std::string& state_key, int action, double reward,
                const std::string& next_key, bool terminal, const Hyperparams& hp) {
    double target = reward;
    if (!terminal) {
        target += hp.gamma * static_cast<double>(max_q(q.row(next_key)));
    }
    QRow& row = q.row(state_key);
    const double updated = row[action] + hp.eta * (target - row[action]);
    row[action] = static_cast<float>(updated);
    // Provable range for the +10 / -1 reward scheme with gamma <= 0.9.
    assert(row[action] >= -10.0f - 1e-4f && row[action] <= 10.0f + 1e-4f);
    return row[action];
}

namespace {

// Shared train/test episode loop. Greedy mode records step counts only.
void run_episodes(QTable& q, Environment& env, long episodes, const Hyperparams& hp, Rng& rng,
                  TrainMetrics* metrics, std::vector<int>* step_counts) {
    std::string state_key;
    std::string next_key;
    for (long ep = 0; ep < episodes; ++ep) {
        env.reset();
        state_key = env.state().canonical_key();
        double ep_return = 0.0;
        double discount = 1.0;
        int steps = 0;
        bool done = false;
        while (!done) {
            const int a = select_action(q.row(state_key), hp.epsilon, rng);
            const StepResult r = env.step(a);
            next_key = r.state_after.canonical_key();
            td_update(q, state_key, a, r.reward, next_key, r.done, hp);
            ep_return += discount * r.reward;
            discount *= hp.gamma;
            ++steps;
            done = r.done;
            state_key.swap(next_key);
        }
        if (metrics) {
            metrics->steps.push_back(steps);
            metrics->returns.push_back(ep_return);
            metrics->distinct_states.push_back(static_cast<std::int64_t>(q.size()));
        }
        if (step_counts) {
            step_counts->push_back(steps);
        }
    }
}

}  // namespace

QTrainResult qtable_train(Environment& env, long episodes, const Hyperparams& hp,
                          std::uint64_t policy_seed) {
    QTrainResult out;
    out.metrics.seed = policy_seed;
    out.metrics.hyperparams = hp;
    out.metrics.steps.reserve(episodes);
    out.metrics.returns.reserve(episodes);
    out.metrics.distinct_states.reserve(episodes);
    out.table.reserve(1 << 20);
    Rng rng(splitmix64(policy_seed ^ 0xa9e27ull));
    run_episodes(out.table, env, episodes, hp, rng, &out.metrics, nullptr);
    return out;
}

std::vector<int> qtable_test(QTable& q, Environment& env, long episodes, const Hyperparams& hp,
                             std::uint64_t policy_seed) {
    std::vector<int> steps;
    steps.reserve(episodes);
    Hyperparams greedy = hp;
    greedy.epsilon = 0.0;
    Rng rng(splitmix64(policy_seed ^ 0x7e57ull));
    run_episodes(q, env, episodes, greedy, rng, nullptr, &steps);
    return steps;
}

void QTable::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os.write(kQTableMagic, 4);
    const std::uint32_t version = kQTableVersion;
    os.write(reinterpret_cast<const char*>(&version), 4);
    const std::uint64_t count = entries_.size();
    os.write(reinterpret_cast<const char*>(&count), 8);
    for (const auto& [key, row] : entries_) {
        const std::uint8_t len = static_cast<std::uint8_t>(key.size());
        os.write(reinterpret_cast<const char*>(&len), 1);
        os.write(key.data(), len);
        os.write(reinterpret_cast<const char*>(row.data()), sizeof(QRow));
    }
    if (!os) throw std::runtime_error("short write to " + path);
}

QTable QTable::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    char magic[4];
    std::uint32_t version = 0;
    std::uint64_t count = 0;
    is.read(magic, 4);
    is.read(reinterpret_cast<char*>(&version), 4);
    is.read(reinterpret_cast<char*>(&count), 8);
    if (!is || std::memcmp(magic, kQTableMagic, 4) != 0) {
        throw std::runtime_error(path + ": not a Q-table snapshot");
    }
    if (version != kQTableVersion) {
        throw std::runtime_error(path + ": unsupported snapshot version");
    }
    QTable q;
    q.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        std::uint8_t len = 0;
        is.read(reinterpret_cast<char*>(&len), 1);
        std::string key(len, '\0');
        is.read(key.data(), len);
        QRow row;
        is.read(reinterpret_cast<char*>(row.data()), sizeof(QRow));
        if (!is) throw std::runtime_error(path + ": truncated snapshot");
        q.entries_[key] = row;
    }
    return q;
}

}  // namespace sqlrl
