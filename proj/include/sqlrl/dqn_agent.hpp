#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sqlrl/environment.hpp"
#include "sqlrl/rng.hpp"

namespace sqlrl {

// Ternary observation vector: entry i is +1 / -1 / 0 for a Positive /
// Negative / untried action i. Componentwise image of the history, so it is
// injective over reachable histories. StateCode is the packed form stored in
// the replay buffer.
using StateVector = std::array<double, kNumActions>;
using StateCode = std::array<std::int8_t, kNumActions>;
using QValues = std::array<double, kNumActions>;

StateVector encode(const HistoryState& h);
StateCode encode_compact(const HistoryState& h);
StateVector decode_compact(const StateCode& code);

// Greedy argmax over predicted values, ties broken uniformly at random.
int argmax_action(const QValues& q, Rng& rng);

// Fully connected value network 51 -> 64 -> 64 -> 51: rectified-linear hidden
// units, linear output head, double precision throughout. All parameters live
// in one flat vector (per layer: row-major weights, then biases) so the
// optimizer and the finite-difference tests can treat the model as a plain
// coordinate vector.
class ValueNetwork {
public:
    static constexpr int kInputs = kNumActions;
    static constexpr int kHidden = 64;
    static constexpr int kOutputs = kNumActions;
    static constexpr int kParamCount = kHidden * kInputs + kHidden + kHidden * kHidden + kHidden +
                                       kOutputs * kHidden + kOutputs;

    // All-zero parameters (outputs identically zero).
    ValueNetwork() : params_(kParamCount, 0.0) {}

    // He-uniform weights U(+-sqrt(6/fan_in)) drawn layer by layer in
    // parameter order; biases stay zero.
    void init(Rng& rng);

    // Forward pass. Throws std::runtime_error on a non-finite output
    // (training divergence) with a diagnostic.
    QValues predict(const StateVector& x) const;

    // Forward pass with cached activations for backward().
    struct Trace {
        StateVector x;
        std::array<double, kHidden> h1;  // post-activation
        std::array<double, kHidden> h2;
        QValues y;
    };
    void forward(const StateVector& x, Trace& trace) const;

    // Accumulates d(loss)/d(params) into grad (size kParamCount) for one
    // sample, given d(loss)/dy. Callers zero grad between batches.
    void backward(const Trace& trace, const QValues& dy, std::vector<double>& grad) const;

    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }

    // Versioned snapshot: layer shapes followed by raw little-endian doubles.
    void save(const std::string& path) const;
    static ValueNetwork load(const std::string& path);

private:
    std::vector<double> params_;
};

// Stochastic gradient descent with adaptive first/second moment estimates
// (the standard beta1=0.9, beta2=0.999, eps=1e-8 formulation with bias
// correction).
class AdamOptimizer {
public:
    AdamOptimizer(std::size_t n, double learning_rate)
        : lr_(learning_rate), m_(n, 0.0), v_(n, 0.0) {}

    void step(std::vector<double>& params, const std::vector<double>& grad);

private:
    double lr_;
    long t_ = 0;
    std::vector<double> m_;
    std::vector<double> v_;
};

struct Transition {
    StateCode state;
    StateCode next_state;
    std::int8_t action = 0;
    float reward = 0.0f;
    bool terminal = false;
};

// Fixed-capacity ring buffer; once full, each push evicts the oldest entry.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(const Transition& t);
    const Transition& sample(Rng& rng) const;  // uniform over stored items

    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    // i = 0 is the oldest stored transition.
    const Transition& nth_oldest(std::size_t i) const;

private:
    std::size_t capacity_;
    std::size_t next_ = 0;  // physical slot overwritten by the next push once full
    std::vector<Transition> items_;
};

struct DqnConfig {
    long total_steps = 1'000'000;
    int batch_size = 51;  // action-space-sized batch; 32 is the stock default
    double learning_rate = 1e-4;
    double gamma = 0.99;
    std::size_t buffer_capacity = 100'000;
    long learning_starts = 50'000;   // environment steps before the first update
    int train_freq = 4;              // one gradient update per this many env steps
    long target_sync_interval = 10'000;
    double epsilon_initial = 1.0;
    double epsilon_final = 0.05;
    double exploration_fraction = 0.1;  // share of total_steps spent annealing

    bool operator==(const DqnConfig&) const = default;
};

// Throws std::invalid_argument on an unusable configuration.
void validate(const DqnConfig& cfg);

// Linear anneal from epsilon_initial to epsilon_final over the first
// exploration_fraction of total_steps, constant afterwards.
double epsilon_at(long step, const DqnConfig& cfg);

// Reusable workspace for learn_step (gradient accumulator + forward trace).
struct LearnScratch {
    std::vector<double> grad;
    ValueNetwork::Trace trace;
};

// One batched update: sample batch_size transitions uniformly, form targets
// y = r + gamma * (1 - terminal) * max target_net(next), take one optimizer
// step on the mean squared error between net(state)[action] and y. Returns
// the batch loss. Throws std::runtime_error if the loss goes non-finite.
double learn_step(ValueNetwork& net, const ValueNetwork& target_net, const ReplayBuffer& buffer,
                  const DqnConfig& cfg, AdamOptimizer& opt, Rng& rng, LearnScratch& scratch);

struct DqnTrainResult {
    ValueNetwork net;
    std::vector<std::int32_t> steps;            // per completed episode
    std::vector<double> returns;                // discounted return per episode
    std::vector<std::int64_t> distinct_states;  // cumulative distinct observations
    std::uint64_t seed = 0;
    long updates = 0;  // gradient steps actually taken
};

// Step-budgeted training loop (episodes are emergent): epsilon-greedy
// behavior on the annealing schedule, replay push per step, one learn_step
// every train_freq steps once learning_starts steps have elapsed, target
// sync every target_sync_interval steps. Metric rows cover completed
// episodes only.
DqnTrainResult dqn_train(Environment& env, const DqnConfig& cfg, std::uint64_t policy_seed);

// Greedy evaluation (epsilon = 0), no parameter updates; returns per-episode
// step counts.
std::vector<int> dqn_test(const ValueNetwork& net, Environment& env, long episodes,
                          std::uint64_t policy_seed);

}  // namespace sqlrl
