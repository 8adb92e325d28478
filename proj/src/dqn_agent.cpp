#include "sqlrl/dqn_agent.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace sqlrl {

namespace {

constexpr int kIn = ValueNetwork::kInputs;
constexpr int kH = ValueNetwork::kHidden;
constexpr int kOut = ValueNetwork::kOutputs;

// Flat parameter layout, layer by layer: row-major weights then biases.
constexpr int kOffW1 = 0;
constexpr int kOffB1 = kOffW1 + kH * kIn;
constexpr int kOffW2 = kOffB1 + kH;
constexpr int kOffB2 = kOffW2 + kH * kH;
constexpr int kOffW3 = kOffB2 + kH;
constexpr int kOffB3 = kOffW3 + kOut * kH;
static_assert(kOffB3 + kOut == ValueNetwork::kParamCount);

constexpr char kSnapshotMagic[4] = {'V', 'N', 'E', 'T'};
constexpr std::uint32_t kSnapshotVersion = 1;

}  // namespace

StateVector encode(const HistoryState& h) {
    StateVector v;
    for (int i = 0; i < kNumActions; ++i) v[i] = static_cast<double>(h.outcome(i));
    return v;
}

StateCode encode_compact(const HistoryState& h) {
    StateCode c;
    for (int i = 0; i < kNumActions; ++i) c[i] = h.outcome(i);
    return c;
}

StateVector decode_compact(const StateCode& code) {
    StateVector v;
    for (int i = 0; i < kNumActions; ++i) v[i] = static_cast<double>(code[i]);
    return v;
}

int argmax_action(const QValues& q, Rng& rng) {
    double best = q[0];
    int chosen = 0;
    int ties = 1;
    for (int i = 1; i < kNumActions; ++i) {
        if (q[i] > best) {
            best = q[i];
            chosen = i;
            ties = 1;
        } else if (q[i] == best) {
            ++ties;
            if (rng.uniform_index(static_cast<std::size_t>(ties)) == 0) chosen = i;
        }
    }
    return chosen;
}

void ValueNetwork::init(Rng& rng) {
    auto he_uniform = [&](int offset, int rows, int cols) {
        const double bound = std::sqrt(6.0 / cols);  // cols = fan-in
        for (int i = 0; i < rows * cols; ++i) {
            params_[offset + i] = (2.0 * rng.uniform_real() - 1.0) * bound;
        }
    };
    he_uniform(kOffW1, kH, kIn);
    he_uniform(kOffW2, kH, kH);
    he_uniform(kOffW3, kOut, kH);
    // Biases stay zero.
}

void ValueNetwork::forward(const StateVector& x, Trace& trace) const {
    const double* p = params_.data();
    trace.x = x;
    for (int j = 0; j < kH; ++j) {
        double z = p[kOffB1 + j];
        const double* w = p + kOffW1 + j * kIn;
        for (int i = 0; i < kIn; ++i) z += w[i] * x[i];
        trace.h1[j] = z > 0.0 ? z : 0.0;
    }
    for (int k = 0; k < kH; ++k) {
        double z = p[kOffB2 + k];
        const double* w = p + kOffW2 + k * kH;
        for (int j = 0; j < kH; ++j) z += w[j] * trace.h1[j];
        trace.h2[k] = z > 0.0 ? z : 0.0;
    }
    for (int o = 0; o < kOut; ++o) {
        double z = p[kOffB3 + o];
        const double* w = p + kOffW3 + o * kH;
        for (int k = 0; k < kH; ++k) z += w[k] * trace.h2[k];
        trace.y[o] = z;
    }
    for (int o = 0; o < kOut; ++o) {
        if (!std::isfinite(trace.y[o])) {
            std::ostringstream msg;
            msg << "value network diverged: output " << o << " is " << trace.y[o]
                << " (non-finite activation; lower the learning rate or check inputs)";
            throw std::runtime_error(msg.str());
        }
    }
}

QValues ValueNetwork::predict(const StateVector& x) const {
    Trace trace;
    forward(x, trace);
    return trace.y;
}

void ValueNetwork::backward(const Trace& trace, const QValues& dy, std::vector<double>& grad) const {
    const double* p = params_.data();
    double* g = grad.data();
    std::array<double, kH> dh2{};
    for (int o = 0; o < kOut; ++o) {
        const double d = dy[o];
        if (d == 0.0) continue;
        g[kOffB3 + o] += d;
        double* gw = g + kOffW3 + o * kH;
        const double* w = p + kOffW3 + o * kH;
        for (int k = 0; k < kH; ++k) {
            gw[k] += d * trace.h2[k];
            dh2[k] += d * w[k];
        }
    }
    std::array<double, kH> dh1{};
    for (int k = 0; k < kH; ++k) {
        // Rectifier subgradient: zero at and below the kink.
        const double dz = trace.h2[k] > 0.0 ? dh2[k] : 0.0;
        if (dz == 0.0) continue;
        g[kOffB2 + k] += dz;
        double* gw = g + kOffW2 + k * kH;
        const double* w = p + kOffW2 + k * kH;
        for (int j = 0; j < kH; ++j) {
            gw[j] += dz * trace.h1[j];
            dh1[j] += dz * w[j];
        }
    }
    for (int j = 0; j < kH; ++j) {
        const double dz = trace.h1[j] > 0.0 ? dh1[j] : 0.0;
        if (dz == 0.0) continue;
        g[kOffB1 + j] += dz;
        double* gw = g + kOffW1 + j * kIn;
        for (int i = 0; i < kIn; ++i) gw[i] += dz * trace.x[i];
    }
}

void ValueNetwork::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os.write(kSnapshotMagic, 4);
    const std::uint32_t version = kSnapshotVersion;
    os.write(reinterpret_cast<const char*>(&version), 4);
    const std::uint32_t shape[4] = {kIn, kH, kH, kOut};
    os.write(reinterpret_cast<const char*>(shape), sizeof(shape));
    const std::uint64_t count = params_.size();
    os.write(reinterpret_cast<const char*>(&count), 8);
    os.write(reinterpret_cast<const char*>(params_.data()),
             static_cast<std::streamsize>(count * sizeof(double)));
    if (!os) throw std::runtime_error("short write to " + path);
}

ValueNetwork ValueNetwork::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    char magic[4];
    std::uint32_t version = 0;
    std::uint32_t shape[4] = {0, 0, 0, 0};
    std::uint64_t count = 0;
    is.read(magic, 4);
    is.read(reinterpret_cast<char*>(&version), 4);
    is.read(reinterpret_cast<char*>(shape), sizeof(shape));
    is.read(reinterpret_cast<char*>(&count), 8);
    if (!is || std::memcmp(magic, kSnapshotMagic, 4) != 0) {
        throw std::runtime_error(path + ": not a network snapshot");
    }
    if (version != kSnapshotVersion) {
        throw std::runtime_error(path + ": unsupported snapshot version");
    }
    if (shape[0] != kIn || shape[1] != kH || shape[2] != kH || shape[3] != kOut ||
        count != ValueNetwork::kParamCount) {
        throw std::runtime_error(path + ": layer shapes do not match this build");
    }
    ValueNetwork net;
    is.read(reinterpret_cast<char*>(net.params_.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
    if (!is) throw std::runtime_error(path + ": truncated snapshot");
    return net;
}

void AdamOptimizer::step(std::vector<double>& params, const std::vector<double>& grad) {
    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kEps = 1e-8;
    ++t_;
    const double corr1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double corr2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grad[i];
        m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * g;
        v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * g * g;
        const double m_hat = m_[i] / corr1;
        const double v_hat = v_[i] / corr2;
        params[i] -= lr_ * m_hat / (std::sqrt(v_hat) + kEps);
    }
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
    items_.reserve(capacity);
}

void ReplayBuffer::push(const Transition& t) {
    if (items_.size() < capacity_) {
        items_.push_back(t);
    } else {
        items_[next_] = t;
        next_ = (next_ + 1) % capacity_;
    }
}

const Transition& ReplayBuffer::nth_oldest(std::size_t i) const {
    if (i >= items_.size()) throw std::out_of_range("replay index past fill");
    if (items_.size() < capacity_) return items_[i];
    return items_[(next_ + i) % capacity_];
}

const Transition& ReplayBuffer::sample(Rng& rng) const {
    if (items_.empty()) throw std::logic_error("sampling an empty replay buffer");
    return items_[rng.uniform_index(items_.size())];
}

void validate(const DqnConfig& cfg) {
    if (cfg.total_steps < 0) throw std::invalid_argument("total_steps must be >= 0");
    if (cfg.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (cfg.learning_rate <= 0.0) throw std::invalid_argument("learning_rate must be > 0");
    if (cfg.gamma < 0.0 || cfg.gamma > 1.0) throw std::invalid_argument("gamma must be in [0,1]");
    if (cfg.buffer_capacity < static_cast<std::size_t>(cfg.batch_size)) {
        throw std::invalid_argument("buffer_capacity must be >= batch_size");
    }
    if (cfg.learning_starts < cfg.batch_size) {
        throw std::invalid_argument("learning_starts must be >= batch_size");
    }
    if (cfg.train_freq < 1) throw std::invalid_argument("train_freq must be >= 1");
    if (cfg.target_sync_interval < 1) {
        throw std::invalid_argument("target_sync_interval must be >= 1");
    }
    for (double e : {cfg.epsilon_initial, cfg.epsilon_final}) {
        if (e < 0.0 || e > 1.0) throw std::invalid_argument("epsilon must be in [0,1]");
    }
    if (cfg.exploration_fraction < 0.0 || cfg.exploration_fraction > 1.0) {
        throw std::invalid_argument("exploration_fraction must be in [0,1]");
    }
}

double epsilon_at(long step, const DqnConfig& cfg) {
    const double horizon = cfg.exploration_fraction * static_cast<double>(cfg.total_steps);
    if (horizon <= 0.0) return cfg.epsilon_final;
    const double f = std::min(1.0, static_cast<double>(step) / horizon);
    return cfg.epsilon_initial + f * (cfg.epsilon_final - cfg.epsilon_initial);
}

double learn_step(ValueNetwork& net, const ValueNetwork& target_net, const ReplayBuffer& buffer,
                  const DqnConfig& cfg, AdamOptimizer& opt, Rng& rng, LearnScratch& scratch) {
    scratch.grad.assign(ValueNetwork::kParamCount, 0.0);
    double loss = 0.0;
    QValues dy{};
    for (int b = 0; b < cfg.batch_size; ++b) {
        const Transition& tr = buffer.sample(rng);
        double y = tr.reward;
        if (!tr.terminal) {
            const QValues qn = target_net.predict(decode_compact(tr.next_state));
            y += cfg.gamma * *std::max_element(qn.begin(), qn.end());
        }
        net.forward(decode_compact(tr.state), scratch.trace);
        const double diff = scratch.trace.y[tr.action] - y;
        loss += diff * diff;
        dy[tr.action] = 2.0 * diff / cfg.batch_size;
        net.backward(scratch.trace, dy, scratch.grad);
        dy[tr.action] = 0.0;
    }
    loss /= cfg.batch_size;
    if (!std::isfinite(loss)) {
        std::ostringstream msg;
        msg << "training diverged: batch loss is " << loss << " after sampling " << cfg.batch_size
            << " transitions from a buffer of " << buffer.size();
        throw std::runtime_error(msg.str());
    }
    opt.step(net.params(), scratch.grad);
    return loss;
}

DqnTrainResult dqn_train(Environment& env, const DqnConfig& cfg, std::uint64_t policy_seed) {
    validate(cfg);
    DqnTrainResult out;
    out.seed = policy_seed;
    Rng rng(splitmix64(policy_seed ^ 0xd90f11ull));
    out.net.init(rng);
    ValueNetwork target = out.net;
    AdamOptimizer opt(ValueNetwork::kParamCount, cfg.learning_rate);
    ReplayBuffer buffer(cfg.buffer_capacity);
    LearnScratch scratch;
    std::unordered_set<std::string> seen;

    env.reset();
    seen.insert(env.state().canonical_key());
    StateCode state = encode_compact(env.state());
    double ep_return = 0.0;
    double discount = 1.0;
    std::int32_t ep_steps = 0;

    for (long t = 0; t < cfg.total_steps; ++t) {
        int a;
        if (rng.uniform_real() < epsilon_at(t, cfg)) {
            a = rng.uniform_int(0, kNumActions - 1);
        } else {
            a = argmax_action(out.net.predict(decode_compact(state)), rng);
        }
        const StepResult r = env.step(a);
        Transition tr;
        tr.state = state;
        tr.next_state = encode_compact(r.state_after);
        tr.action = static_cast<std::int8_t>(a);
        tr.reward = static_cast<float>(r.reward);
        tr.terminal = r.done;
        buffer.push(tr);
        seen.insert(r.state_after.canonical_key());
        ep_return += discount * r.reward;
        discount *= cfg.gamma;
        ++ep_steps;
        state = tr.next_state;

        const long step_no = t + 1;
        if (step_no >= cfg.learning_starts && step_no % cfg.train_freq == 0 &&
            buffer.size() >= static_cast<std::size_t>(cfg.batch_size)) {
            learn_step(out.net, target, buffer, cfg, opt, rng, scratch);
            ++out.updates;
        }
        if (step_no % cfg.target_sync_interval == 0) {
            target.params() = out.net.params();
        }
        if (r.done) {
            out.steps.push_back(ep_steps);
            out.returns.push_back(ep_return);
            out.distinct_states.push_back(static_cast<std::int64_t>(seen.size()));
            env.reset();
            seen.insert(env.state().canonical_key());
            state = encode_compact(env.state());
            ep_return = 0.0;
            discount = 1.0;
            ep_steps = 0;
        }
    }
    return out;
}

std::vector<int> dqn_test(const ValueNetwork& net, Environment& env, long episodes,
                          std::uint64_t policy_seed) {
    std::vector<int> steps;
    steps.reserve(episodes);
    Rng rng(splitmix64(policy_seed ^ 0x7e57d9full));
    for (long ep = 0; ep < episodes; ++ep) {
        env.reset();
        int n = 0;
        while (!env.done()) {
            const int a = argmax_action(net.predict(encode(env.state())), rng);
            env.step(a);
            ++n;
        }
        steps.push_back(n);
    }
    return steps;
}

}  // namespace sqlrl
