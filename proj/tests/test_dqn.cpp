#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "sqlrl/dqn_agent.hpp"

using namespace sqlrl;

namespace {

std::string temp_path(const char* stem) {
    return (std::filesystem::temp_directory_path() /
            (std::string(stem) + "." + std::to_string(::getpid()) + ".bin"))
        .string();
}

StateVector random_state(Rng& rng) {
    StateVector x{};
    for (double& v : x) v = static_cast<double>(rng.uniform_int(-1, 1));
    return x;
}

Transition make_transition(double reward, bool terminal, int action = 0) {
    Transition t;
    t.state.fill(0);
    t.next_state.fill(0);
    t.next_state[0] = 1;
    t.action = static_cast<std::int8_t>(action);
    t.reward = static_cast<float>(reward);
    t.terminal = terminal;
    return t;
}

}  // namespace

TEST_CASE("encode maps the worked history example") {
    HistoryState h;
    CHECK(encode(h) == StateVector{});  // empty history -> zero vector

    h.record(8, Response::Positive);
    h.record(16, Response::Negative);
    h.record(21, Response::Positive);
    const StateVector v = encode(h);
    for (int i = 0; i < kNumActions; ++i) {
        if (i == 8 || i == 21) CHECK(v[i] == 1.0);
        else if (i == 16) CHECK(v[i] == -1.0);
        else CHECK(v[i] == 0.0);
    }
}

TEST_CASE("compact encoding round-trips") {
    Rng rng(1);
    for (int trial = 0; trial < 50; ++trial) {
        HistoryState h;
        for (int k = 0; k < 10; ++k) {
            h.record(rng.uniform_int(0, kNumActions - 1),
                     rng.bernoulli(0.5) ? Response::Positive : Response::Negative);
        }
        CHECK(decode_compact(encode_compact(h)) == encode(h));
    }
}

TEST_CASE("distinct histories encode to distinct vectors") {
    HistoryState a, b;
    a.record(3, Response::Positive);
    b.record(3, Response::Negative);
    CHECK(encode(a) != encode(b));
    HistoryState c;
    c.record(4, Response::Positive);
    CHECK(encode(a) != encode(c));
}

TEST_CASE("argmax_action picks the maximum and splits ties evenly") {
    Rng rng(2);
    QValues q{};
    q[13] = 2.0;
    for (int i = 0; i < 50; ++i) CHECK(argmax_action(q, rng) == 13);

    QValues tie{};
    tie[4] = 1.0;
    tie[44] = 1.0;
    int low = 0;
    const int n = 1000;
    for (int i = 0; i < n; ++i) {
        const int a = argmax_action(tie, rng);
        REQUIRE((a == 4 || a == 44));
        if (a == 4) ++low;
    }
    CHECK(low > 400);  // ~6 sigma band around 500
    CHECK(low < 600);
}

TEST_CASE("a zero network predicts zero everywhere") {
    const ValueNetwork net;
    Rng rng(3);
    for (int i = 0; i < 10; ++i) {
        for (double v : net.predict(random_state(rng))) CHECK(v == 0.0);
    }
}

TEST_CASE("parameter count is fixed by the architecture") {
    CHECK(ValueNetwork::kParamCount ==
          64 * 51 + 64 + 64 * 64 + 64 + 51 * 64 + 51);
    ValueNetwork net;
    CHECK(net.params().size() == static_cast<std::size_t>(ValueNetwork::kParamCount));
}

TEST_CASE("forward is bitwise deterministic") {
    Rng rng(4);
    ValueNetwork net;
    net.init(rng);
    const StateVector x = random_state(rng);
    const QValues a = net.predict(x);
    const QValues b = net.predict(x);
    CHECK(std::memcmp(a.data(), b.data(), sizeof a) == 0);
}

TEST_CASE("analytic gradients match central finite differences") {
    Rng rng(5);
    ValueNetwork net;
    net.init(rng);
    const StateVector x = random_state(rng);
    const int action = 7;
    const double y = 3.0;

    // Scalar loss L = (net(x)[action] - y)^2.
    auto loss_at = [&]() {
        const double d = net.predict(x)[action] - y;
        return d * d;
    };

    ValueNetwork::Trace trace;
    net.forward(x, trace);
    QValues dy{};
    dy[action] = 2.0 * (trace.y[action] - y);
    std::vector<double> grad(ValueNetwork::kParamCount, 0.0);
    net.backward(trace, dy, grad);

    const double step = 1e-5;
    int checked = 0;
    for (int k = 0; k < 100; ++k) {
        const std::size_t i = rng.uniform_index(grad.size());
        const double saved = net.params()[i];
        net.params()[i] = saved + step;
        const double hi = loss_at();
        net.params()[i] = saved - step;
        const double lo = loss_at();
        net.params()[i] = saved;
        const double numeric = (hi - lo) / (2.0 * step);
        // Skip dead or near-dead coordinates: below ~1e-6 the central
        // difference is dominated by cancellation noise, not by the model.
        if (std::abs(numeric) < 1e-6 && std::abs(grad[i]) < 1e-6) continue;
        const double rel =
            std::abs(grad[i] - numeric) / std::max(1e-6, std::abs(grad[i]) + std::abs(numeric));
        REQUIRE(rel <= 1e-4);
        ++checked;
    }
    CHECK(checked > 20);  // enough live coordinates actually exercised
}

TEST_CASE("learn_step on trivial batches reproduces the worked losses") {
    DqnConfig cfg;
    cfg.batch_size = 32;
    cfg.buffer_capacity = 64;
    cfg.learning_starts = 32;

    // Terminal flag transitions, all-zero networks: y = +10, prediction 0.
    {
        ValueNetwork net, target;
        AdamOptimizer opt(ValueNetwork::kParamCount, cfg.learning_rate);
        ReplayBuffer buffer(cfg.buffer_capacity);
        for (int i = 0; i < 40; ++i) buffer.push(make_transition(10.0, true));
        Rng rng(6);
        LearnScratch scratch;
        const double loss = learn_step(net, target, buffer, cfg, opt, rng, scratch);
        CHECK(loss == doctest::Approx(100.0));
        // The optimizer moved the online network but not the target.
        CHECK(net.params() != std::vector<double>(ValueNetwork::kParamCount, 0.0));
        CHECK(target.params() == std::vector<double>(ValueNetwork::kParamCount, 0.0));
    }

    // Non-terminal -1 transitions, zero networks: y = -1 + gamma * 0 = -1.
    {
        ValueNetwork net, target;
        AdamOptimizer opt(ValueNetwork::kParamCount, cfg.learning_rate);
        ReplayBuffer buffer(cfg.buffer_capacity);
        for (int i = 0; i < 40; ++i) buffer.push(make_transition(-1.0, false));
        Rng rng(7);
        LearnScratch scratch;
        CHECK(learn_step(net, target, buffer, cfg, opt, rng, scratch) == doctest::Approx(1.0));
    }
}

TEST_CASE("loss strictly decreases over 100 updates on a fixed batch") {
    // A buffer holding one repeated transition makes every sampled batch
    // identical; with the default learning rate a fresh network descends
    // monotonically long before it can overshoot.
    DqnConfig cfg;
    cfg.batch_size = 32;
    cfg.buffer_capacity = 32;
    cfg.learning_starts = 32;

    ValueNetwork net;
    Rng init_rng(8);
    net.init(init_rng);
    const ValueNetwork target = net;
    AdamOptimizer opt(ValueNetwork::kParamCount, cfg.learning_rate);
    ReplayBuffer buffer(cfg.buffer_capacity);
    for (int i = 0; i < 32; ++i) buffer.push(make_transition(10.0, true, 5));

    Rng rng(9);
    LearnScratch scratch;
    double prev = learn_step(net, target, buffer, cfg, opt, rng, scratch);
    for (int i = 0; i < 99; ++i) {
        const double loss = learn_step(net, target, buffer, cfg, opt, rng, scratch);
        REQUIRE(loss < prev);
        prev = loss;
    }
}

TEST_CASE("replay buffer evicts strictly oldest-first") {
    ReplayBuffer buffer(4);
    for (int i = 0; i < 10; ++i) buffer.push(make_transition(i, false));
    REQUIRE(buffer.size() == 4);
    CHECK(buffer.capacity() == 4);
    for (int i = 0; i < 4; ++i) {
        CHECK(buffer.nth_oldest(i).reward == doctest::Approx(6.0 + i));
    }

    ReplayBuffer partial(4);
    partial.push(make_transition(0, false));
    partial.push(make_transition(1, false));
    CHECK(partial.size() == 2);
    CHECK(partial.nth_oldest(0).reward == doctest::Approx(0.0));
    CHECK(partial.nth_oldest(1).reward == doctest::Approx(1.0));
}

TEST_CASE("replay sampling is uniform over a full buffer") {
    ReplayBuffer buffer(10);
    for (int i = 0; i < 10; ++i) buffer.push(make_transition(i, false));
    Rng rng(10);
    std::array<int, 10> counts{};
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        ++counts[static_cast<int>(buffer.sample(rng).reward)];
    }
    for (int c : counts) {
        // Within 3% of the uniform 1/10 (that is ~4.5 sigma at this n).
        CHECK(std::abs(c / double(n) - 0.1) < 0.003);
    }
}

TEST_CASE("sampling a wrapped buffer only sees live entries") {
    ReplayBuffer buffer(4);
    for (int i = 0; i < 15; ++i) buffer.push(make_transition(i, false));
    Rng rng(11);
    std::set<int> seen;
    for (int i = 0; i < 400; ++i) seen.insert(static_cast<int>(buffer.sample(rng).reward));
    CHECK(seen == std::set<int>{11, 12, 13, 14});
}

TEST_CASE("epsilon schedule anneals linearly then holds") {
    DqnConfig cfg;  // 1e6 steps, 1.0 -> 0.05 over the first 10%
    CHECK(epsilon_at(0, cfg) == doctest::Approx(1.0));
    CHECK(epsilon_at(50'000, cfg) == doctest::Approx(0.525));
    CHECK(epsilon_at(100'000, cfg) == doctest::Approx(0.05));
    CHECK(epsilon_at(999'999, cfg) == doctest::Approx(0.05));
    double prev = 2.0;
    for (long s = 0; s <= 200'000; s += 10'000) {
        const double e = epsilon_at(s, cfg);
        CHECK(e <= prev);
        prev = e;
    }
}

TEST_CASE("config validation rejects unusable settings") {
    auto bad = [](auto mutate) {
        DqnConfig cfg;
        mutate(cfg);
        CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    };
    bad([](DqnConfig& c) { c.total_steps = -1; });
    bad([](DqnConfig& c) { c.batch_size = 0; });
    bad([](DqnConfig& c) { c.learning_rate = 0.0; });
    bad([](DqnConfig& c) { c.gamma = 1.5; });
    bad([](DqnConfig& c) { c.buffer_capacity = 8; });
    bad([](DqnConfig& c) { c.learning_starts = 8; });
    bad([](DqnConfig& c) { c.train_freq = 0; });
    bad([](DqnConfig& c) { c.target_sync_interval = 0; });
    bad([](DqnConfig& c) { c.epsilon_initial = 1.2; });
    bad([](DqnConfig& c) { c.exploration_fraction = -0.1; });

    DqnConfig ok;
    CHECK_NOTHROW(validate(ok));
    ok.total_steps = 0;  // explicitly allowed: returns an untrained agent
    CHECK_NOTHROW(validate(ok));
}

TEST_CASE("zero training steps yield an untrained agent and no metrics") {
    DqnConfig cfg;
    cfg.total_steps = 0;
    Environment env({1000, 12});
    const DqnTrainResult result = dqn_train(env, cfg, 42);
    CHECK(result.steps.empty());
    CHECK(result.returns.empty());
    CHECK(result.updates == 0);
    for (double v : result.net.predict(StateVector{})) CHECK(std::isfinite(v));
}

TEST_CASE("short training run: shapes, budgets and finiteness") {
    DqnConfig cfg;
    cfg.total_steps = 3000;
    cfg.batch_size = 32;
    cfg.buffer_capacity = 2000;
    cfg.learning_starts = 300;
    cfg.target_sync_interval = 250;
    cfg.learning_rate = 1e-3;
    cfg.exploration_fraction = 0.5;
    Environment env({1000, 13});
    const DqnTrainResult result = dqn_train(env, cfg, 7);

    REQUIRE(!result.steps.empty());
    CHECK(result.returns.size() == result.steps.size());
    CHECK(result.distinct_states.size() == result.steps.size());
    CHECK(result.seed == 7);
    CHECK(result.updates > 500);
    CHECK(result.updates < 800);
    CHECK(std::accumulate(result.steps.begin(), result.steps.end(), 0L) <= cfg.total_steps);
    for (std::size_t i = 1; i < result.distinct_states.size(); ++i) {
        CHECK(result.distinct_states[i] >= result.distinct_states[i - 1]);
    }
    for (double v : result.net.predict(StateVector{})) CHECK(std::isfinite(v));
}

TEST_CASE("training and testing are deterministic in their seeds") {
    DqnConfig cfg;
    cfg.total_steps = 1200;
    cfg.batch_size = 32;
    cfg.buffer_capacity = 1000;
    cfg.learning_starts = 200;
    cfg.target_sync_interval = 200;
    auto run = [&cfg]() {
        Environment env({1000, 14});
        return dqn_train(env, cfg, 5);
    };
    const DqnTrainResult a = run();
    const DqnTrainResult b = run();
    CHECK(a.steps == b.steps);
    CHECK(a.net.params() == b.net.params());
}

TEST_CASE("greedy test episodes are bounded and reproducible") {
    DqnConfig cfg;
    cfg.total_steps = 1200;
    cfg.batch_size = 32;
    cfg.buffer_capacity = 1000;
    cfg.learning_starts = 200;
    cfg.target_sync_interval = 200;
    Environment env({1000, 15});
    const DqnTrainResult trained = dqn_train(env, cfg, 5);

    Environment t1({1000, 16});
    Environment t2({1000, 16});
    const std::vector<int> s1 = dqn_test(trained.net, t1, 5, 8);
    const std::vector<int> s2 = dqn_test(trained.net, t2, 5, 8);
    REQUIRE(s1.size() == 5);
    CHECK(s1 == s2);
    for (int s : s1) {
        CHECK(s >= 1);
        CHECK(s <= 1000);
    }
}

TEST_CASE("network snapshot round-trips bitwise") {
    Rng rng(17);
    ValueNetwork net;
    net.init(rng);
    const std::string path = temp_path("valuenet_roundtrip");
    net.save(path);
    const ValueNetwork loaded = ValueNetwork::load(path);
    std::filesystem::remove(path);
    CHECK(loaded.params() == net.params());
}

TEST_CASE("snapshot load rejects garbage") {
    const std::string path = temp_path("valuenet_garbage");
    {
        std::FILE* f = std::fopen(path.c_str(), "wb");
        REQUIRE(f != nullptr);
        std::fputs("junk", f);
        std::fclose(f);
    }
    CHECK_THROWS_AS(ValueNetwork::load(path), std::runtime_error);
    std::filesystem::remove(path);
}

TEST_CASE("model size does not grow with training length") {
    DqnConfig small;
    small.total_steps = 300;
    small.batch_size = 32;
    small.buffer_capacity = 200;
    small.learning_starts = 100;
    DqnConfig larger = small;
    larger.total_steps = 1500;

    Environment e1({1000, 18});
    Environment e2({1000, 19});
    const DqnTrainResult a = dqn_train(e1, small, 3);
    const DqnTrainResult b = dqn_train(e2, larger, 3);
    CHECK(a.net.params().size() == b.net.params().size());
    CHECK(a.net.params().size() == static_cast<std::size_t>(ValueNetwork::kParamCount));
}
