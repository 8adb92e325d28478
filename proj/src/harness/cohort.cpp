#include "sqlrl/harness/cohort.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <thread>

#include "json.hpp"
#include "sqlrl/dqn_agent.hpp"
#include "sqlrl/environment.hpp"
#include "sqlrl/harness/metrics_io.hpp"
#include "sqlrl/qtable_agent.hpp"

namespace sqlrl {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string agent_path(const ExperimentConfig& cfg, int agent_id, const char* suffix) {
    return (fs::path(cfg.out_dir) / (cfg.name + "_agent" + std::to_string(agent_id) + suffix))
        .string();
}

// One agent end to end: train, dump metrics, greedy test, optional snapshot.
AgentOutcome run_agent(const ExperimentConfig& cfg, int agent_id, std::uint64_t seed) {
    AgentOutcome out;
    out.agent_id = agent_id;
    out.seed = seed;
    out.train_file = agent_path(cfg, agent_id, "_train.csv");
    const auto t0 = std::chrono::steady_clock::now();

    Environment env({cfg.max_episode_steps, seed});
    if (cfg.agent == AgentKind::Tabular) {
        QTrainResult res = qtable_train(env, cfg.train_episodes, cfg.tabular, seed);
        write_train_csv(out.train_file, agent_id, res.metrics.steps, res.metrics.returns,
                        res.metrics.distinct_states);
        // Snapshot the count before testing: greedy test keeps learning and
        // would otherwise grow the table past what the train curve reports.
        out.final_distinct_states = static_cast<long long>(res.table.size());
        // "Further" episodes: the test continues the same instance stream.
        out.test_steps = qtable_test(res.table, env, cfg.test_episodes, cfg.tabular, seed);
        out.episodes_trained = static_cast<long>(res.metrics.steps.size());
        if (cfg.save_snapshots) res.table.save(agent_path(cfg, agent_id, ".qtable"));
    } else {
        DqnTrainResult res = dqn_train(env, cfg.dqn, seed);
        write_train_csv(out.train_file, agent_id, res.steps, res.returns, res.distinct_states);
        out.test_steps = dqn_test(res.net, env, cfg.test_episodes, seed);
        out.final_distinct_states =
            res.distinct_states.empty() ? 0 : res.distinct_states.back();
        out.episodes_trained = static_cast<long>(res.steps.size());
        if (cfg.save_snapshots) res.net.save(agent_path(cfg, agent_id, ".net"));
    }
    if (!out.test_steps.empty()) out.test_stats = summarize(out.test_steps);
    out.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

json stats_to_json(const SummaryStats& s) {
    return json{{"mean", s.mean}, {"median", s.median}, {"stddev", s.stddev}, {"q1", s.q1},
                {"q3", s.q3},     {"notch", s.notch},   {"min", s.min},       {"max", s.max},
                {"n", s.n}};
}

void write_summary(const std::string& path, const ExperimentConfig& cfg,
                   const CohortResult& result) {
    json per_agent = json::array();
    for (const AgentOutcome& a : result.agents) {
        per_agent.push_back(json{{"agent_id", a.agent_id},
                                 {"seed", a.seed},
                                 {"train_file", a.train_file},
                                 {"episodes_trained", a.episodes_trained},
                                 {"final_distinct_states", a.final_distinct_states},
                                 {"test", stats_to_json(a.test_stats)}});
    }
    json j{{"experiment", cfg.name},
           {"agent", to_string(cfg.agent)},
           {"cohort", cfg.cohort},
           {"test_episodes", cfg.test_episodes},
           {"per_agent", per_agent},
           {"aggregate_test", stats_to_json(result.aggregate_test)}};
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << j.dump(2) << '\n';
    if (!os) throw std::runtime_error("short write to " + path);
}

}  // namespace

CohortResult run_cohort(const ExperimentConfig& cfg, int jobs, bool quiet) {
    cfg.validate();
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + cfg.out_dir + ": " +
                                     ec.message());

    const std::vector<std::uint64_t> seeds = cfg.effective_seeds();
    CohortResult result;
    result.agents.resize(cfg.cohort);

    jobs = std::clamp(jobs, 1, cfg.cohort);
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> failures(jobs);
    auto worker = [&](int worker_id) {
        try {
            while (true) {
                const int i = next.fetch_add(1);
                if (i >= cfg.cohort) return;
                result.agents[i] = run_agent(cfg, i, seeds[i]);
                if (!quiet) {
                    const AgentOutcome& a = result.agents[i];
                    char line[256];
                    std::snprintf(line, sizeof(line),
                                  "[%s] agent %d: %ld episodes in %.1fs, %lld states, "
                                  "test mean %.3f median %.1f max %.0f\n",
                                  cfg.name.c_str(), i, a.episodes_trained, a.train_seconds,
                                  a.final_distinct_states, a.test_stats.mean, a.test_stats.median,
                                  a.test_stats.max);
                    std::fputs(line, stderr);
                }
            }
        } catch (...) {
            failures[worker_id] = std::current_exception();
        }
    };
    if (jobs == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (int w = 0; w < jobs; ++w) pool.emplace_back(worker, w);
        for (auto& t : pool) t.join();
    }
    for (const auto& failure : failures) {
        if (failure) std::rethrow_exception(failure);
    }

    std::vector<std::vector<int>> per_agent_steps;
    std::vector<int> pooled;
    per_agent_steps.reserve(result.agents.size());
    for (const AgentOutcome& a : result.agents) {
        per_agent_steps.push_back(a.test_steps);
        pooled.insert(pooled.end(), a.test_steps.begin(), a.test_steps.end());
    }
    if (!pooled.empty()) result.aggregate_test = summarize(pooled);

    result.test_file = (fs::path(cfg.out_dir) / (cfg.name + "_test.csv")).string();
    write_test_csv(result.test_file, per_agent_steps);
    result.summary_file = (fs::path(cfg.out_dir) / (cfg.name + "_summary.json")).string();
    write_summary(result.summary_file, cfg, result);
    return result;
}

}  // namespace sqlrl
