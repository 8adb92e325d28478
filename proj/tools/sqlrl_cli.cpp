// Command-line front end: instance generation, cohort training and testing,
// baselines, the exact optimal-policy value, metric statistics, plot
// emission, and named end-to-end experiment reproduction.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime error,
// 3 failed `repro --check`.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sqlrl/dqn_agent.hpp"
#include "sqlrl/environment.hpp"
#include "sqlrl/envgen.hpp"
#include "sqlrl/harness/baselines.hpp"
#include "sqlrl/harness/cohort.hpp"
#include "sqlrl/harness/config.hpp"
#include "sqlrl/harness/experiments.hpp"
#include "sqlrl/harness/metrics_io.hpp"
#include "sqlrl/harness/optimal.hpp"
#include "sqlrl/harness/plots.hpp"
#include "sqlrl/harness/stats.hpp"
#include "sqlrl/qtable_agent.hpp"
#include "sqlrl/sqlmini.hpp"

namespace {

using namespace sqlrl;
namespace fs = std::filesystem;
using nlohmann::json;

json stats_json(const SummaryStats& s) {
    return json{{"mean", s.mean}, {"median", s.median}, {"stddev", s.stddev}, {"q1", s.q1},
                {"q3", s.q3},     {"notch", s.notch},   {"min", s.min},       {"max", s.max},
                {"n", s.n}};
}

// "+9|-17|+22" -> canonical history key (signed 1-based indices, one byte
// each, ascending by action).
std::string parse_row_key(const std::string& spec) {
    std::vector<int> entries;
    std::size_t begin = 0;
    while (begin <= spec.size()) {
        const std::size_t bar = spec.find('|', begin);
        const std::string tok =
            spec.substr(begin, bar == std::string::npos ? std::string::npos : bar - begin);
        if (tok.empty()) throw ConfigError("empty entry in row spec '" + spec + "'");
        const int v = std::stoi(tok);
        const int idx = std::abs(v);
        if (idx < 1 || idx > kNumActions) {
            throw ConfigError("row entry " + tok + " outside +-1..51");
        }
        entries.push_back(v);
        if (bar == std::string::npos) break;
        begin = bar + 1;
    }
    std::sort(entries.begin(), entries.end(),
              [](int a, int b) { return std::abs(a) < std::abs(b); });
    for (std::size_t i = 1; i < entries.size(); ++i) {
        if (std::abs(entries[i]) == std::abs(entries[i - 1])) {
            throw ConfigError("duplicate action in row spec '" + spec + "'");
        }
    }
    std::string key;
    for (int v : entries) key.push_back(static_cast<char>(v));
    return key;
}

std::vector<std::vector<int>> per_agent_from_test_rows(const std::vector<TestRow>& rows) {
    std::vector<std::vector<int>> out;
    for (const TestRow& r : rows) {
        if (r.agent_id < 0) throw std::runtime_error("negative agent_id in test file");
        if (static_cast<std::size_t>(r.agent_id) >= out.size()) out.resize(r.agent_id + 1);
        out[r.agent_id].push_back(r.steps);
    }
    return out;
}

std::vector<int> pool(const std::vector<std::vector<int>>& per_agent) {
    std::vector<int> all;
    for (const auto& v : per_agent) all.insert(all.end(), v.begin(), v.end());
    return all;
}

void emit_cohort_plots(const ExperimentConfig& cfg, const CohortResult& result, bool quiet) {
    std::vector<std::vector<TrainRow>> train;
    train.reserve(result.agents.size());
    for (const AgentOutcome& a : result.agents) train.push_back(read_train_csv(a.train_file));
    const long episodes = train.front().empty() ? 0 : train.front().back().episode;
    const fs::path dir(cfg.out_dir);
    if (episodes >= 10) {
        plot_state_growth((dir / (cfg.name + "_state_growth.svg")).string(), train,
                          std::max(1L, episodes / 5), episodes);
        const std::size_t window = std::max<long>(1, std::min<long>(1000, episodes / 20));
        plot_steps_curve((dir / (cfg.name + "_steps_curve.svg")).string(), train, window);
    }
    std::vector<std::vector<int>> per_agent;
    per_agent.reserve(result.agents.size());
    for (const AgentOutcome& a : result.agents) per_agent.push_back(a.test_steps);
    if (!per_agent.empty() && !per_agent.front().empty()) {
        plot_test_notches((dir / (cfg.name + "_test_notches.svg")).string(), per_agent);
        plot_step_distribution((dir / (cfg.name + "_step_distribution.svg")).string(),
                               pool(per_agent));
    }
    if (!quiet) std::fprintf(stderr, "[%s] plots written to %s\n", cfg.name.c_str(), dir.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SQL-injection capture-the-flag laboratory: environment, agents, experiments"};
    app.require_subcommand(0, 1);

    std::string config_path;
    std::uint64_t base_seed = 1;
    std::string out_override;
    bool quiet = false;
    int jobs = 1;
    bool print_defaults = false;
    app.add_option("--config", config_path, "experiment config file (JSON)");
    auto* seed_opt = app.add_option("--seed", base_seed, "base seed (default 1)");
    app.add_option("--out", out_override, "output directory override");
    app.add_flag("--quiet", quiet, "suppress progress output");
    app.add_option("--jobs", jobs, "cohort worker threads")->check(CLI::Range(1, 64));
    app.add_flag("--print-defaults", print_defaults, "print the default config and exit");

    auto* gen = app.add_subcommand("gen", "generate hidden environment instances");
    long gen_count = 1;
    bool gen_render = false;
    std::string gen_file;
    gen->add_option("--count", gen_count, "instances to generate")->check(CLI::PositiveNumber);
    gen->add_flag("--render", gen_render, "also print the rendered query template");
    gen->add_option("--file", gen_file, "write JSON lines here instead of stdout");

    auto* train = app.add_subcommand("train", "train a cohort from --config");

    auto* test = app.add_subcommand("test", "greedy-test a saved agent snapshot");
    std::string test_qtable;
    std::string test_net;
    long test_episodes = 100;
    std::string test_file;
    test->add_option("--qtable", test_qtable, "Q-table snapshot to evaluate");
    test->add_option("--net", test_net, "value-network snapshot to evaluate");
    test->add_option("--episodes", test_episodes, "test episodes")->check(CLI::PositiveNumber);
    test->add_option("--file", test_file, "also write a test CSV here");

    auto* baseline = app.add_subcommand("baseline", "blind-guessing reference agents");
    std::string baseline_kind = "without";
    long baseline_episodes = 100'000;
    baseline->add_option("--kind", baseline_kind, "with | without (replacement)")
        ->check(CLI::IsMember({"with", "without"}));
    baseline->add_option("--episodes", baseline_episodes, "episodes")
        ->check(CLI::PositiveNumber);

    auto* optimal = app.add_subcommand("optimal", "exact optimal expected steps to flag");

    auto* stats = app.add_subcommand("stats", "summarize metric files");
    std::vector<std::string> stats_train;
    std::string stats_test;
    stats->add_option("--train", stats_train, "training metric files");
    stats->add_option("--test", stats_test, "pooled test metric file");

    auto* plot = app.add_subcommand("plot", "emit vector-graphics plots from metric files");
    std::vector<std::string> plot_train;
    std::string plot_test;
    std::vector<std::string> plot_compare;
    std::vector<std::string> plot_labels = {"left", "right"};
    std::string plot_qtable;
    std::vector<std::string> plot_rows;
    std::string plot_dir = ".";
    std::size_t plot_window = 1000;
    long plot_fit_lo = 0;
    long plot_fit_hi = 0;
    plot->add_option("--train", plot_train, "training metric files (state growth + steps curve)");
    plot->add_option("--test", plot_test, "test metric file (notches + distribution)");
    plot->add_option("--compare", plot_compare, "two test metric files for a comparison chart")
        ->expected(2);
    plot->add_option("--labels", plot_labels, "labels for --compare")->expected(2);
    plot->add_option("--qtable", plot_qtable, "Q-table snapshot for row charts");
    plot->add_option("--row", plot_rows, "history row spec like '+9' or '+9|-17' (repeatable)");
    plot->add_option("--dir", plot_dir, "output directory for the plots");
    plot->add_option("--window", plot_window, "smoothing window")->check(CLI::PositiveNumber);
    plot->add_option("--fit-lo", plot_fit_lo, "regression window start (default last 80%)");
    plot->add_option("--fit-hi", plot_fit_hi, "regression window end (default last episode)");

    auto* repro = app.add_subcommand("repro", "run a named experiment end to end");
    std::string repro_name;
    bool repro_list = false;
    bool repro_check = false;
    repro->add_option("name", repro_name, "experiment name");
    repro->add_flag("--list", repro_list, "list experiment names and exit");
    repro->add_flag("--check", repro_check, "verify the experiment's pass condition (exit 3 on failure)");

    auto* inspect = app.add_subcommand("inspect", "dissect one action against one instance");
    std::uint64_t inspect_instance = 1;
    int inspect_action = -1;
    inspect->add_option("--instance-seed", inspect_instance, "instance seed");
    inspect->add_option("--action", inspect_action, "action index 0..50 (omit for instance only)")
        ->check(CLI::Range(0, kNumActions - 1));

    CLI11_PARSE(app, argc, argv);

    try {
        if (print_defaults) {
            std::fputs(to_json_text(ExperimentConfig{}).c_str(), stdout);
            return 0;
        }

        if (gen->parsed()) {
            FILE* out = stdout;
            if (!gen_file.empty()) {
                out = std::fopen(gen_file.c_str(), "w");
                if (!out) throw std::runtime_error("cannot open " + gen_file + " for writing");
            }
            for (long i = 0; i < gen_count; ++i) {
                const EnvInstance inst = generate_instance(base_seed + static_cast<std::uint64_t>(i));
                std::fprintf(out, "%s\n", instance_to_json(inst).c_str());
                if (gen_render) {
                    std::fprintf(out, "# %s\n", render_template(inst.query).c_str());
                }
            }
            if (out != stdout) std::fclose(out);
            return 0;
        }

        if (train->parsed()) {
            if (config_path.empty()) throw ConfigError("train requires --config <file>");
            ExperimentConfig cfg = load_config(config_path);
            if (seed_opt->count() > 0) {
                cfg.base_seed = base_seed;
                cfg.seeds.clear();
            }
            if (!out_override.empty()) cfg.out_dir = out_override;
            const CohortResult result = run_cohort(cfg, jobs, quiet);
            json j{{"experiment", cfg.name},
                   {"test_file", result.test_file},
                   {"summary_file", result.summary_file},
                   {"aggregate_test", stats_json(result.aggregate_test)}};
            std::printf("%s\n", j.dump(2).c_str());
            return 0;
        }

        if (test->parsed()) {
            if (test_qtable.empty() == test_net.empty()) {
                throw ConfigError("test needs exactly one of --qtable or --net");
            }
            Environment env({1000, base_seed});
            std::vector<int> steps;
            if (!test_qtable.empty()) {
                QTable table = QTable::load(test_qtable);
                steps = qtable_test(table, env, test_episodes, Hyperparams{}, base_seed);
            } else {
                const ValueNetwork net = ValueNetwork::load(test_net);
                steps = dqn_test(net, env, test_episodes, base_seed);
            }
            if (!test_file.empty()) write_test_csv(test_file, {steps});
            std::printf("%s\n", stats_json(summarize(steps)).dump(2).c_str());
            return 0;
        }

        if (baseline->parsed()) {
            const BaselineKind kind = baseline_kind == "with" ? BaselineKind::WithReplacement
                                                              : BaselineKind::WithoutReplacement;
            const std::vector<int> steps = random_baseline(kind, baseline_episodes, base_seed);
            json j = stats_json(summarize(steps));
            j["kind"] = baseline_kind == "with" ? "with_replacement" : "without_replacement";
            std::printf("%s\n", j.dump(2).c_str());
            return 0;
        }

        if (optimal->parsed()) {
            const double v = optimal_expected_steps();
            if (quiet) {
                std::printf("%.12f\n", v);
            } else {
                std::printf("optimal expected steps to flag: %.12f\n", v);
            }
            return 0;
        }

        if (stats->parsed()) {
            if (stats_train.empty() && stats_test.empty()) {
                throw ConfigError("stats needs --train and/or --test files");
            }
            json j;
            for (const std::string& path : stats_train) {
                const std::vector<TrainRow> rows = read_train_csv(path);
                if (rows.empty()) throw std::runtime_error(path + ": no metric rows");
                std::vector<double> steps;
                steps.reserve(rows.size());
                for (const TrainRow& r : rows) steps.push_back(r.steps);
                json entry{{"episodes", rows.size()},
                           {"final_distinct_states", rows.back().distinct_states},
                           {"steps", stats_json(summarize(steps))}};
                j["train"].push_back(json{{path, entry}});
            }
            if (!stats_test.empty()) {
                const auto per_agent = per_agent_from_test_rows(read_test_csv(stats_test));
                json agents = json::array();
                for (std::size_t a = 0; a < per_agent.size(); ++a) {
                    if (per_agent[a].empty()) continue;
                    agents.push_back(json{{"agent_id", a},
                                          {"stats", stats_json(summarize(per_agent[a]))}});
                }
                j["test"] = json{{"per_agent", agents},
                                 {"aggregate", stats_json(summarize(pool(per_agent)))}};
            }
            std::printf("%s\n", j.dump(2).c_str());
            return 0;
        }

        if (plot->parsed()) {
            bool produced = false;
            const fs::path dir(plot_dir);
            fs::create_directories(dir);
            if (!plot_train.empty()) {
                std::vector<std::vector<TrainRow>> train;
                train.reserve(plot_train.size());
                for (const std::string& path : plot_train) train.push_back(read_train_csv(path));
                const long episodes = train.front().back().episode;
                const long lo = plot_fit_lo > 0 ? plot_fit_lo : std::max(1L, episodes / 5);
                const long hi = plot_fit_hi > 0 ? plot_fit_hi : episodes;
                plot_state_growth((dir / "state_growth.svg").string(), train, lo, hi);
                plot_steps_curve((dir / "steps_curve.svg").string(), train, plot_window);
                produced = true;
            }
            if (!plot_test.empty()) {
                const auto per_agent = per_agent_from_test_rows(read_test_csv(plot_test));
                plot_test_notches((dir / "test_notches.svg").string(), per_agent);
                plot_step_distribution((dir / "step_distribution.svg").string(), pool(per_agent));
                produced = true;
            }
            if (!plot_compare.empty()) {
                const auto left = per_agent_from_test_rows(read_test_csv(plot_compare[0]));
                const auto right = per_agent_from_test_rows(read_test_csv(plot_compare[1]));
                plot_comparison((dir / "comparison.svg").string(), pool(left), plot_labels[0],
                                pool(right), plot_labels[1]);
                produced = true;
            }
            if (!plot_qtable.empty()) {
                if (plot_rows.empty()) throw ConfigError("--qtable needs at least one --row");
                const QTable table = QTable::load(plot_qtable);
                std::vector<std::pair<std::string, QRow>> rows;
                for (const std::string& spec : plot_rows) {
                    const QRow* row = table.find(parse_row_key(spec));
                    if (!row) throw std::runtime_error("row '" + spec + "' not in the table");
                    rows.emplace_back(spec, *row);
                }
                plot_q_rows((dir / "q_rows.svg").string(), rows);
                produced = true;
            }
            if (!produced) throw ConfigError("plot needs --train, --test, --compare, or --qtable");
            return 0;
        }

        if (repro->parsed()) {
            if (repro_list) {
                for (const std::string& name : experiment_names()) {
                    std::printf("%s\n", name.c_str());
                }
                return 0;
            }
            if (repro_name.empty()) throw ConfigError("repro needs an experiment name (see --list)");
            ExperimentConfig cfg = experiment_config(repro_name);
            if (!out_override.empty()) cfg.out_dir = out_override;
            const CohortResult result = run_cohort(cfg, jobs, quiet);
            emit_cohort_plots(cfg, result, quiet);
            json j{{"experiment", cfg.name},
                   {"test_file", result.test_file},
                   {"summary_file", result.summary_file},
                   {"aggregate_test", stats_json(result.aggregate_test)}};
            std::printf("%s\n", j.dump(2).c_str());
            if (repro_check) {
                const CheckResult check = check_experiment(cfg, result);
                std::fputs(check.detail.c_str(), stdout);
                if (!check.pass) return 3;
            }
            return 0;
        }

        if (inspect->parsed()) {
            const EnvInstance inst = generate_instance(inspect_instance);
            std::printf("instance: %s\n", instance_to_json(inst).c_str());
            std::printf("template: %s\n", render_template(inst.query).c_str());
            if (inspect_action >= 0) {
                const Action& action = action_table()[inspect_action];
                std::printf("action %d: %s\n", inspect_action, action.payload.c_str());
                const std::string query =
                    sqlmini::compose(render_template(inst.query), action.payload);
                std::printf("composed: %s\n", query.c_str());
                const auto lexed = sqlmini::tokenize(query);
                if (const auto* tokens = std::get_if<std::vector<sqlmini::Token>>(&lexed)) {
                    std::printf("tokens:\n%s", sqlmini::dump_tokens(*tokens).c_str());
                    const auto parsed = sqlmini::parse(*tokens);
                    if (const auto* ast = std::get_if<sqlmini::Ast>(&parsed)) {
                        std::printf("ast:\n%s", sqlmini::dump_ast(*ast).c_str());
                    } else {
                        const auto& err = std::get<sqlmini::SyntaxError>(parsed);
                        std::printf("parse error at %zu: %s\n", err.position,
                                    err.message.c_str());
                    }
                } else {
                    std::printf("lex error at %zu\n",
                                std::get<sqlmini::LexError>(lexed).position);
                }
                const auto analysis = sqlmini::analyze(inst.query, action);
                std::printf("analysis: parse_ok=%d live=%d\n", analysis.parse_ok, analysis.live);
                std::printf("response: %s\n", to_string(classify(action, inst.query)));
            }
            return 0;
        }

        std::fputs(app.help().c_str(), stdout);
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
