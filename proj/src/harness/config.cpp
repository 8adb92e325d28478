#include "sqlrl/harness/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace sqlrl {

using nlohmann::json;

const char* to_string(AgentKind kind) {
    return kind == AgentKind::Tabular ? "tabular" : "dqn";
}

AgentKind agent_kind_from_string(const std::string& s) {
    if (s == "tabular") return AgentKind::Tabular;
    if (s == "dqn") return AgentKind::Dqn;
    throw ConfigError("unknown agent kind '" + s + "' (expected 'tabular' or 'dqn')");
}

std::vector<std::uint64_t> ExperimentConfig::effective_seeds() const {
    if (!seeds.empty()) return seeds;
    std::vector<std::uint64_t> out(cohort > 0 ? cohort : 0);
    for (int i = 0; i < cohort; ++i) out[i] = base_seed + static_cast<std::uint64_t>(i);
    return out;
}

void ExperimentConfig::validate() const {
    if (name.empty()) throw ConfigError("config error at name: must not be empty");
    if (cohort < 1) throw ConfigError("config error at cohort: must be >= 1");
    if (!seeds.empty() && seeds.size() != static_cast<std::size_t>(cohort)) {
        throw ConfigError("config error at seeds: need exactly one seed per agent");
    }
    const auto eff = effective_seeds();
    if (std::set<std::uint64_t>(eff.begin(), eff.end()).size() != eff.size()) {
        throw ConfigError("config error at seeds: seeds must be pairwise distinct");
    }
    if (train_episodes < 0) throw ConfigError("config error at train_episodes: must be >= 0");
    if (test_episodes < 0) throw ConfigError("config error at test_episodes: must be >= 0");
    if (max_episode_steps < kNumActions) {
        throw ConfigError("config error at max_episode_steps: must be >= 51");
    }
    if (out_dir.empty()) throw ConfigError("config error at out_dir: must not be empty");
    if (tabular.gamma < 0.0 || tabular.gamma > 1.0 || tabular.epsilon < 0.0 ||
        tabular.epsilon > 1.0 || tabular.eta <= 0.0) {
        throw ConfigError("config error at tabular: gamma/epsilon in [0,1], eta > 0");
    }
    if (agent == AgentKind::Dqn) {
        try {
            sqlrl::validate(dqn);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("config error at dqn: ") + e.what());
        }
    }
}

namespace {

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& path) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!known.count(key)) {
            throw ConfigError("config error at " + (path.empty() ? key : path + "." + key) +
                              ": unknown key");
        }
    }
}

template <typename T>
void get_field(const json& j, const char* key, T& out, const std::string& path) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config error at " + (path.empty() ? key : path + "." + key) + ": " +
                          e.what());
    }
}

json tabular_to_json(const Hyperparams& hp) {
    return json{{"gamma", hp.gamma}, {"epsilon", hp.epsilon}, {"eta", hp.eta}};
}

void tabular_from_json(const json& j, Hyperparams& hp) {
    reject_unknown_keys(j, {"gamma", "epsilon", "eta"}, "tabular");
    get_field(j, "gamma", hp.gamma, "tabular");
    get_field(j, "epsilon", hp.epsilon, "tabular");
    get_field(j, "eta", hp.eta, "tabular");
}

json dqn_to_json(const DqnConfig& cfg) {
    return json{{"total_steps", cfg.total_steps},
                {"batch_size", cfg.batch_size},
                {"learning_rate", cfg.learning_rate},
                {"gamma", cfg.gamma},
                {"buffer_capacity", cfg.buffer_capacity},
                {"learning_starts", cfg.learning_starts},
                {"train_freq", cfg.train_freq},
                {"target_sync_interval", cfg.target_sync_interval},
                {"epsilon_initial", cfg.epsilon_initial},
                {"epsilon_final", cfg.epsilon_final},
                {"exploration_fraction", cfg.exploration_fraction}};
}

void dqn_from_json(const json& j, DqnConfig& cfg) {
    reject_unknown_keys(j,
                        {"total_steps", "batch_size", "learning_rate", "gamma", "buffer_capacity",
                         "learning_starts", "train_freq", "target_sync_interval",
                         "epsilon_initial", "epsilon_final", "exploration_fraction"},
                        "dqn");
    get_field(j, "total_steps", cfg.total_steps, "dqn");
    get_field(j, "batch_size", cfg.batch_size, "dqn");
    get_field(j, "learning_rate", cfg.learning_rate, "dqn");
    get_field(j, "gamma", cfg.gamma, "dqn");
    get_field(j, "buffer_capacity", cfg.buffer_capacity, "dqn");
    get_field(j, "learning_starts", cfg.learning_starts, "dqn");
    get_field(j, "train_freq", cfg.train_freq, "dqn");
    get_field(j, "target_sync_interval", cfg.target_sync_interval, "dqn");
    get_field(j, "epsilon_initial", cfg.epsilon_initial, "dqn");
    get_field(j, "epsilon_final", cfg.epsilon_final, "dqn");
    get_field(j, "exploration_fraction", cfg.exploration_fraction, "dqn");
}

}  // namespace

std::string to_json_text(const ExperimentConfig& cfg) {
    json j;
    j["name"] = cfg.name;
    j["agent"] = to_string(cfg.agent);
    j["cohort"] = cfg.cohort;
    j["base_seed"] = cfg.base_seed;
    j["seeds"] = cfg.seeds;
    j["train_episodes"] = cfg.train_episodes;
    j["test_episodes"] = cfg.test_episodes;
    j["max_episode_steps"] = cfg.max_episode_steps;
    j["save_snapshots"] = cfg.save_snapshots;
    j["out_dir"] = cfg.out_dir;
    j["tabular"] = tabular_to_json(cfg.tabular);
    j["dqn"] = dqn_to_json(cfg.dqn);
    return j.dump(2) + "\n";
}

ExperimentConfig config_from_json_text(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError("config error in " + origin + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config error in " + origin + ": not an object");
    reject_unknown_keys(j,
                        {"name", "agent", "cohort", "base_seed", "seeds", "train_episodes",
                         "test_episodes", "max_episode_steps", "save_snapshots", "out_dir",
                         "tabular", "dqn"},
                        "");
    ExperimentConfig cfg;
    get_field(j, "name", cfg.name, "");
    if (j.contains("agent")) {
        std::string kind;
        get_field(j, "agent", kind, "");
        cfg.agent = agent_kind_from_string(kind);
    }
    get_field(j, "cohort", cfg.cohort, "");
    get_field(j, "base_seed", cfg.base_seed, "");
    get_field(j, "seeds", cfg.seeds, "");
    get_field(j, "train_episodes", cfg.train_episodes, "");
    get_field(j, "test_episodes", cfg.test_episodes, "");
    get_field(j, "max_episode_steps", cfg.max_episode_steps, "");
    get_field(j, "save_snapshots", cfg.save_snapshots, "");
    get_field(j, "out_dir", cfg.out_dir, "");
    if (j.contains("tabular")) tabular_from_json(j.at("tabular"), cfg.tabular);
    if (j.contains("dqn")) dqn_from_json(j.at("dqn"), cfg.dqn);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return config_from_json_text(buf.str(), path);
}

void save_config(const std::string& path, const ExperimentConfig& cfg) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << to_json_text(cfg);
    if (!os) throw std::runtime_error("short write to " + path);
}

}  // namespace sqlrl
