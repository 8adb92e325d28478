#include "sqlrl/environment.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace sqlrl {

const char* to_string(Response r) {
    switch (r) {
        case Response::Negative: return "negative";
        case Response::Positive: return "positive";
        case Response::Flag: return "flag";
    }
    return "?";
}

Response classify(const Action& action, const QueryTemplate& tmpl) {
    if (action.escape != tmpl.input_form) {
        return Response::Negative;
    }
    switch (action.kind) {
        case ActionKind::EscapeProbe:
            return action.probe_polarity == ProbePolarity::True1 ? Response::Positive
                                                                 : Response::Negative;
        case ActionKind::ColumnProbe:
            return *action.column_count == tmpl.column_count ? Response::Positive
                                                             : Response::Negative;
        case ActionKind::Injection:
            return *action.column_count == tmpl.column_count ? Response::Flag
                                                             : Response::Negative;
    }
    throw std::logic_error("bad ActionKind");
}

std::string HistoryState::display_key() const {
    std::string out;
    for (int i = 0; i < kNumActions; ++i) {
        if (outcomes_[i] == 0) continue;
        if (!out.empty()) out += "|";
        out += outcomes_[i] > 0 ? "+" : "-";
        out += std::to_string(i + 1);
    }
    return out;
}

Environment::Environment(const EpisodeConfig& cfg)
    : cfg_(cfg), instance_rng_(splitmix64(cfg.seed ^ 0x5ee0e11ull)) {
    if (cfg_.max_steps < kNumActions) {
        throw std::invalid_argument("EpisodeConfig.max_steps must be >= 51");
    }
}

const HistoryState& Environment::reset() {
    return reset_with_instance_seed(instance_rng_.next_u64());
}

const HistoryState& Environment::reset_with_instance_seed(std::uint64_t instance_seed) {
    instance_ = generate_instance(instance_seed);
    state_ = HistoryState();
    steps_ = 0;
    done_ = false;
    return state_;
}

StepResult Environment::step(const Action& action) {
    if (done_) {
        throw std::logic_error("Environment::step on a finished episode");
    }
    ++steps_;
    StepResult r;
    r.response = classify(action, instance_.query);
    r.reward = r.response == Response::Flag ? kFlagReward : kStepPenalty;
    if (r.response != Response::Flag) {
        state_.record(action.index, r.response);
    }
    r.done = r.response == Response::Flag || steps_ >= cfg_.max_steps;
    r.state_after = state_;
    done_ = r.done;
    return r;
}

TraceWriter::TraceWriter(std::ostream& os) : os_(os) {
    os_ << "episode,step,action,response,reward,state\n";
}

void TraceWriter::append(long episode_id, int step_index, const Action& action,
                         const StepResult& result) {
    char reward[32];
    std::snprintf(reward, sizeof reward, "%g", result.reward);
    os_ << episode_id << "," << step_index << "," << action.index << ","
        << to_string(result.response) << "," << reward << ","
        << result.state_after.display_key() << "\n";
}

}  // namespace sqlrl
