#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sqlrl/environment.hpp"

using namespace sqlrl;

namespace {

QueryTemplate make_template(EscapeKind form, int count) {
    QueryTemplate t;
    for (int i = 0; i < count; ++i) t.selected_columns.push_back("Column" + std::to_string(i + 1));
    t.table_name = "Table1";
    t.where_column = "Column1";
    t.condition = ConditionKind::Equals;
    t.input_form = form;
    t.column_count = count;
    return t;
}

}  // namespace

TEST_CASE("classify implements the response rule table exactly") {
    const auto& actions = action_table();
    const EscapeKind forms[3] = {EscapeKind::DoubleQuote, EscapeKind::SingleQuote,
                                 EscapeKind::NoEscape};
    for (EscapeKind form : forms) {
        for (int count = 1; count <= 5; ++count) {
            const QueryTemplate tmpl = make_template(form, count);
            int flags = 0;
            for (const Action& a : actions) {
                const Response r = classify(a, tmpl);
                if (a.escape != form) {
                    CHECK(r == Response::Negative);
                    continue;
                }
                switch (a.kind) {
                    case ActionKind::EscapeProbe:
                        CHECK(r == (*a.probe_polarity == ProbePolarity::True1
                                        ? Response::Positive
                                        : Response::Negative));
                        break;
                    case ActionKind::ColumnProbe:
                        CHECK(r == (*a.column_count == count ? Response::Positive
                                                             : Response::Negative));
                        break;
                    case ActionKind::Injection:
                        CHECK(r == (*a.column_count == count ? Response::Flag
                                                             : Response::Negative));
                        break;
                }
                if (r == Response::Flag) ++flags;
            }
            // Exactly one flag action per instance, at the documented index.
            CHECK(flags == 1);
            CHECK(classify(actions[injection_index(form, count)], tmpl) == Response::Flag);
        }
    }
}

TEST_CASE("classify: documented single cases") {
    const auto& actions = action_table();
    const QueryTemplate sq2 = make_template(EscapeKind::SingleQuote, 2);
    CHECK(classify(actions[injection_index(EscapeKind::SingleQuote, 2)], sq2) == Response::Flag);
    CHECK(classify(actions[0], sq2) == Response::Negative);  // (", 1=1) vs single-quote form

    const QueryTemplate dq3 = make_template(EscapeKind::DoubleQuote, 3);
    // Double-quote column probes, count 2 (variants A and B) then count 3.
    CHECK(classify(actions[8], dq3) == Response::Negative);
    CHECK(classify(actions[9], dq3) == Response::Negative);
    CHECK(classify(actions[10], dq3) == Response::Positive);
    CHECK(classify(actions[11], dq3) == Response::Positive);
}

TEST_CASE("difficulty depends only on input form and column count") {
    // Bucket instances by (form, count); any two in a bucket must answer
    // every action identically.
    std::map<std::pair<int, int>, EnvInstance> first_seen;
    int compared = 0;
    for (std::uint64_t seed = 1; seed <= 120; ++seed) {
        const EnvInstance inst = generate_instance(seed);
        const auto key = std::make_pair(static_cast<int>(inst.query.input_form),
                                        inst.query.column_count);
        auto [it, inserted] = first_seen.try_emplace(key, inst);
        if (inserted) continue;
        ++compared;
        for (const Action& a : action_table()) {
            REQUIRE(classify(a, inst.query) == classify(a, it->second.query));
        }
    }
    CHECK(compared > 50);
}

TEST_CASE("history canonical key is order-invariant") {
    HistoryState a, b;
    a.record(8, Response::Positive);
    a.record(16, Response::Negative);
    a.record(21, Response::Positive);

    b.record(21, Response::Positive);
    b.record(8, Response::Positive);
    b.record(16, Response::Negative);

    CHECK(a == b);
    CHECK(a.canonical_key() == b.canonical_key());
    CHECK(a.display_key() == "+9|-17|+22");
    CHECK(a.tried_count() == 3);

    // Signed 1-based bytes in ascending action order.
    const std::string key = a.canonical_key();
    REQUIRE(key.size() == 3);
    CHECK(static_cast<signed char>(key[0]) == 9);
    CHECK(static_cast<signed char>(key[1]) == -17);
    CHECK(static_cast<signed char>(key[2]) == 22);
}

TEST_CASE("recorded outcomes never change") {
    HistoryState h;
    h.record(5, Response::Positive);
    h.record(5, Response::Negative);  // deterministic responses: ignored
    CHECK(h.outcome(5) == +1);
    CHECK(h.tried_count() == 1);
}

TEST_CASE("empty history") {
    HistoryState h;
    CHECK(h.canonical_key().empty());
    CHECK(h.tried_count() == 0);
    CHECK(h.outcome(0) == 0);
}

TEST_CASE("reset starts an empty episode and draws deterministically") {
    Environment e1({1000, 7});
    Environment e2({1000, 7});
    for (int k = 0; k < 5; ++k) {
        e1.reset();
        e2.reset();
        CHECK(e1.state().canonical_key().empty());
        CHECK(e1.steps_taken() == 0);
        CHECK_FALSE(e1.done());
        CHECK(instance_to_json(e1.instance()) == instance_to_json(e2.instance()));
    }
}

TEST_CASE("reset_with_instance_seed pins the instance without touching the stream") {
    Environment plain({1000, 7});
    plain.reset();
    const std::string first = instance_to_json(plain.instance());

    Environment probed({1000, 7});
    probed.reset_with_instance_seed(999);
    CHECK(instance_to_json(probed.instance()) == instance_to_json(generate_instance(999)));
    probed.reset();
    CHECK(instance_to_json(probed.instance()) == first);
}

TEST_CASE("step rewards, termination and the flag path") {
    Environment env({1000, 11});
    env.reset_with_instance_seed(3);
    const QueryTemplate& q = env.instance().query;
    const int flag_idx = injection_index(q.input_form, q.column_count);

    // A wrong action: -1, not done, outcome recorded.
    const int wrong = flag_idx == 36 ? 37 : 36;
    const StepResult r1 = env.step(wrong);
    CHECK(r1.response == Response::Negative);
    CHECK(r1.reward == kStepPenalty);
    CHECK_FALSE(r1.done);
    CHECK(r1.state_after.outcome(wrong) == -1);

    // The winning injection: +10, done, and never recorded into history.
    const StepResult r2 = env.step(flag_idx);
    CHECK(r2.response == Response::Flag);
    CHECK(r2.reward == kFlagReward);
    CHECK(r2.done);
    CHECK(r2.state_after.outcome(flag_idx) == 0);
    CHECK(r2.state_after.tried_count() == 1);

    CHECK(env.done());
    CHECK_THROWS_AS(env.step(0), std::logic_error);
}

TEST_CASE("step limit terminates with a final -1") {
    Environment env({1000, 13});
    env.reset();
    StepResult last;
    for (int i = 0; i < 1000; ++i) {
        REQUIRE_FALSE(env.done());
        last = env.step(0);  // an escape probe can never hit the flag
    }
    CHECK(env.done());
    CHECK(env.steps_taken() == 1000);
    CHECK(last.done);
    CHECK(last.reward == kStepPenalty);
    CHECK(last.response != Response::Flag);
    CHECK_THROWS_AS(env.step(0), std::logic_error);
}

TEST_CASE("responses do not depend on arrival order") {
    Environment a({1000, 17});
    Environment b({1000, 17});
    a.reset_with_instance_seed(55);
    b.reset_with_instance_seed(55);

    const std::vector<int> order_a = {0, 2, 6, 40, 12};
    std::vector<int> order_b = order_a;
    std::reverse(order_b.begin(), order_b.end());

    std::map<int, Response> resp_a, resp_b;
    for (int idx : order_a) resp_a[idx] = a.step(idx).response;
    for (int idx : order_b) resp_b[idx] = b.step(idx).response;

    CHECK(resp_a == resp_b);
    CHECK(a.state().canonical_key() == b.state().canonical_key());
}

TEST_CASE("trace writer emits the documented schema") {
    Environment env({1000, 19});
    env.reset_with_instance_seed(4);
    std::ostringstream os;
    TraceWriter tw(os);
    const StepResult r = env.step(1);
    tw.append(0, 1, action_table()[1], r);
    const std::string out = os.str();
    CHECK(out.rfind("episode,step,action,response,reward,state\n", 0) == 0);
    CHECK(out.find("0,1,1,") != std::string::npos);
    CHECK(out.find("-1") != std::string::npos);
}
