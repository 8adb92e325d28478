#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>
#include <string>

#include "sqlrl/actionspace.hpp"

using namespace sqlrl;

TEST_CASE("exactly 51 actions partitioned 6 / 30 / 15") {
    const auto actions = enumerate_actions();
    REQUIRE(actions.size() == 51);
    int esc = 0, col = 0, inj = 0;
    for (const Action& a : actions) {
        switch (a.kind) {
            case ActionKind::EscapeProbe: ++esc; break;
            case ActionKind::ColumnProbe: ++col; break;
            case ActionKind::Injection: ++inj; break;
        }
    }
    CHECK(esc == kNumEscapeProbes);
    CHECK(col == kNumColumnProbes);
    CHECK(inj == kNumInjections);
}

TEST_CASE("index determines kind by the fixed ranges") {
    const auto& actions = action_table();
    for (int i = 0; i < kNumActions; ++i) {
        CHECK(actions[i].index == i);
        if (i <= 5) CHECK(actions[i].kind == ActionKind::EscapeProbe);
        else if (i <= 35) CHECK(actions[i].kind == ActionKind::ColumnProbe);
        else CHECK(actions[i].kind == ActionKind::Injection);
    }
}

TEST_CASE("escape probes come in the canonical listed order") {
    const auto& a = action_table();
    // (", 1=1), (", 1=2), (', 1=1), (', 1=2), (1, 1=1), (1, 1=2)
    const EscapeKind esc[6] = {EscapeKind::DoubleQuote, EscapeKind::DoubleQuote,
                               EscapeKind::SingleQuote, EscapeKind::SingleQuote,
                               EscapeKind::NoEscape,    EscapeKind::NoEscape};
    for (int i = 0; i < 6; ++i) {
        CHECK(a[i].escape == esc[i]);
        REQUIRE(a[i].probe_polarity.has_value());
        CHECK(*a[i].probe_polarity == (i % 2 == 0 ? ProbePolarity::True1 : ProbePolarity::False2));
        CHECK_FALSE(a[i].column_count.has_value());
    }
    CHECK(a[0].payload == "\" and 1=1#");
    CHECK(a[4].payload == "1 and 1=1#");
}

TEST_CASE("column probes are escape-major, count-major, variant A then B") {
    const auto& a = action_table();
    for (int i = 6; i <= 35; ++i) {
        const int off = i - 6;
        CHECK(a[i].escape == static_cast<EscapeKind>(off / 10));
        REQUIRE(a[i].column_count.has_value());
        CHECK(*a[i].column_count == (off % 10) / 2 + 1);
        REQUIRE(a[i].option_variant.has_value());
        CHECK(*a[i].option_variant == (off % 2 == 0 ? OptionVariant::A : OptionVariant::B));
    }
    CHECK(a[10].payload == "\" UNION SELECT 1,1,1 LIMIT 1#");  // count 3, variant A
    CHECK(a[11].payload == "\" UNION SELECT 1,1,1 LIMIT 1 OFFSET 1#");
}

TEST_CASE("injections are escape-major with counts 1..5") {
    const auto& a = action_table();
    CHECK(a[36].kind == ActionKind::Injection);
    CHECK(a[36].escape == EscapeKind::DoubleQuote);
    CHECK(*a[36].column_count == 1);
    CHECK(a[50].escape == EscapeKind::NoEscape);
    CHECK(*a[50].column_count == 5);
    CHECK(a[42].payload == "' UNION SELECT flag,flag FROM Flagtable#");
}

TEST_CASE("payloads are pairwise distinct and deterministic") {
    const auto first = enumerate_actions();
    const auto second = enumerate_actions();
    std::set<std::string> seen;
    for (int i = 0; i < kNumActions; ++i) {
        CHECK(first[i].payload == second[i].payload);
        CHECK(first[i].payload == action_payload(first[i]));
        seen.insert(first[i].payload);
    }
    CHECK(seen.size() == 51);
}

TEST_CASE("injection_index round-trips with the enumeration") {
    CHECK(injection_index(EscapeKind::DoubleQuote, 1) == 36);
    CHECK(injection_index(EscapeKind::SingleQuote, 2) == 42);
    CHECK(injection_index(EscapeKind::NoEscape, 5) == 50);
    const auto& actions = action_table();
    for (int e = 0; e < 3; ++e) {
        for (int c = 1; c <= kMaxColumns; ++c) {
            const int idx = injection_index(static_cast<EscapeKind>(e), c);
            const Action& a = actions[idx];
            CHECK(a.kind == ActionKind::Injection);
            CHECK(a.escape == static_cast<EscapeKind>(e));
            CHECK(*a.column_count == c);
        }
    }
    CHECK_THROWS_AS(injection_index(EscapeKind::NoEscape, 0), std::out_of_range);
    CHECK_THROWS_AS(injection_index(EscapeKind::NoEscape, 6), std::out_of_range);
}

TEST_CASE("escape prefixes") {
    CHECK(escape_prefix(EscapeKind::DoubleQuote) == "\"");
    CHECK(escape_prefix(EscapeKind::SingleQuote) == "'");
    CHECK(escape_prefix(EscapeKind::NoEscape) == "1");
}

TEST_CASE("name helpers") {
    CHECK(std::string(to_string(EscapeKind::NoEscape)) == "no_escape");
    CHECK(std::string(to_string(ActionKind::Injection)) == "injection");
}
