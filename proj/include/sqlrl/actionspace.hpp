#pragma once

#include <optional>
#include <string>
#include <vector>

namespace sqlrl {

// Canonical order: DoubleQuote, SingleQuote, NoEscape.
enum class EscapeKind { DoubleQuote = 0, SingleQuote = 1, NoEscape = 2 };

enum class ActionKind { EscapeProbe, ColumnProbe, Injection };

// Boolean probe polarity: "and 1=1" vs "and 1=2".
enum class ProbePolarity { True1, False2 };

// Inert output-formatting options on column probes.
enum class OptionVariant { A, B };  // A = LIMIT 1, B = LIMIT 1 OFFSET 1

struct Action {
    int index = 0;  // [0,50]; uniquely determines all other fields
    ActionKind kind = ActionKind::EscapeProbe;
    EscapeKind escape = EscapeKind::DoubleQuote;
    std::optional<ProbePolarity> probe_polarity;  // escape probes only
    std::optional<int> column_count;              // column probes and injections, [1,5]
    std::optional<OptionVariant> option_variant;  // column probes only
    std::string payload;
};

inline constexpr int kNumActions = 51;
inline constexpr int kNumEscapeProbes = 6;   // indices [0,5]
inline constexpr int kNumColumnProbes = 30;  // indices [6,35]
inline constexpr int kNumInjections = 15;    // indices [36,50]
inline constexpr int kMaxColumns = 5;

// The full 51-action set:
//   0..5   escape probes, (", 1=1), (", 1=2), (', 1=1), (', 1=2), (1, 1=1), (1, 1=2)
//   6..35  column probes, escape-major, then column count 1..5, then option A,B
//   36..50 injections, escape-major, then column count 1..5
std::vector<Action> enumerate_actions();

// Cached table of the same 51 actions, for hot paths.
const std::vector<Action>& action_table();

std::string action_payload(const Action& a);

// Leading fragment injected before any SQL: the matching quote, or the
// neutral literal `1` when no escape is needed.
std::string escape_prefix(EscapeKind e);

// Index of the unique injection action for (escape, count). count must be in
// [1,5]; throws std::out_of_range otherwise.
int injection_index(EscapeKind escape, int count);

const char* to_string(EscapeKind e);
const char* to_string(ActionKind k);

}  // namespace sqlrl
