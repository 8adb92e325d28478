#pragma once

#include <cstdint>

#include "sqlrl/actionspace.hpp"

namespace sqlrl {

// The identification game the environment reduces to: 15 equally likely
// hidden hypotheses (3 escapes x 5 column counts). Responses are
// deterministic per hypothesis, so a belief is just the set of hypotheses
// still consistent with the history, with a uniform posterior. An escape
// probe splits a belief by escape, a column probe tests one hypothesis, and
// an injection tests one hypothesis and ends the game on a match. Every
// action costs one step, the flag action included.

inline constexpr int kNumHypotheses = 15;
using Belief = std::uint16_t;  // bit h set = hypothesis h still possible
inline constexpr Belief kFullBelief = static_cast<Belief>((1u << kNumHypotheses) - 1);

// Hypothesis numbering: escape-major, counts 1..5 within an escape.
int hypothesis_index(EscapeKind escape, int column_count);

// Exact expected steps-to-flag of an optimal policy from the given belief,
// by dynamic programming over all nonempty beliefs (only informative actions
// can ever help, and uninformative ones strictly lose a step). Throws
// std::invalid_argument on an empty belief.
double optimal_expected_steps(Belief belief);

// Full game: uniform prior over all 15 hypotheses.
double optimal_expected_steps();

}  // namespace sqlrl
