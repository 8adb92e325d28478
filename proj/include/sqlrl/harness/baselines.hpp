#pragma once

#include <cstdint>
#include <vector>

namespace sqlrl {

enum class BaselineKind { WithoutReplacement, WithReplacement };

// Blind-guessing reference agents. Each episode one of the 51 actions is the
// winner; WithoutReplacement plays a uniform random permutation of the action
// list and reports the winner's position, WithReplacement draws uniformly
// with repetition until it hits. Returns per-episode step counts. Throws
// std::invalid_argument if episodes < 1.
std::vector<int> random_baseline(BaselineKind kind, long episodes, std::uint64_t seed);

}  // namespace sqlrl
