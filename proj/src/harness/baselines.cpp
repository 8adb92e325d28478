#include "sqlrl/harness/baselines.hpp"

#include <numeric>
#include <stdexcept>

#include "sqlrl/actionspace.hpp"
#include "sqlrl/rng.hpp"

namespace sqlrl {

std::vector<int> random_baseline(BaselineKind kind, long episodes, std::uint64_t seed) {
    if (episodes < 1) throw std::invalid_argument("baseline needs at least one episode");
    Rng rng(splitmix64(seed ^ 0xb1a5eull));
    std::vector<int> steps;
    steps.reserve(episodes);
    std::vector<int> order(kNumActions);
    for (long ep = 0; ep < episodes; ++ep) {
        const int winner = rng.uniform_int(0, kNumActions - 1);
        if (kind == BaselineKind::WithoutReplacement) {
            std::iota(order.begin(), order.end(), 0);
            // Fisher-Yates; stop early once the winner surfaces.
            int count = 0;
            for (int i = 0; i < kNumActions; ++i) {
                const int j = rng.uniform_int(i, kNumActions - 1);
                std::swap(order[i], order[j]);
                ++count;
                if (order[i] == winner) break;
            }
            steps.push_back(count);
        } else {
            int count = 1;
            while (rng.uniform_int(0, kNumActions - 1) != winner) ++count;
            steps.push_back(count);
        }
    }
    return steps;
}

}  // namespace sqlrl
