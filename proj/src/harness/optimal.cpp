#include "sqlrl/harness/optimal.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <vector>

namespace sqlrl {

namespace {

constexpr Belief escape_group(int escape_ordinal) {
    return static_cast<Belief>(0x1Fu << (5 * escape_ordinal));
}

std::vector<double> compute_values() {
    std::vector<double> v(1u << kNumHypotheses, 0.0);
    std::vector<Belief> order;
    order.reserve(v.size() - 1);
    for (std::uint32_t mask = 1; mask < v.size(); ++mask) {
        order.push_back(static_cast<Belief>(mask));
    }
    // Every informative action shrinks the belief, so values of strict
    // subsets suffice: fill in ascending popcount order.
    std::stable_sort(order.begin(), order.end(),
                     [](Belief a, Belief b) { return std::popcount(a) < std::popcount(b); });

    for (Belief mask : order) {
        const int n = std::popcount(static_cast<std::uint32_t>(mask));
        if (n == 1) {
            v[mask] = 1.0;  // inject the only candidate
            continue;
        }
        const double dn = static_cast<double>(n);
        double best = 1.0e300;
        // Injection on candidate h: succeeds with probability 1/n (no
        // further cost), otherwise eliminates h. A column probe on h makes
        // the same split but still has to inject on success, so it is
        // dominated; it is included anyway to keep the action set honest.
        for (int h = 0; h < kNumHypotheses; ++h) {
            const Belief bit = static_cast<Belief>(1u << h);
            if (!(mask & bit)) continue;
            const Belief rest = static_cast<Belief>(mask & ~bit);
            const double inject = 1.0 + (dn - 1.0) / dn * v[rest];
            const double probe = 1.0 + 1.0 / dn * v[bit] + (dn - 1.0) / dn * v[rest];
            best = std::min({best, inject, probe});
        }
        // Escape probe (the informative 1=1 polarity): partitions the belief
        // by escape. Skip degenerate splits.
        for (int e = 0; e < 3; ++e) {
            const Belief yes = static_cast<Belief>(mask & escape_group(e));
            if (yes == 0 || yes == mask) continue;
            const Belief no = static_cast<Belief>(mask & ~yes);
            const double ny = static_cast<double>(std::popcount(static_cast<std::uint32_t>(yes)));
            const double cand = 1.0 + ny / dn * v[yes] + (dn - ny) / dn * v[no];
            best = std::min(best, cand);
        }
        v[mask] = best;
    }
    return v;
}

const std::vector<double>& value_table() {
    static const std::vector<double> table = compute_values();
    return table;
}

}  // namespace

int hypothesis_index(EscapeKind escape, int column_count) {
    if (column_count < 1 || column_count > kMaxColumns) {
        throw std::invalid_argument("column count outside 1..5");
    }
    return static_cast<int>(escape) * kMaxColumns + (column_count - 1);
}

double optimal_expected_steps(Belief belief) {
    if (belief == 0) throw std::invalid_argument("empty belief");
    return value_table()[belief];
}

double optimal_expected_steps() { return optimal_expected_steps(kFullBelief); }

}  // namespace sqlrl
