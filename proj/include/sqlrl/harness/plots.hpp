#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sqlrl/harness/metrics_io.hpp"
#include "sqlrl/qtable_agent.hpp"

namespace sqlrl {

// Static, self-contained vector-graphics renderings of the standard metric
// files (no external assets). Every function validates its input before
// touching the filesystem and throws std::runtime_error on bad input, so a
// failure never leaves a partial file behind.

// Cumulative distinct-state curve per agent, with a least-squares overlay
// fitted to the cross-agent mean on [fit_lo, fit_hi] (1-based episodes,
// inclusive).
void plot_state_growth(const std::string& path,
                       const std::vector<std::vector<TrainRow>>& per_agent, long fit_lo,
                       long fit_hi);

// Block-mean smoothed steps per training episode: cross-agent mean line over
// a +-1 standard deviation band.
void plot_steps_curve(const std::string& path, const std::vector<std::vector<TrainRow>>& per_agent,
                      std::size_t window);

// One box-with-notch per agent over its greedy test episode lengths.
void plot_test_notches(const std::string& path,
                       const std::vector<std::vector<int>>& per_agent_steps);

// Share of test episodes by step count, pooled over agents; long episodes
// collapse into an overflow bucket.
void plot_step_distribution(const std::string& path, const std::vector<int>& steps);

// Two test cohorts side by side as grouped percentage bars.
void plot_comparison(const std::string& path, const std::vector<int>& left_steps,
                     const std::string& left_label, const std::vector<int>& right_steps,
                     const std::string& right_label);

// One panel per stored Q-row (51 bars each), bars grouped by action family.
void plot_q_rows(const std::string& path,
                 const std::vector<std::pair<std::string, QRow>>& rows);

}  // namespace sqlrl
