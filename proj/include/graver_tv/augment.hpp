#pragma once

// Drivers: the exact alternating up/down solver for the unconstrained
// problem, the randomized augmentation heuristic for the budgeted problem,
// 2-opt polishing, and a best-of-T trial harness.

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "graver_tv/forest_simplex.hpp"
#include "graver_tv/objective.hpp"

namespace gtv {

struct UnconstrainedStats {
    int rounds = 0;  // up+down pairs, including the final unchanged one
    int subproblem_solves = 0;
    std::int64_t pivots = 0;
};

/// Alternates exact up and down subproblem solves from x0 until a full round
/// leaves x unchanged. The budget is ignored. Throws std::logic_error if more
/// than 2q + 2 rounds are needed.
Assignment solve_unconstrained(const SeparableProblem& problem, const Assignment& x0,
                               UnconstrainedStats* stats = nullptr);

/// First-improvement local search over +-1 and +-2 on one vertex and
/// (+-1, +-1) on two vertices, until a full scan finds nothing. Returns the
/// number of moves applied through `moves` when given.
Assignment polish_2opt(const SeparableProblem& problem, const Assignment& x, int* moves = nullptr);

struct TrajectoryPoint {
    std::int64_t pivot;  // cumulative pivots within the trial
    double objective;
    double budget;
};

struct AugmentConfig {
    double p = 0.0;
    std::uint64_t seed = 0;
    std::int64_t max_pivots_per_call = 0;  // 0: sampler default
    double improvement_tolerance = 1e-9;
    std::optional<std::chrono::steady_clock::time_point> deadline;
    bool record_trajectory = false;
    bool polish = true;
};

struct TrialReport {
    std::uint64_t seed = 0;
    Assignment final_x;
    double objective = 0.0;
    double budget_used = 0.0;
    std::int64_t pivots_total = 0;
    std::int64_t moves_applied = 0;
    int polish_moves = 0;
    double wall_time_seconds = 0.0;
    bool timed_out = false;
    std::vector<TrajectoryPoint> trajectory;
};

/// Alternating sampled up/down moves from a feasible x0 until a round applies
/// nothing, then 2-opt polishing. On timeout the current iterate is returned
/// unpolished with timed_out set.
TrialReport randomized_augmentation(const SeparableProblem& problem, const Assignment& x0, const AugmentConfig& config);

struct RunConfig {
    int trials = 100;
    std::uint64_t base_seed = 0;
    double p = 0.0;
    std::optional<double> trial_timeout_seconds;
    std::optional<double> total_timeout_seconds;
    int parallel = 1;
    std::int64_t max_pivots_per_call = 0;
    bool record_trajectory = false;
    std::string init_label = "zero";
};

struct RunReport {
    RunConfig config;
    Assignment init;
    std::vector<TrialReport> trials;  // in trial-index order; skipped trials absent
    int best_index = -1;              // into trials; -1 when the init point is the fallback
    Assignment best;
    double wall_time_seconds = 0.0;

    double best_objective() const { return best.objective(); }
};

/// Runs up to config.trials trials with seeds base_seed + i. Trials that
/// would start after the total timeout are skipped; a running trial's
/// deadline is the earlier of its own and the total one.
RunReport run_trials(const SeparableProblem& problem, const Assignment& init, const RunConfig& config);

}  // namespace gtv
