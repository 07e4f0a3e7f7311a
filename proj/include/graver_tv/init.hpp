#pragma once

// Initial points for the randomized heuristic: the budget-minimizing point,
// the penalty formulation with a bisection on its weight, and rounding of
// the continuous relaxation.

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "graver_tv/objective.hpp"

namespace gtv {

enum class InitKind { zero, penalized, rounded };

const char* to_string(InitKind kind);
/// Accepts "zero", "penalized", "rounded"; throws std::invalid_argument.
InitKind parse_init_kind(const std::string& name);

struct InitStrategy {
    InitKind kind = InitKind::zero;
    double mu_tolerance = 1e-4;
    std::int64_t lp_iteration_cap = 0;  // 0: solver default
};

struct InitResult {
    Assignment x;
    InitKind kind = InitKind::zero;
    std::optional<double> mu;  // penalized only
    bool fell_back = false;    // penalized search gave up, x is the minimal-budget point
    int unconstrained_solves = 0;
};

/// Per-vertex smallest argmin of H_v.
Assignment minimal_budget_point(const SeparableProblem& problem);

/// Solves the penalty formulation F + mu H (budget dropped) exactly. mu = 0 is
/// tried first; otherwise mu doubles from 1 until the solution fits the
/// budget, then [infeasible, feasible] is bisected to width mu_tolerance and
/// the solution at the feasible end is returned.
InitResult penalized_init(const SeparableProblem& problem, double mu_tolerance = 1e-4);

class NotLinearizable : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct RelaxationSolution {
    std::vector<double> x;
    double objective = 0.0;  // of the relaxed problem, constants included
    std::int64_t iterations = 0;
};

/// Continuous relaxation over [0, q]^V with the budget, for linear F, edge
/// costs linear on each side of 0, and H linear or convex with one integer
/// kink. Throws NotLinearizable otherwise, std::runtime_error when the
/// relaxation is infeasible, LpIterationCap on the iteration cap.
RelaxationSolution solve_relaxation(const SeparableProblem& problem, std::int64_t iteration_cap = 0);

/// Rounds the relaxation vertex by vertex (in id order) to whichever of
/// floor/ceil does not raise H_v above its interpolated value; when both
/// qualify, the one with the smaller node cost plus edge costs against
/// already rounded neighbours. Any remaining budget excess is repaired by
/// stepping the vertex with the largest H_v saving toward its argmin.
Assignment rounded_init(const SeparableProblem& problem, std::int64_t iteration_cap = 0);

/// Dispatches on strategy.kind. Throws std::runtime_error if the result is
/// not budget-feasible.
InitResult initial_point(const SeparableProblem& problem, const InitStrategy& strategy);

}  // namespace gtv
