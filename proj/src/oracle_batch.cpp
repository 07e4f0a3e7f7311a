#include "graver_tv/oracle_batch.hpp"

#include <algorithm>
#include <cmath>

#include "graver_tv/augment.hpp"
#include "graver_tv/graver_oracle.hpp"
#include "graver_tv/init.hpp"
#include "graver_tv/random_instances.hpp"

namespace gtv {

const char* to_string(BatchKind kind) {
    switch (kind) {
        case BatchKind::unconstrained: return "unconstrained";
        case BatchKind::constrained: return "constrained";
        case BatchKind::penalty: return "penalty";
    }
    return "?";
}

int BatchResult::passed() const {
    return static_cast<int>(std::count_if(cases.begin(), cases.end(), [](const BatchCase& c) { return !c.skipped && c.passed; }));
}
int BatchResult::failed() const {
    return static_cast<int>(std::count_if(cases.begin(), cases.end(), [](const BatchCase& c) { return !c.skipped && !c.passed; }));
}
int BatchResult::skipped() const {
    return static_cast<int>(std::count_if(cases.begin(), cases.end(), [](const BatchCase& c) { return c.skipped; }));
}

namespace {

void unconstrained_case(Rng& rng, const BatchOptions& o, BatchCase& c) {
    InstanceOptions io;
    io.rows = o.rows;
    io.cols = o.cols;
    io.q = c.q = 1 + c.index % 3;
    io.integral = c.index % 2 == 0;
    SeparableProblem p = random_problem(rng, io);
    UnconstrainedStats stats;
    Assignment x = solve_unconstrained(p, Assignment::zeros(p), &stats);
    Assignment star = brute_force_solve(p);
    c.reference = star.objective();
    c.achieved = x.objective();
    c.passed = std::fabs(c.achieved - c.reference) <= 1e-9 * std::max(1.0, std::fabs(c.reference));
    c.note = std::to_string(stats.rounds) + " rounds";
}

void constrained_case(Rng& rng, const BatchOptions& o, BatchCase& c) {
    InstanceOptions io;
    io.rows = o.rows;
    io.cols = o.cols;
    io.q = c.q = 2;
    io.cap_fraction = c.index % 2 == 0 ? 0.5 : 0.75;
    SeparableProblem p = random_problem(rng, io);
    RunConfig rc;
    rc.trials = o.trials;
    rc.base_seed = o.seed + static_cast<std::uint64_t>(c.index) * 1000;
    rc.p = c.index % 3 == 0 ? 0.0 : (c.index % 3 == 1 ? 0.5 : 1.0);
    Assignment init = Assignment::zeros(p);
    RunReport r = run_trials(p, init, rc);
    c.reference = init.objective();
    c.achieved = r.best_objective();
    bool feasible = is_feasible(p, r.best.x());
    bool two_opt = check_optimality(p, r.best, OptimalityLevel::two_opt).optimal;
    c.passed = feasible && two_opt && c.achieved <= c.reference + 1e-9;
    if (!feasible) c.note = "infeasible";
    else if (!two_opt) c.note = "not 2-optimal";
    else c.note = "p=" + std::to_string(rc.p).substr(0, 3);
}

void penalty_case(Rng& rng, const BatchOptions& o, BatchCase& c) {
    InstanceOptions io;
    io.rows = o.rows;
    io.cols = o.cols;
    io.q = c.q = 1 + c.index % 3;
    io.integral = c.index % 2 == 0;
    io.cap_fraction = 0.2 + 0.15 * (c.index % 5);
    SeparableProblem p = random_problem(rng, io);
    Assignment x0 = minimal_budget_point(p);
    if (x0.budget() != 0.0) {
        c.skipped = true;
        c.note = "H(x0) != 0";
        return;
    }
    InitResult r = penalized_init(p);
    Assignment star = brute_force_solve(p);
    const double frac = r.x.budget() / p.budget_cap();
    c.reference = x0.objective() + frac * (star.objective() - x0.objective());
    c.achieved = r.x.objective();
    c.passed = is_feasible(p, r.x.x()) && c.achieved <= c.reference + 1e-9;
    c.note = "p=" + std::to_string(frac).substr(0, 5);
}

}  // namespace

BatchResult run_batch(BatchKind kind, const BatchOptions& options) {
    BatchResult result{kind, {}};
    Rng rng(options.seed);
    for (int i = 0; i < options.count; ++i) {
        BatchCase c;
        c.index = i;
        try {
            switch (kind) {
                case BatchKind::unconstrained: unconstrained_case(rng, options, c); break;
                case BatchKind::constrained: constrained_case(rng, options, c); break;
                case BatchKind::penalty: penalty_case(rng, options, c); break;
            }
        } catch (const CapExceeded& e) {
            c.skipped = true;
            c.note = std::string("brute force cap exceeded: ") + e.what();
        }
        result.cases.push_back(std::move(c));
    }
    return result;
}

}  // namespace gtv
