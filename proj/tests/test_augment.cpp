#include <doctest.h>

#include "graver_tv/augment.hpp"
#include "graver_tv/graver_oracle.hpp"
#include "test_support.hpp"

using namespace gtv;
using namespace gtv::testing;

TEST_CASE("solve_unconstrained matches brute force on random 3x3 instances") {
    Rng gen(101);
    for (int i = 0; i < 30; ++i) {
        InstanceOptions o;
        o.rows = 3;
        o.cols = 3;
        o.q = 2;
        o.integral = i % 2 == 0;
        auto p = random_problem(gen, o);
        Assignment start(p, random_point(gen, p.vertex_count(), p.q()));
        UnconstrainedStats st;
        Assignment x = solve_unconstrained(p, start, &st);
        Assignment bf = brute_force_solve(p);
        if (p.exact()) CHECK(x.objective() == bf.objective());
        else CHECK(x.objective() == doctest::Approx(bf.objective()).epsilon(1e-9));
        CHECK(st.rounds <= 2 * p.q() + 2);
        CHECK(check_optimality(p, x, OptimalityLevel::graver_opt).optimal);
    }
}

TEST_CASE("solve_unconstrained with q = 3 needs at most 8 subproblem solves from zero") {
    Rng gen(102);
    int worst = 0;
    for (int i = 0; i < 40; ++i) {
        InstanceOptions o;
        o.rows = 3;
        o.cols = 3;
        o.q = 3;
        auto p = random_problem(gen, o);
        UnconstrainedStats st;
        solve_unconstrained(p, Assignment::zeros(p), &st);
        worst = std::max(worst, st.subproblem_solves);
    }
    CHECK(worst <= 8);
}

TEST_CASE("solve_unconstrained without edge costs returns per-vertex argmins") {
    Graph g = grid_graph(2, 2);
    std::vector<ConvexTable> node, edge, budget;
    std::vector<int> target{0, 3, 1, 2};
    for (int v = 0; v < 4; ++v) {
        node.push_back(ConvexTable::quadratic(0, 3, target[static_cast<std::size_t>(v)]));
        budget.push_back(ConvexTable::linear(0, 3, 1));
    }
    for (int e = 0; e < g.edge_count(); ++e) edge.push_back(ConvexTable::absolute(-3, 3, 0.0));
    SeparableProblem p(g, 3, node, edge, budget, 100);
    CHECK(solve_unconstrained(p, Assignment::zeros(p)).x() == target);
}

TEST_CASE("polish_2opt output is 2-optimal, idempotent, and never worse") {
    Rng gen(103);
    for (int i = 0; i < 40; ++i) {
        InstanceOptions o;
        o.q = 2;
        o.integral = i % 2 == 1;
        o.cap_fraction = 0.5;
        o.budget = BudgetShape::random_convex_increasing;
        auto p = random_problem(gen, o);
        Assignment x = Assignment::zeros(p);
        if (!is_feasible(p, x.x())) continue;
        Assignment y = polish_2opt(p, x);
        CHECK(y.objective() <= x.objective());
        CHECK(is_feasible(p, y.x()));
        CHECK(check_optimality(p, y, OptimalityLevel::two_opt).optimal);
        int again = -1;
        CHECK(polish_2opt(p, y, &again).x() == y.x());
        CHECK(again == 0);
    }
}

TEST_CASE("randomized augmentation with a slack budget finds the unconstrained optimum") {
    Rng gen(104);
    for (int i = 0; i < 20; ++i) {
        InstanceOptions o;
        o.q = 2;
        auto p = random_problem(gen, o);  // cap = +inf
        RunConfig rc;
        rc.trials = 100;
        rc.base_seed = 1000 + static_cast<std::uint64_t>(i);
        RunReport r = run_trials(p, Assignment::zeros(p), rc);
        CHECK(r.best_objective() == solve_unconstrained(p, Assignment::zeros(p)).objective());
    }
}

TEST_CASE("trial reports are feasible, 2-optimal, monotone, and reproducible") {
    Rng gen(105);
    for (int i = 0; i < 10; ++i) {
        InstanceOptions o;
        o.q = 2;
        o.cap_fraction = 0.5;
        auto p = random_problem(gen, o);
        AugmentConfig ac;
        ac.seed = static_cast<std::uint64_t>(i);
        ac.p = i % 2;
        ac.record_trajectory = true;
        TrialReport t = randomized_augmentation(p, Assignment::zeros(p), ac);
        CHECK(is_feasible(p, t.final_x.x()));
        CHECK(check_optimality(p, t.final_x, OptimalityLevel::two_opt).optimal);
        CHECK(t.objective == evaluate(p, t.final_x.x()).objective);
        for (std::size_t k = 1; k < t.trajectory.size(); ++k)
            CHECK(t.trajectory[k].objective < t.trajectory[k - 1].objective);
        TrialReport u = randomized_augmentation(p, Assignment::zeros(p), ac);
        CHECK(u.final_x.x() == t.final_x.x());
        CHECK(u.pivots_total == t.pivots_total);
    }
}

TEST_CASE("run_trials bookkeeping") {
    Rng gen(106);
    InstanceOptions o;
    o.rows = 3;
    o.cols = 3;
    o.q = 3;
    o.cap_fraction = 0.6;
    auto p = random_problem(gen, o);
    RunConfig one;
    one.trials = 1;
    one.base_seed = 5;
    RunReport r1 = run_trials(p, Assignment::zeros(p), one);
    REQUIRE(r1.trials.size() == 1);
    CHECK(r1.best_index == 0);
    CHECK(r1.best.x() == r1.trials[0].final_x.x());
    CHECK(r1.trials[0].seed == 5);

    RunConfig many;
    many.trials = 12;
    many.base_seed = 9;
    RunReport a = run_trials(p, Assignment::zeros(p), many);
    many.parallel = 3;
    RunReport b = run_trials(p, Assignment::zeros(p), many);
    REQUIRE(a.trials.size() == b.trials.size());
    for (std::size_t i = 0; i < a.trials.size(); ++i) CHECK(a.trials[i].final_x.x() == b.trials[i].final_x.x());
    CHECK(a.best_index == b.best_index);
    CHECK(a.best_objective() <= a.init.objective());

    RunConfig none = many;
    none.total_timeout_seconds = 0.0;
    RunReport z = run_trials(p, Assignment::zeros(p), none);
    CHECK(z.trials.empty());
    CHECK(z.best_index == -1);
    CHECK(z.best.x() == Assignment::zeros(p).x());
}
