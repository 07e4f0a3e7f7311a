#include <doctest.h>

#include "graver_tv/objective.hpp"
#include "test_support.hpp"

using namespace gtv;
using namespace gtv::testing;

TEST_CASE("convex tables") {
    CHECK_THROWS(ConvexTable(0, {0, 1, 0}));
    CHECK_NOTHROW(ConvexTable(0, {0, 1e-12, 0}));  // float noise tolerated
    ConvexTable q = ConvexTable::quadratic(0, 3, 1.0);
    CHECK(q(3) == 4.0);
    CHECK(q.exact());
    CHECK(q.forward(3) == 3.0);   // last slope continued
    CHECK(q.backward(0) == 1.0);  // first slope continued
    CHECK(q.argmin() == 1);
    CHECK(ConvexTable(0, {2, 1, 1, 3}).argmin() == 1);
    CHECK_FALSE(ConvexTable::linear(0, 2, 0.5).exact());
    CHECK_THROWS(q(4));
}

TEST_CASE("evaluate matches the reverse-order reference") {
    Rng rng(7);
    for (int i = 0; i < 50; ++i) {
        InstanceOptions o;
        o.rows = 3;
        o.cols = 3;
        o.q = 3;
        o.integral = i % 2 == 0;
        o.budget = BudgetShape::random_convex_increasing;
        auto p = random_problem(rng, o);
        auto x = random_point(rng, p.vertex_count(), p.q());
        Evaluation e = evaluate(p, x);
        CHECK(e.objective == doctest::Approx(reference_objective(p, x)).epsilon(1e-12));
        CHECK(e.budget == doctest::Approx(reference_budget(p, x)).epsilon(1e-12));
    }
}

TEST_CASE("delta_evaluate equals full re-evaluation, including shared edges") {
    Rng rng(8);
    for (int i = 0; i < 200; ++i) {
        InstanceOptions o;
        o.q = 3;
        o.integral = i % 2 == 1;
        auto p = random_problem(rng, o);
        Assignment x(p, random_point(rng, p.vertex_count(), p.q()));
        int u = uniform_int(rng, 0, 5), v = uniform_int(rng, 0, 4);
        if (v >= u) ++v;
        std::vector<std::pair<VertexId, int>> ch{{u, uniform_int(rng, 0, 3)}, {v, uniform_int(rng, 0, 3)}};
        Evaluation d = delta_evaluate(p, x, ch);
        std::vector<int> y = x.x();
        for (auto [w, val] : ch) y[static_cast<std::size_t>(w)] = val;
        CHECK(x.objective() + d.objective == doctest::Approx(reference_objective(p, y)).epsilon(1e-12));
        x.apply(p, ch);
        CHECK(x.x() == y);
        CHECK(x.objective() == doctest::Approx(reference_objective(p, y)).epsilon(1e-12));
    }
    auto p = random_problem(rng, {});
    Assignment x = Assignment::zeros(p);
    std::vector<std::pair<VertexId, int>> dup{{1, 1}, {1, 2}};
    CHECK_THROWS(delta_evaluate(p, x, dup));
    std::vector<std::pair<VertexId, int>> out{{1, 9}};
    CHECK_THROWS(delta_evaluate(p, x, out));
}

TEST_CASE("incremental costs and pinning") {
    Graph g = grid_graph(1, 2);
    SeparableProblem p(g, 2, {ConvexTable::quadratic(0, 2, 2), ConvexTable::quadratic(0, 2, 0)},
                       {ConvexTable::absolute(-2, 2, 3)}, {ConvexTable::linear(0, 2, 1), ConvexTable::linear(0, 2, 1)},
                       4);
    std::vector<int> x{2, 0};
    auto up = incremental_costs(p, x, Direction::up);
    CHECK(up.fixed_mask == std::vector<char>{1, 0});
    CHECK(up.node_delta[1] == 1.0);
    CHECK(up.edge_plus_delta[0] == 3.0);   // a = 2 -> 3, slope continued
    CHECK(up.edge_minus_delta[0] == -3.0);
    auto down = incremental_costs(p, x, Direction::down);
    CHECK(down.fixed_mask == std::vector<char>{0, 1});
    CHECK(down.node_delta[0] == 1.0);
    // Convexity: c+ + c- >= 0 on every edge.
    CHECK(up.edge_plus_delta[0] + up.edge_minus_delta[0] >= 0.0);
}

TEST_CASE("budget checks and derived problems") {
    Graph g = grid_graph(1, 2);
    SeparableProblem p(g, 1, {ConvexTable::linear(0, 1, -1), ConvexTable::linear(0, 1, -1)},
                       {ConvexTable::absolute(-1, 1, 1)}, {ConvexTable::linear(0, 1, 1), ConvexTable::linear(0, 1, 1)},
                       1);
    CHECK(p.within_budget(1.0));
    CHECK_FALSE(p.within_budget(1.1));
    CHECK_FALSE(is_feasible(p, std::vector<int>{1, 1}));
    CHECK(is_feasible(p, std::vector<int>{1, 0}));
    auto pen = p.penalized(2.0);
    CHECK(pen.node_cost(0)(1) == 1.0);
    CHECK(is_feasible(pen, std::vector<int>{1, 1}));
    CHECK_THROWS(SeparableProblem(g, 1, {}, {}, {}, 0));
}
