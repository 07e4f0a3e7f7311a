#include <doctest.h>

#include <cmath>

#include "graver_tv/augment.hpp"
#include "graver_tv/dense_lp.hpp"
#include "graver_tv/graver_oracle.hpp"
#include "graver_tv/init.hpp"
#include "test_support.hpp"

using namespace gtv;
using namespace gtv::testing;

namespace {

// Trust-region style instance: F = c t, G = alpha |.|, H = |t - center|.
SeparableProblem trust_region(const Graph& g, int q, const std::vector<double>& c, const std::vector<int>& center,
                              double alpha, double radius) {
    std::vector<ConvexTable> node, edge, budget;
    for (int v = 0; v < g.vertex_count(); ++v) {
        node.push_back(ConvexTable::linear(0, q, c[static_cast<std::size_t>(v)]));
        budget.push_back(ConvexTable::absolute(0, q, 1.0, center[static_cast<std::size_t>(v)]));
    }
    for (int e = 0; e < g.edge_count(); ++e) edge.push_back(ConvexTable::absolute(-q, q, alpha));
    return SeparableProblem(g, q, node, edge, budget, radius);
}

bool solve_square(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double>& x) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        if (std::fabs(a[piv][col]) < 1e-12) return false;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            double f = a[r][col] / a[col][col];
            for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
            b[r] -= f * b[col];
        }
    }
    x.resize(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return true;
}

// Relaxation optimum by enumerating every vertex of the arrangement of the
// box, kink, and budget-facet hyperplanes.
double relaxation_by_vertices(const Graph& g, int q, const std::vector<double>& c, const std::vector<int>& center,
                              double alpha, double radius) {
    const int n = g.vertex_count();
    std::vector<std::vector<double>> planes;
    std::vector<double> rhs;
    auto unit = [&](int v) {
        std::vector<double> r(static_cast<std::size_t>(n), 0.0);
        r[static_cast<std::size_t>(v)] = 1.0;
        return r;
    };
    for (int v = 0; v < n; ++v) {
        for (double val : {0.0, static_cast<double>(q), static_cast<double>(center[static_cast<std::size_t>(v)])}) {
            planes.push_back(unit(v));
            rhs.push_back(val);
        }
    }
    for (const Edge& e : g.edges()) {
        auto r = unit(e.tail);
        r[static_cast<std::size_t>(e.head)] = -1.0;
        planes.push_back(r);
        rhs.push_back(0.0);
    }
    for (int mask = 0; mask < (1 << n); ++mask) {
        std::vector<double> r(static_cast<std::size_t>(n));
        double b = radius;
        for (int v = 0; v < n; ++v) {
            double s = (mask >> v) & 1 ? 1.0 : -1.0;
            r[static_cast<std::size_t>(v)] = s;
            b += s * center[static_cast<std::size_t>(v)];
        }
        planes.push_back(r);
        rhs.push_back(b);
    }
    auto objective = [&](const std::vector<double>& x) {
        double j = 0.0;
        for (int v = 0; v < n; ++v) j += c[static_cast<std::size_t>(v)] * x[static_cast<std::size_t>(v)];
        for (const Edge& e : g.edges())
            j += alpha * std::fabs(x[static_cast<std::size_t>(e.tail)] - x[static_cast<std::size_t>(e.head)]);
        return j;
    };
    auto feasible = [&](const std::vector<double>& x) {
        double h = 0.0;
        for (int v = 0; v < n; ++v) {
            if (x[static_cast<std::size_t>(v)] < -1e-9 || x[static_cast<std::size_t>(v)] > q + 1e-9) return false;
            h += std::fabs(x[static_cast<std::size_t>(v)] - center[static_cast<std::size_t>(v)]);
        }
        return h <= radius + 1e-9;
    };
    double best = std::numeric_limits<double>::infinity();
    const int k = static_cast<int>(planes.size());
    std::vector<int> pick(static_cast<std::size_t>(n));
    // n-subsets of the plane list.
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == n) {
            std::vector<std::vector<double>> a;
            std::vector<double> b;
            for (int i : pick) {
                a.push_back(planes[static_cast<std::size_t>(i)]);
                b.push_back(rhs[static_cast<std::size_t>(i)]);
            }
            std::vector<double> x;
            if (solve_square(a, b, x) && feasible(x)) best = std::min(best, objective(x));
            return;
        }
        for (int i = start; i < k; ++i) {
            pick[static_cast<std::size_t>(depth)] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
    return best;
}

}  // namespace

TEST_CASE("DenseLP on small problems") {
    // max x + y s.t. x + 2y <= 4, 3x + y <= 6, 0 <= x, y <= 10  -> (1.6, 1.2)
    DenseLP lp;
    lp.add_variable(-1, 0, 10);
    lp.add_variable(-1, 0, 10);
    lp.add_row({1, 2}, RowSense::less_equal, 4);
    lp.add_row({3, 1}, RowSense::less_equal, 6);
    auto s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.x[0] == doctest::Approx(1.6));
    CHECK(s.x[1] == doctest::Approx(1.2));

    // Equality with shifted bounds and a bound flip.
    DenseLP eq;
    eq.add_variable(1, -2, 3);
    eq.add_variable(-2, 1, 2);
    eq.add_row({1, 1}, RowSense::equal, 1);
    eq.add_row({1, -1}, RowSense::greater_equal, -3);
    s = solve_lp(eq);
    REQUIRE(s.status == LpStatus::optimal);
    CHECK(s.x[0] == doctest::Approx(-1));
    CHECK(s.x[1] == doctest::Approx(2));
    CHECK(s.objective == doctest::Approx(-5));

    DenseLP bad;
    bad.add_variable(0, 0, 1);
    bad.add_row({1}, RowSense::greater_equal, 2);
    CHECK(solve_lp(bad).status == LpStatus::infeasible);
    bad.upper[0] = -1;
    CHECK_THROWS(solve_lp(bad));
}

TEST_CASE("minimal_budget_point") {
    Graph g = grid_graph(1, 3);
    auto p = trust_region(g, 3, {1, 1, 1}, {2, 2, 2}, 1.0, 0.0);
    CHECK(minimal_budget_point(p).x() == std::vector<int>{2, 2, 2});
    Rng rng(1);
    InstanceOptions o;
    auto r = random_problem(rng, o);
    CHECK(minimal_budget_point(r).x() == std::vector<int>(6, 0));
}

TEST_CASE("relaxation matches vertex enumeration on tiny trust-region instances") {
    Graph g = grid_graph(2, 2);
    Rng rng(7);
    for (int i = 0; i < 20; ++i) {
        std::vector<double> c(4);
        std::vector<int> center(4);
        for (auto& v : c) v = std::round((rng.uniform() * 4.0 - 2.0) * 4.0) / 4.0;
        for (auto& v : center) v = uniform_int(rng, 0, 1);
        double alpha = 0.25 * uniform_int(rng, 0, 4);
        double radius = uniform_int(rng, 0, 4) * 0.5;
        auto p = trust_region(g, 1, c, center, alpha, radius);
        auto rel = solve_relaxation(p);
        double oracle = relaxation_by_vertices(g, 1, c, center, alpha, radius);
        CHECK(rel.objective == doctest::Approx(oracle).epsilon(1e-9));
        double integer_opt = brute_force_solve(p).objective();
        CHECK(rel.objective <= integer_opt + 1e-9);
        Assignment x = rounded_init(p);
        CHECK(is_feasible(p, x.x()));
    }
}

TEST_CASE("relaxation with zero radius returns the center") {
    Graph g = grid_graph(2, 3);
    std::vector<int> center{0, 1, 2, 2, 1, 0};
    auto p = trust_region(g, 2, {1, -1, 2, -2, 0.5, -0.5}, center, 0.7, 0.0);
    auto rel = solve_relaxation(p);
    for (int v = 0; v < 6; ++v) CHECK(rel.x[static_cast<std::size_t>(v)] == doctest::Approx(center[static_cast<std::size_t>(v)]));
    CHECK(rounded_init(p).x() == center);
}

TEST_CASE("relaxation rejects quadratic fidelity") {
    Graph g = grid_graph(1, 2);
    SeparableProblem p(g, 2, {ConvexTable::quadratic(0, 2, 1), ConvexTable::quadratic(0, 2, 1)},
                       {ConvexTable::absolute(-2, 2, 1)}, {ConvexTable::linear(0, 2, 1), ConvexTable::linear(0, 2, 1)},
                       2);
    CHECK_THROWS_AS(solve_relaxation(p), NotLinearizable);
    CHECK_THROWS_AS(initial_point(p, {InitKind::rounded}), NotLinearizable);
}

TEST_CASE("penalized init is feasible and satisfies the penalty bound") {
    Rng rng(9);
    int checked = 0;
    for (int i = 0; i < 30; ++i) {
        InstanceOptions o;
        o.q = 2;
        o.integral = i % 2 == 0;
        o.cap_fraction = 0.3 + 0.1 * (i % 5);
        auto p = random_problem(rng, o);
        InitResult r = penalized_init(p);
        CHECK(is_feasible(p, r.x.x()));
        CHECK_FALSE(r.fell_back);
        Assignment x0 = minimal_budget_point(p);
        REQUIRE(x0.budget() == 0.0);
        double frac = r.x.budget() / p.budget_cap();
        Assignment star = brute_force_solve(p);
        CHECK(r.x.objective() - x0.objective() <= frac * (star.objective() - x0.objective()) + 1e-9);
        ++checked;
    }
    CHECK(checked == 30);
}

TEST_CASE("penalized init with a slack budget returns the unconstrained optimum") {
    Rng rng(10);
    InstanceOptions o;
    o.q = 3;
    auto p = random_problem(rng, o).with_budget_cap(1e6);
    InitResult r = penalized_init(p);
    CHECK(r.mu == 0.0);
    CHECK(r.x.objective() == solve_unconstrained(p, Assignment::zeros(p)).objective());
}

TEST_CASE("parse_init_kind") {
    CHECK(parse_init_kind("rounded") == InitKind::rounded);
    CHECK_THROWS(parse_init_kind("bogus"));
}
