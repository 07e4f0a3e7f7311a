#include "graver_tv/init.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "graver_tv/augment.hpp"
#include "graver_tv/dense_lp.hpp"

namespace gtv {

namespace {

// A table restricted to [lo, hi] that is linear on each side of one integer
// kink (kink == lo when linear throughout).
struct TwoPiece {
    int kink;
    double value_at_kink;
    double left_slope;
    double right_slope;
};

std::optional<TwoPiece> two_piece(const ConvexTable& f, int lo, int hi) {
    std::vector<double> slopes;
    double scale = 1.0;
    for (int t = lo; t < hi; ++t) {
        slopes.push_back(f(t + 1) - f(t));
        scale = std::max({scale, std::fabs(f(t)), std::fabs(f(t + 1))});
    }
    const double tol = 1e-9 * scale;
    if (slopes.empty()) return TwoPiece{lo, f(lo), 0.0, 0.0};
    std::size_t change = slopes.size();
    for (std::size_t i = 1; i < slopes.size(); ++i) {
        if (std::fabs(slopes[i] - slopes[i - 1]) <= tol) continue;
        if (change != slopes.size()) return std::nullopt;
        change = i;
    }
    if (change == slopes.size()) return TwoPiece{lo, f(lo), slopes.front(), slopes.front()};
    int kink = lo + static_cast<int>(change);
    return TwoPiece{kink, f(kink), slopes.front(), slopes.back()};
}

bool nearly_integral(double v) { return std::fabs(v - std::round(v)) <= 1e-7; }

}  // namespace

const char* to_string(InitKind kind) {
    switch (kind) {
        case InitKind::zero: return "zero";
        case InitKind::penalized: return "penalized";
        case InitKind::rounded: return "rounded";
    }
    return "?";
}

InitKind parse_init_kind(const std::string& name) {
    if (name == "zero") return InitKind::zero;
    if (name == "penalized") return InitKind::penalized;
    if (name == "rounded") return InitKind::rounded;
    throw std::invalid_argument("unknown init kind '" + name + "' (expected zero, penalized or rounded)");
}

Assignment minimal_budget_point(const SeparableProblem& problem) {
    std::vector<int> x(static_cast<std::size_t>(problem.vertex_count()));
    for (VertexId v = 0; v < problem.vertex_count(); ++v) {
        const ConvexTable& h = problem.budget_cost(v);
        int best = 0;
        for (int t = 1; t <= problem.q(); ++t)
            if (h(t) < h(best)) best = t;
        x[static_cast<std::size_t>(v)] = best;
    }
    return Assignment(problem, std::move(x));
}

InitResult penalized_init(const SeparableProblem& problem, double mu_tolerance) {
    if (!(mu_tolerance > 0.0)) throw std::invalid_argument("penalized_init: mu tolerance must be positive");
    InitResult res;
    res.kind = InitKind::penalized;
    Assignment fallback = minimal_budget_point(problem);
    if (!problem.within_budget(fallback.budget()))
        throw std::runtime_error("penalized_init: even the minimal-budget point exceeds the budget");

    auto solve_at = [&](double mu) {
        SeparableProblem pen = problem.penalized(mu);
        Assignment y = solve_unconstrained(pen, Assignment::zeros(pen));
        ++res.unconstrained_solves;
        return Assignment(problem, y.x());
    };

    Assignment at_zero = solve_at(0.0);
    if (problem.within_budget(at_zero.budget())) {
        res.x = std::move(at_zero);
        res.mu = 0.0;
        return res;
    }
    double range = 1.0;
    for (const auto& f : problem.node_costs())
        for (double v : f.values()) range = std::max(range, std::fabs(v));
    for (const auto& g : problem.edge_costs())
        for (double v : g.values()) range = std::max(range, std::fabs(v));
    const double cap = std::ldexp(range, 60);

    double lo = 0.0, hi = 1.0;
    std::optional<Assignment> feasible;
    for (; hi <= cap; hi *= 2.0) {
        Assignment y = solve_at(hi);
        if (problem.within_budget(y.budget())) {
            feasible = std::move(y);
            break;
        }
        lo = hi;
    }
    if (!feasible) {
        res.x = std::move(fallback);
        res.fell_back = true;
        return res;
    }
    while (hi - lo > mu_tolerance) {
        double mid = 0.5 * (lo + hi);
        Assignment y = solve_at(mid);
        if (problem.within_budget(y.budget())) {
            hi = mid;
            feasible = std::move(y);
        } else {
            lo = mid;
        }
    }
    res.x = std::move(*feasible);
    res.mu = hi;
    return res;
}

RelaxationSolution solve_relaxation(const SeparableProblem& problem, std::int64_t iteration_cap) {
    const Graph& g = problem.graph();
    const int n = g.vertex_count();
    const int q = problem.q();
    DenseLP lp;
    double constant = 0.0;

    std::vector<int> xv(static_cast<std::size_t>(n));
    for (VertexId v = 0; v < n; ++v) {
        auto f = two_piece(problem.node_cost(v), 0, q);
        if (!f || f->left_slope != f->right_slope)
            throw NotLinearizable("node cost of vertex " + std::to_string(v) + " is not linear");
        constant += problem.node_cost(v)(0);
        xv[static_cast<std::size_t>(v)] = lp.add_variable(f->left_slope, 0.0, q);
    }
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const ConvexTable& gt = problem.edge_cost(e);
        auto left = two_piece(gt, -q, 0);
        auto right = two_piece(gt, 0, q);
        if (!left || !right || left->left_slope != left->right_slope || right->left_slope != right->right_slope)
            throw NotLinearizable("edge cost of edge " + std::to_string(e) + " is not linear on each side of 0");
        constant += gt(0);
        // G(a) = G(0) + r a+ - l a-, with a+ - a- = x_u - x_v.
        int ap = lp.add_variable(right->left_slope, 0.0, q);
        int am = lp.add_variable(-left->left_slope, 0.0, q);
        std::vector<double> row(static_cast<std::size_t>(lp.variable_count()), 0.0);
        const Edge& ed = g.edge(e);
        row[static_cast<std::size_t>(xv[static_cast<std::size_t>(ed.tail)])] += 1.0;
        row[static_cast<std::size_t>(xv[static_cast<std::size_t>(ed.head)])] -= 1.0;
        row[static_cast<std::size_t>(ap)] = -1.0;
        row[static_cast<std::size_t>(am)] = 1.0;
        lp.add_row(std::move(row), RowSense::equal, 0.0);
    }
    if (std::isfinite(problem.budget_cap())) {
        std::vector<std::pair<int, double>> budget_terms;
        double budget_constant = 0.0;
        for (VertexId v = 0; v < n; ++v) {
            const ConvexTable& h = problem.budget_cost(v);
            auto hp = two_piece(h, 0, q);
            if (!hp) throw NotLinearizable("budget cost of vertex " + std::to_string(v) + " has more than one kink");
            const int x = xv[static_cast<std::size_t>(v)];
            if (hp->left_slope == hp->right_slope) {
                budget_constant += h(0);
                budget_terms.emplace_back(x, hp->left_slope);
                continue;
            }
            // t >= slope_side * (x - kink); H = H(kink) + t.
            budget_constant += hp->value_at_kink;
            double t_lo = std::min({0.0, hp->left_slope * (0 - hp->kink), hp->right_slope * (q - hp->kink)});
            double t_hi = std::max({0.0, hp->left_slope * (0 - hp->kink), hp->right_slope * (q - hp->kink)});
            int t = lp.add_variable(0.0, t_lo, t_hi);
            for (double slope : {hp->left_slope, hp->right_slope}) {
                std::vector<double> row(static_cast<std::size_t>(lp.variable_count()), 0.0);
                row[static_cast<std::size_t>(x)] = slope;
                row[static_cast<std::size_t>(t)] = -1.0;
                lp.add_row(std::move(row), RowSense::less_equal, slope * hp->kink);
            }
            budget_terms.emplace_back(t, 1.0);
        }
        std::vector<double> row(static_cast<std::size_t>(lp.variable_count()), 0.0);
        for (auto [j, c] : budget_terms) row[static_cast<std::size_t>(j)] += c;
        lp.add_row(std::move(row), RowSense::less_equal, problem.budget_cap() - budget_constant);
    }

    LpSolution sol = solve_lp(lp, iteration_cap);
    if (sol.status != LpStatus::optimal) throw std::runtime_error("solve_relaxation: relaxation is infeasible");
    RelaxationSolution out;
    out.iterations = sol.iterations;
    out.objective = sol.objective + constant;
    for (VertexId v = 0; v < n; ++v) out.x.push_back(sol.x[static_cast<std::size_t>(xv[static_cast<std::size_t>(v)])]);
    return out;
}

Assignment rounded_init(const SeparableProblem& problem, std::int64_t iteration_cap) {
    const Graph& g = problem.graph();
    const int n = g.vertex_count();
    RelaxationSolution rel = solve_relaxation(problem, iteration_cap);
    std::vector<int> y(static_cast<std::size_t>(n), 0);
    std::vector<char> done(static_cast<std::size_t>(n), 0);

    auto local_cost = [&](VertexId v, int t) {
        double c = problem.node_cost(v)(t);
        for (EdgeId e : g.out_edges(v)) {
            VertexId w = g.edge(e).head;
            if (done[static_cast<std::size_t>(w)]) c += problem.edge_cost(e)(t - y[static_cast<std::size_t>(w)]);
        }
        for (EdgeId e : g.in_edges(v)) {
            VertexId w = g.edge(e).tail;
            if (done[static_cast<std::size_t>(w)]) c += problem.edge_cost(e)(y[static_cast<std::size_t>(w)] - t);
        }
        return c;
    };

    for (VertexId v = 0; v < n; ++v) {
        double r = rel.x[static_cast<std::size_t>(v)];
        int choice;
        if (nearly_integral(r)) {
            choice = static_cast<int>(std::lround(r));
        } else {
            int fl = static_cast<int>(std::floor(r));
            int ce = fl + 1;
            const ConvexTable& h = problem.budget_cost(v);
            double lam = r - fl;
            double interp = (1.0 - lam) * h(fl) + lam * h(ce);
            bool fl_ok = h(fl) <= interp + 1e-12;
            bool ce_ok = h(ce) <= interp + 1e-12;
            if (fl_ok && ce_ok) choice = local_cost(v, ce) < local_cost(v, fl) ? ce : fl;
            else choice = ce_ok ? ce : fl;
        }
        y[static_cast<std::size_t>(v)] = std::clamp(choice, 0, problem.q());
        done[static_cast<std::size_t>(v)] = 1;
    }

    Assignment x(problem, y);
    Assignment floor_point = minimal_budget_point(problem);
    while (!problem.within_budget(x.budget())) {
        VertexId best = -1;
        double best_saving = 0.0;
        int best_value = 0;
        for (VertexId v = 0; v < n; ++v) {
            int cur = x[v];
            int target = floor_point[v];
            if (cur == target) continue;
            int nv = cur + (target > cur ? 1 : -1);
            double saving = problem.budget_cost(v)(cur) - problem.budget_cost(v)(nv);
            if (best < 0 || saving > best_saving) {
                best = v;
                best_saving = saving;
                best_value = nv;
            }
        }
        if (best < 0) throw std::runtime_error("rounded_init: no budget-feasible rounding exists");
        std::pair<VertexId, int> ch[]{{best, best_value}};
        x.apply(problem, ch);
    }
    return x;
}

InitResult initial_point(const SeparableProblem& problem, const InitStrategy& strategy) {
    if (!(strategy.mu_tolerance > 0.0)) throw std::invalid_argument("initial_point: mu tolerance must be positive");
    InitResult res;
    switch (strategy.kind) {
        case InitKind::zero:
            res.x = minimal_budget_point(problem);
            res.kind = InitKind::zero;
            break;
        case InitKind::penalized: res = penalized_init(problem, strategy.mu_tolerance); break;
        case InitKind::rounded:
            res.x = rounded_init(problem, strategy.lp_iteration_cap);
            res.kind = InitKind::rounded;
            break;
    }
    if (!is_feasible(problem, res.x.x()))
        throw std::runtime_error(std::string("initial point (") + to_string(strategy.kind) + ") is not budget-feasible");
    return res;
}

}  // namespace gtv
