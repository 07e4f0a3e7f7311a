#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance binary.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "graver_tv/graph.hpp"
#include "graver_tv/objective.hpp"
#include "graver_tv/random_instances.hpp"
#include "graver_tv/rng.hpp"

namespace gtv::testing {

/// Objective recomputed by iterating edges first then vertices in reverse
/// order, independent of the library's evaluate.
inline double reference_objective(const SeparableProblem& p, const std::vector<int>& x) {
    double total = 0.0;
    for (int e = p.edge_count() - 1; e >= 0; --e) {
        const Edge& ed = p.graph().edge(e);
        total += p.edge_cost(e)(x[static_cast<std::size_t>(ed.tail)] - x[static_cast<std::size_t>(ed.head)]);
    }
    for (int v = p.vertex_count() - 1; v >= 0; --v) total += p.node_cost(v)(x[static_cast<std::size_t>(v)]);
    return total;
}

inline double reference_budget(const SeparableProblem& p, const std::vector<int>& x) {
    double total = 0.0;
    for (int v = p.vertex_count() - 1; v >= 0; --v) total += p.budget_cost(v)(x[static_cast<std::size_t>(v)]);
    return total;
}

/// min over dx in {0,1}^V (pinned vertices held at 0) of J(x + s dx) - J(x),
/// by enumeration. Equals the augmentation LP optimum by integrality.
inline double subproblem_oracle(const SeparableProblem& p, const std::vector<int>& x, int s,
                                std::vector<int>* argmin = nullptr) {
    const int n = p.vertex_count();
    const double base = reference_objective(p, x);
    double best = 0.0;
    if (argmin) argmin->assign(static_cast<std::size_t>(n), 0);
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
        std::vector<int> y = x;
        bool ok = true;
        for (int v = 0; v < n && ok; ++v) {
            if (!((mask >> v) & 1u)) continue;
            y[static_cast<std::size_t>(v)] += s;
            ok = y[static_cast<std::size_t>(v)] >= 0 && y[static_cast<std::size_t>(v)] <= p.q();
        }
        if (!ok) continue;
        double d = reference_objective(p, y) - base;
        if (d < best) {
            best = d;
            if (argmin)
                for (int v = 0; v < n; ++v) (*argmin)[static_cast<std::size_t>(v)] = (mask >> v) & 1u ? 1 : 0;
        }
    }
    return best;
}

inline std::vector<int> random_point(Rng& rng, int n, int q) {
    std::vector<int> x(static_cast<std::size_t>(n));
    for (auto& v : x) v = uniform_int(rng, 0, q);
    return x;
}

/// Exhaustive minimizer over {0..q}^V by odometer order, keeping the first
/// point of least objective among those with budget <= cap (use +inf to drop
/// the budget). Returns an empty vector when nothing qualifies.
inline std::vector<int> reference_minimizer(const SeparableProblem& p, double cap, double* best_value = nullptr) {
    const int n = p.vertex_count();
    std::vector<int> x(static_cast<std::size_t>(n), 0), best;
    double best_obj = std::numeric_limits<double>::infinity();
    while (true) {
        if (reference_budget(p, x) <= cap) {
            double obj = reference_objective(p, x);
            if (obj < best_obj) {
                best_obj = obj;
                best = x;
            }
        }
        int v = n - 1;
        while (v >= 0 && x[static_cast<std::size_t>(v)] == p.q()) x[static_cast<std::size_t>(v--)] = 0;
        if (v < 0) break;
        ++x[static_cast<std::size_t>(v)];
    }
    if (best_value) *best_value = best_obj;
    return best;
}

/// k-optimality for k = 2: no feasible point within L1 distance 2 is better
/// by more than tol.
inline bool reference_two_optimal(const SeparableProblem& p, const std::vector<int>& x, double cap,
                                  double tol = 1e-9) {
    const int n = p.vertex_count();
    const double base = reference_objective(p, x);
    auto better = [&](const std::vector<int>& y) {
        for (int v : y)
            if (v < 0 || v > p.q()) return false;
        return reference_budget(p, y) <= cap && reference_objective(p, y) < base - tol;
    };
    for (int u = 0; u < n; ++u) {
        for (int d : {-2, -1, 1, 2}) {
            std::vector<int> y = x;
            y[static_cast<std::size_t>(u)] += d;
            if (better(y)) return false;
        }
        for (int w = u + 1; w < n; ++w)
            for (int du : {-1, 1})
                for (int dw : {-1, 1}) {
                    std::vector<int> y = x;
                    y[static_cast<std::size_t>(u)] += du;
                    y[static_cast<std::size_t>(w)] += dw;
                    if (better(y)) return false;
                }
    }
    return true;
}

}  // namespace gtv::testing
