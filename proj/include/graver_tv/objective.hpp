#pragma once

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "graver_tv/graph.hpp"

namespace gtv {

/// A univariate convex function tabulated on the integer range [lo, hi].
class ConvexTable {
public:
    static constexpr double kFloatConvexityTolerance = 1e-9;

    ConvexTable() = default;
    /// Throws std::invalid_argument if the second differences are negative
    /// (beyond kFloatConvexityTolerance times the largest magnitude for
    /// non-integral tables, exactly for integral ones).
    ConvexTable(int lo, std::vector<double> values);

    static ConvexTable quadratic(int lo, int hi, double center, double scale = 1.0);
    static ConvexTable linear(int lo, int hi, double slope, double offset = 0.0);
    static ConvexTable absolute(int lo, int hi, double scale = 1.0, double center = 0.0);
    static ConvexTable from_function(int lo, int hi, double (*fn)(int));

    int lo() const { return lo_; }
    int hi() const { return lo_ + static_cast<int>(values_.size()) - 1; }
    const std::vector<double>& values() const { return values_; }

    /// True when every value is an integer small enough that sums of table
    /// values are exact in double arithmetic.
    bool exact() const { return exact_; }

    double operator()(int t) const {
        if (t < lo_ || t > hi()) throw std::out_of_range("ConvexTable: argument outside tabulated domain");
        return values_[static_cast<std::size_t>(t - lo_)];
    }

    /// f(t+1) - f(t); beyond the domain the last slope is continued.
    double forward(int t) const;
    /// f(t-1) - f(t); beyond the domain the first slope is continued.
    double backward(int t) const;

    /// Smallest argmin over the domain.
    int argmin() const;

    ConvexTable plus(const ConvexTable& other, double weight) const;

    bool operator==(const ConvexTable&) const = default;

private:
    double slope_at(int left) const;  // f(left+1) - f(left), clamped into the domain

    int lo_ = 0;
    std::vector<double> values_{0.0};
    bool exact_ = true;
};

/// min sum_v F_v(x_v) + sum_uv G_uv(x_u - x_v)  s.t.  sum_v H_v(x_v) <= cap,
/// x in {0..q}^V.
class SeparableProblem {
public:
    SeparableProblem(Graph graph, int q, std::vector<ConvexTable> node_cost,
                     std::vector<ConvexTable> edge_cost, std::vector<ConvexTable> budget_cost,
                     double budget_cap);

    const Graph& graph() const { return graph_; }
    int q() const { return q_; }
    int vertex_count() const { return graph_.vertex_count(); }
    int edge_count() const { return graph_.edge_count(); }
    double budget_cap() const { return budget_cap_; }

    const ConvexTable& node_cost(VertexId v) const { return node_cost_[static_cast<std::size_t>(v)]; }
    const ConvexTable& edge_cost(EdgeId e) const { return edge_cost_[static_cast<std::size_t>(e)]; }
    const ConvexTable& budget_cost(VertexId v) const { return budget_cost_[static_cast<std::size_t>(v)]; }
    const std::vector<ConvexTable>& node_costs() const { return node_cost_; }
    const std::vector<ConvexTable>& edge_costs() const { return edge_cost_; }
    const std::vector<ConvexTable>& budget_costs() const { return budget_cost_; }

    /// All tables integral, so objective and budget arithmetic is exact.
    bool exact() const { return exact_; }

    /// Budget comparison used everywhere feasibility is decided.
    bool within_budget(double budget) const;

    SeparableProblem with_budget_cap(double cap) const;
    /// Node costs replaced by F_v + weight * H_v, budget dropped (cap = +inf).
    SeparableProblem penalized(double weight) const;
    SeparableProblem unconstrained() const;

private:
    Graph graph_;
    int q_;
    std::vector<ConvexTable> node_cost_;
    std::vector<ConvexTable> edge_cost_;
    std::vector<ConvexTable> budget_cost_;
    double budget_cap_;
    bool exact_;
};

/// An integer point with cached objective and budget.
class Assignment {
public:
    Assignment() = default;
    Assignment(const SeparableProblem& problem, std::vector<int> x);
    static Assignment zeros(const SeparableProblem& problem);

    const std::vector<int>& x() const { return x_; }
    int operator[](VertexId v) const { return x_[static_cast<std::size_t>(v)]; }
    double objective() const { return objective_; }
    double budget() const { return budget_; }

    /// Applies a set of changes whose effect was computed by delta_evaluate.
    void apply(const SeparableProblem& problem, std::span<const std::pair<VertexId, int>> changes);
    /// x += sign * chi_S.
    void shift(const SeparableProblem& problem, const VertexSet& support, int sign);

    /// Recomputes the cached values from scratch.
    void refresh(const SeparableProblem& problem);

    bool operator==(const Assignment& other) const { return x_ == other.x_; }

private:
    std::vector<int> x_;
    double objective_ = 0.0;
    double budget_ = 0.0;
};

struct Evaluation {
    double objective;
    double budget;
};

Evaluation evaluate(const SeparableProblem& problem, std::span<const int> x);
Evaluation evaluate(const SeparableProblem& problem, const Assignment& x);

/// Change in (objective, budget) when the listed vertices take new values.
/// Only edges incident to changed vertices are visited.
Evaluation delta_evaluate(const SeparableProblem& problem, const Assignment& x,
                          std::span<const std::pair<VertexId, int>> changes);

bool is_feasible(const SeparableProblem& problem, std::span<const int> x);

enum class Direction { up, down };

inline int sign_of(Direction d) { return d == Direction::up ? 1 : -1; }
inline Direction opposite(Direction d) { return d == Direction::up ? Direction::down : Direction::up; }
const char* to_string(Direction d);

/// Cost coefficients of the up/down augmentation subproblem about a point.
struct IncrementalCosts {
    Direction direction = Direction::up;
    std::vector<double> node_delta;        // F_v(x_v +- 1) - F_v(x_v)
    std::vector<double> edge_plus_delta;   // G_uv(a+1) - G_uv(a), a = x_u - x_v
    std::vector<double> edge_minus_delta;  // G_uv(a-1) - G_uv(a)
    std::vector<char> fixed_mask;          // x_v already at the bound in this direction
};

IncrementalCosts incremental_costs(const SeparableProblem& problem, std::span<const int> x, Direction direction);

}  // namespace gtv
