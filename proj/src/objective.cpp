#include "graver_tv/objective.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace gtv {

namespace {

constexpr double kExactLimit = 1125899906842624.0;  // 2^50

bool integral_small(double v) {
    return std::isfinite(v) && std::floor(v) == v && std::fabs(v) <= kExactLimit;
}

}  // namespace

ConvexTable::ConvexTable(int lo, std::vector<double> values) : lo_(lo), values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("ConvexTable: empty value list");
    exact_ = true;
    for (double v : values_) {
        if (!std::isfinite(v)) throw std::invalid_argument("ConvexTable: non-finite value");
        if (!integral_small(v)) exact_ = false;
    }
    double magnitude = 1.0;
    for (double v : values_) magnitude = std::max(magnitude, std::fabs(v));
    const double eps = exact_ ? 0.0 : kFloatConvexityTolerance * magnitude;
    for (std::size_t t = 1; t + 1 < values_.size(); ++t) {
        double second = values_[t + 1] - 2.0 * values_[t] + values_[t - 1];
        if (second < -eps)
            throw std::invalid_argument("ConvexTable: not convex at t=" + std::to_string(lo_ + static_cast<int>(t)) +
                                        " (second difference " + std::to_string(second) + ")");
    }
}

ConvexTable ConvexTable::quadratic(int lo, int hi, double center, double scale) {
    std::vector<double> v;
    for (int t = lo; t <= hi; ++t) v.push_back(scale * (t - center) * (t - center));
    return ConvexTable(lo, std::move(v));
}

ConvexTable ConvexTable::linear(int lo, int hi, double slope, double offset) {
    std::vector<double> v;
    for (int t = lo; t <= hi; ++t) v.push_back(offset + slope * t);
    return ConvexTable(lo, std::move(v));
}

ConvexTable ConvexTable::absolute(int lo, int hi, double scale, double center) {
    std::vector<double> v;
    for (int t = lo; t <= hi; ++t) v.push_back(scale * std::fabs(t - center));
    return ConvexTable(lo, std::move(v));
}

ConvexTable ConvexTable::from_function(int lo, int hi, double (*fn)(int)) {
    std::vector<double> v;
    for (int t = lo; t <= hi; ++t) v.push_back(fn(t));
    return ConvexTable(lo, std::move(v));
}

double ConvexTable::slope_at(int left) const {
    if (values_.size() < 2) return 0.0;
    int last_left = hi() - 1;
    if (left < lo_) left = lo_;
    if (left > last_left) left = last_left;
    auto i = static_cast<std::size_t>(left - lo_);
    return values_[i + 1] - values_[i];
}

double ConvexTable::forward(int t) const {
    if (t >= lo_ && t + 1 <= hi()) return values_[static_cast<std::size_t>(t + 1 - lo_)] - values_[static_cast<std::size_t>(t - lo_)];
    return slope_at(t);
}

double ConvexTable::backward(int t) const {
    if (t - 1 >= lo_ && t <= hi()) return values_[static_cast<std::size_t>(t - 1 - lo_)] - values_[static_cast<std::size_t>(t - lo_)];
    return -slope_at(t - 1);
}

int ConvexTable::argmin() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values_.size(); ++i)
        if (values_[i] < values_[best]) best = i;
    return lo_ + static_cast<int>(best);
}

ConvexTable ConvexTable::plus(const ConvexTable& other, double weight) const {
    if (other.lo_ != lo_ || other.values_.size() != values_.size())
        throw std::invalid_argument("ConvexTable::plus: domain mismatch");
    std::vector<double> v(values_);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += weight * other.values_[i];
    return ConvexTable(lo_, std::move(v));
}

SeparableProblem::SeparableProblem(Graph graph, int q, std::vector<ConvexTable> node_cost,
                                   std::vector<ConvexTable> edge_cost, std::vector<ConvexTable> budget_cost,
                                   double budget_cap)
    : graph_(std::move(graph)), q_(q), node_cost_(std::move(node_cost)), edge_cost_(std::move(edge_cost)),
      budget_cost_(std::move(budget_cost)), budget_cap_(budget_cap), exact_(true) {
    if (q_ < 0) throw std::invalid_argument("SeparableProblem: q must be nonnegative");
    if (std::isnan(budget_cap_) || budget_cap_ < 0.0)
        throw std::invalid_argument("SeparableProblem: budget cap must be nonnegative");
    auto n = static_cast<std::size_t>(graph_.vertex_count());
    auto m = static_cast<std::size_t>(graph_.edge_count());
    if (node_cost_.size() != n) throw std::invalid_argument("SeparableProblem: node cost count != |V|");
    if (budget_cost_.size() != n) throw std::invalid_argument("SeparableProblem: budget cost count != |V|");
    if (edge_cost_.size() != m) throw std::invalid_argument("SeparableProblem: edge cost count != |E|");
    for (std::size_t v = 0; v < n; ++v) {
        if (node_cost_[v].lo() != 0 || node_cost_[v].hi() != q_)
            throw std::invalid_argument("SeparableProblem: node cost " + std::to_string(v) + " must span [0,q]");
        if (budget_cost_[v].lo() != 0 || budget_cost_[v].hi() != q_)
            throw std::invalid_argument("SeparableProblem: budget cost " + std::to_string(v) + " must span [0,q]");
        exact_ = exact_ && node_cost_[v].exact() && budget_cost_[v].exact();
    }
    for (std::size_t e = 0; e < m; ++e) {
        if (edge_cost_[e].lo() != -q_ || edge_cost_[e].hi() != q_)
            throw std::invalid_argument("SeparableProblem: edge cost " + std::to_string(e) + " must span [-q,q]");
        exact_ = exact_ && edge_cost_[e].exact();
    }
}

bool SeparableProblem::within_budget(double budget) const {
    if (std::isinf(budget_cap_)) return true;
    return budget <= budget_cap_ + 1e-9 * std::max(1.0, std::fabs(budget_cap_));
}

SeparableProblem SeparableProblem::with_budget_cap(double cap) const {
    SeparableProblem p = *this;
    if (std::isnan(cap) || cap < 0.0) throw std::invalid_argument("SeparableProblem: budget cap must be nonnegative");
    p.budget_cap_ = cap;
    return p;
}

SeparableProblem SeparableProblem::penalized(double weight) const {
    std::vector<ConvexTable> nodes;
    nodes.reserve(node_cost_.size());
    for (std::size_t v = 0; v < node_cost_.size(); ++v) nodes.push_back(node_cost_[v].plus(budget_cost_[v], weight));
    return SeparableProblem(graph_, q_, std::move(nodes), edge_cost_, budget_cost_,
                            std::numeric_limits<double>::infinity());
}

SeparableProblem SeparableProblem::unconstrained() const {
    return with_budget_cap(std::numeric_limits<double>::infinity());
}

Evaluation evaluate(const SeparableProblem& problem, std::span<const int> x) {
    if (static_cast<int>(x.size()) != problem.vertex_count())
        throw std::invalid_argument("evaluate: assignment length != |V|");
    Evaluation ev{0.0, 0.0};
    for (VertexId v = 0; v < problem.vertex_count(); ++v) {
        int xv = x[static_cast<std::size_t>(v)];
        if (xv < 0 || xv > problem.q())
            throw std::out_of_range("evaluate: x[" + std::to_string(v) + "]=" + std::to_string(xv) + " outside [0,q]");
        ev.objective += problem.node_cost(v)(xv);
        ev.budget += problem.budget_cost(v)(xv);
    }
    const auto& edges = problem.graph().edges();
    for (EdgeId e = 0; e < problem.edge_count(); ++e) {
        const Edge& ed = edges[static_cast<std::size_t>(e)];
        ev.objective += problem.edge_cost(e)(x[static_cast<std::size_t>(ed.tail)] - x[static_cast<std::size_t>(ed.head)]);
    }
    return ev;
}

Evaluation evaluate(const SeparableProblem& problem, const Assignment& x) { return evaluate(problem, x.x()); }

Evaluation delta_evaluate(const SeparableProblem& problem, const Assignment& x,
                          std::span<const std::pair<VertexId, int>> changes) {
    if (changes.size() > 2) throw std::invalid_argument("delta_evaluate: at most two changed vertices");
    if (changes.size() == 2 && changes[0].first == changes[1].first)
        throw std::invalid_argument("delta_evaluate: vertex listed twice");
    const auto& cur = x.x();
    auto value_after = [&](VertexId v) {
        for (const auto& [w, val] : changes)
            if (w == v) return val;
        return cur[static_cast<std::size_t>(v)];
    };
    Evaluation d{0.0, 0.0};
    const Graph& g = problem.graph();
    for (std::size_t i = 0; i < changes.size(); ++i) {
        auto [v, nv] = changes[i];
        if (v < 0 || v >= problem.vertex_count()) throw std::out_of_range("delta_evaluate: vertex out of range");
        if (nv < 0 || nv > problem.q()) throw std::out_of_range("delta_evaluate: new value outside [0,q]");
        int ov = cur[static_cast<std::size_t>(v)];
        d.objective += problem.node_cost(v)(nv) - problem.node_cost(v)(ov);
        d.budget += problem.budget_cost(v)(nv) - problem.budget_cost(v)(ov);
        auto edge_term = [&](EdgeId e) {
            const Edge& ed = g.edge(e);
            // An edge between two changed vertices is counted once, from the first.
            VertexId other = ed.tail == v ? ed.head : ed.tail;
            if (i == 1 && other == changes[0].first) return;
            int before = cur[static_cast<std::size_t>(ed.tail)] - cur[static_cast<std::size_t>(ed.head)];
            int after = value_after(ed.tail) - value_after(ed.head);
            d.objective += problem.edge_cost(e)(after) - problem.edge_cost(e)(before);
        };
        for (EdgeId e : g.out_edges(v)) edge_term(e);
        for (EdgeId e : g.in_edges(v)) edge_term(e);
    }
    return d;
}

bool is_feasible(const SeparableProblem& problem, std::span<const int> x) {
    if (static_cast<int>(x.size()) != problem.vertex_count()) return false;
    for (int xv : x)
        if (xv < 0 || xv > problem.q()) return false;
    return problem.within_budget(evaluate(problem, x).budget);
}

Assignment::Assignment(const SeparableProblem& problem, std::vector<int> x) : x_(std::move(x)) { refresh(problem); }

Assignment Assignment::zeros(const SeparableProblem& problem) {
    return Assignment(problem, std::vector<int>(static_cast<std::size_t>(problem.vertex_count()), 0));
}

void Assignment::refresh(const SeparableProblem& problem) {
    Evaluation ev = evaluate(problem, x_);
    objective_ = ev.objective;
    budget_ = ev.budget;
}

void Assignment::apply(const SeparableProblem& problem, std::span<const std::pair<VertexId, int>> changes) {
    Evaluation d = delta_evaluate(problem, *this, changes);
    for (const auto& [v, val] : changes) x_[static_cast<std::size_t>(v)] = val;
    if (problem.exact()) {
        objective_ += d.objective;
        budget_ += d.budget;
    } else {
        refresh(problem);
    }
}

void Assignment::shift(const SeparableProblem& problem, const VertexSet& support, int sign) {
    for (VertexId v : support.members()) {
        int nv = x_[static_cast<std::size_t>(v)] + sign;
        if (nv < 0 || nv > problem.q()) throw std::out_of_range("Assignment::shift: move leaves [0,q]");
        x_[static_cast<std::size_t>(v)] = nv;
    }
    refresh(problem);
}

const char* to_string(Direction d) { return d == Direction::up ? "up" : "down"; }

IncrementalCosts incremental_costs(const SeparableProblem& problem, std::span<const int> x, Direction direction) {
    IncrementalCosts c;
    c.direction = direction;
    auto n = static_cast<std::size_t>(problem.vertex_count());
    auto m = static_cast<std::size_t>(problem.edge_count());
    c.node_delta.resize(n);
    c.fixed_mask.resize(n);
    c.edge_plus_delta.resize(m);
    c.edge_minus_delta.resize(m);
    for (std::size_t v = 0; v < n; ++v) {
        const auto& f = problem.node_cost(static_cast<VertexId>(v));
        if (direction == Direction::up) {
            c.node_delta[v] = f.forward(x[v]);
            c.fixed_mask[v] = x[v] >= problem.q();
        } else {
            c.node_delta[v] = f.backward(x[v]);
            c.fixed_mask[v] = x[v] <= 0;
        }
    }
    for (std::size_t e = 0; e < m; ++e) {
        const Edge& ed = problem.graph().edge(static_cast<EdgeId>(e));
        int a = x[static_cast<std::size_t>(ed.tail)] - x[static_cast<std::size_t>(ed.head)];
        const auto& gfun = problem.edge_cost(static_cast<EdgeId>(e));
        c.edge_plus_delta[e] = gfun.forward(a);
        c.edge_minus_delta[e] = gfun.backward(a);
    }
    return c;
}

}  // namespace gtv
