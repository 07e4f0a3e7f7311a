#include "graver_tv/forest_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gtv {

namespace {

// Union-find over vertex ids, used only by the invariant checker.
struct Components {
    std::vector<int> parent;
    explicit Components(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int v) {
        while (parent[static_cast<std::size_t>(v)] != v) {
            parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
            v = parent[static_cast<std::size_t>(v)];
        }
        return v;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[static_cast<std::size_t>(a)] = b;
        return true;
    }
};

ForestBasis singleton_basis(const Graph& g) {
    ForestBasis b;
    auto n = static_cast<std::size_t>(g.vertex_count());
    b.edge_status.assign(static_cast<std::size_t>(g.edge_count()), EdgeStatus::plus_basic);
    b.is_root.assign(n, 1);
    b.root_bound.assign(n, Bound::lower);
    b.delta_x.assign(n, 0);
    b.rebuild(g);
    return b;
}

// H_v(m + step) - H_v(m) for step = +-1, continuing the end slopes outside
// the table.
double budget_step(const ConvexTable& h, int m, int step) { return step > 0 ? h.forward(m) : h.backward(m); }

}  // namespace

int ForestBasis::root_count() const {
    return static_cast<int>(std::count(is_root.begin(), is_root.end(), char{1}));
}

int ForestBasis::tree_edge_count() const {
    return static_cast<int>(std::count(edge_status.begin(), edge_status.end(), EdgeStatus::tree));
}

void ForestBasis::rebuild(const Graph& g) {
    const auto n = static_cast<std::size_t>(g.vertex_count());
    parent_edge.assign(n, std::nullopt);
    order.clear();
    order.reserve(n);
    std::vector<char> seen(n, 0);
    for (VertexId r = 0; r < g.vertex_count(); ++r) {
        if (!is_root[static_cast<std::size_t>(r)] || seen[static_cast<std::size_t>(r)]) continue;
        std::size_t head = order.size();
        order.push_back(r);
        seen[static_cast<std::size_t>(r)] = 1;
        while (head < order.size()) {
            VertexId v = order[head++];
            auto walk = [&](EdgeId e) {
                if (edge_status[static_cast<std::size_t>(e)] != EdgeStatus::tree) return;
                VertexId w = g.other_end(e, v);
                if (seen[static_cast<std::size_t>(w)]) return;
                seen[static_cast<std::size_t>(w)] = 1;
                parent_edge[static_cast<std::size_t>(w)] = e;
                order.push_back(w);
            };
            for (EdgeId e : g.out_edges(v)) walk(e);
            for (EdgeId e : g.in_edges(v)) walk(e);
        }
    }
}

ForestBasis init_basis(const Graph& g, Rng& rng) {
    ForestBasis b = singleton_basis(g);
    for (auto& status : b.edge_status) status = rng.coin() ? EdgeStatus::minus_basic : EdgeStatus::plus_basic;
    return b;
}

ForestBasis init_basis_deterministic(const Graph& g) { return singleton_basis(g); }

std::string VariableId::describe(const Graph& g) const {
    if (is_vertex(g)) return "dx[" + std::to_string(value) + "]";
    return std::string(is_plus(g) ? "da+[" : "da-[") + std::to_string(edge(g)) + "]";
}

SubproblemContext::SubproblemContext(const SeparableProblem& p, std::vector<int> point, Direction direction)
    : problem(&p), x(std::move(point)), costs(incremental_costs(p, x, direction)) {}

int basic_edge_value(const ForestBasis& basis, const SubproblemContext& ctx, EdgeId e) {
    const Edge& ed = ctx.problem->graph().edge(e);
    int diff = ctx.sign() *
               (basis.delta_x[static_cast<std::size_t>(ed.tail)] - basis.delta_x[static_cast<std::size_t>(ed.head)]);
    switch (basis.edge_status[static_cast<std::size_t>(e)]) {
        case EdgeStatus::plus_basic: return diff;
        case EdgeStatus::minus_basic: return -diff;
        case EdgeStatus::tree: return 0;
    }
    return 0;
}

double lp_objective(const ForestBasis& basis, const SubproblemContext& ctx) {
    double total = 0.0;
    for (std::size_t v = 0; v < basis.delta_x.size(); ++v) total += ctx.costs.node_delta[v] * basis.delta_x[v];
    for (EdgeId e = 0; e < ctx.problem->edge_count(); ++e) {
        auto i = static_cast<std::size_t>(e);
        if (basis.edge_status[i] == EdgeStatus::tree) continue;
        double c = basis.edge_status[i] == EdgeStatus::plus_basic ? ctx.costs.edge_plus_delta[i]
                                                                  : ctx.costs.edge_minus_delta[i];
        total += c * basic_edge_value(basis, ctx, e);
    }
    return total;
}

std::vector<PivotCandidate> candidate_moves(const ForestBasis& basis, const SubproblemContext& ctx,
                                            const CandidateOptions& options) {
    const SeparableProblem& problem = *ctx.problem;
    const Graph& g = problem.graph();
    const auto n = static_cast<std::size_t>(g.vertex_count());
    const int s = ctx.sign();
    const auto& costs = ctx.costs;

    // Per-vertex terms for a +1 dx shift; subtree sums give any shift.
    std::vector<double> cost(n), dh_up(n), dh_down(n);
    std::vector<int> pinned(n);
    for (std::size_t v = 0; v < n; ++v) {
        cost[v] = costs.node_delta[v];
        int master = ctx.x[v] + s * basis.delta_x[v];
        const ConvexTable& h = problem.budget_cost(static_cast<VertexId>(v));
        dh_up[v] = budget_step(h, master, s);
        dh_down[v] = budget_step(h, master, -s);
        pinned[v] = ctx.upper(static_cast<VertexId>(v)) == 0 ? 1 : 0;
    }
    // A non-tree edge's basic side moves by +-s per unit change of
    // dx_tail - dx_head; both endpoints shifting together cancels.
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        auto i = static_cast<std::size_t>(e);
        if (basis.edge_status[i] == EdgeStatus::tree) continue;
        double k = basis.edge_status[i] == EdgeStatus::plus_basic ? s * costs.edge_plus_delta[i]
                                                                  : -s * costs.edge_minus_delta[i];
        const Edge& ed = g.edge(e);
        cost[static_cast<std::size_t>(ed.tail)] += k;
        cost[static_cast<std::size_t>(ed.head)] -= k;
    }
    for (std::size_t i = basis.order.size(); i-- > 0;) {
        VertexId v = basis.order[i];
        const auto& pe = basis.parent_edge[static_cast<std::size_t>(v)];
        if (!pe) continue;
        auto p = static_cast<std::size_t>(g.other_end(*pe, v));
        auto vi = static_cast<std::size_t>(v);
        cost[p] += cost[vi];
        dh_up[p] += dh_up[vi];
        dh_down[p] += dh_down[vi];
        pinned[p] += pinned[vi];
    }

    std::vector<PivotCandidate> out;
    auto consider = [&](VariableId var, VertexId sub, int shift, double entering_cost) {
        auto si = static_cast<std::size_t>(sub);
        int value = basis.delta_x[si];
        bool admissible = shift > 0 ? (value == 0 && pinned[si] == 0) : value == 1;
        if (!admissible && !options.include_bound_blocked) return;
        double rc = entering_cost + shift * cost[si];
        if (options.require_improving && !(rc < -options.tolerance)) return;
        double dh = shift > 0 ? dh_up[si] : dh_down[si];
        if (options.check_budget && !problem.within_budget(options.current_budget + dh)) return;
        PivotCandidate c;
        c.entering = var;
        c.subtree_root = sub;
        c.shift = shift;
        c.reduced_cost = rc;
        c.delta_h = dh;
        c.basis_version = basis.version;
        out.push_back(std::move(c));
    };

    for (VertexId r = 0; r < g.vertex_count(); ++r) {
        if (!basis.is_root[static_cast<std::size_t>(r)] || ctx.upper(r) == 0) continue;
        int shift = basis.delta_x[static_cast<std::size_t>(r)] == 0 ? 1 : -1;
        consider(VariableId::vertex(r), r, shift, 0.0);
    }
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        if (basis.edge_status[static_cast<std::size_t>(e)] != EdgeStatus::tree) continue;
        const Edge& ed = g.edge(e);
        VertexId child = basis.parent_edge[static_cast<std::size_t>(ed.head)] == e ? ed.head : ed.tail;
        for (bool plus : {true, false}) {
            int d = plus ? s : -s;  // change of dx_tail - dx_head
            int shift = child == ed.tail ? d : -d;
            double c = plus ? costs.edge_plus_delta[static_cast<std::size_t>(e)]
                            : costs.edge_minus_delta[static_cast<std::size_t>(e)];
            consider(plus ? VariableId::plus(g, e) : VariableId::minus(g, e), child, shift, c);
        }
    }
    if (options.materialize_subtrees)
        for (auto& c : out) materialize_subtree(g, basis, c);
    return out;
}

void materialize_subtree(const Graph& g, const ForestBasis& basis, PivotCandidate& candidate) {
    VertexSet s(g.vertex_count());
    std::vector<VertexId> stack{candidate.subtree_root};
    s.insert(candidate.subtree_root);
    while (!stack.empty()) {
        VertexId v = stack.back();
        stack.pop_back();
        auto walk = [&](EdgeId e) {
            if (basis.edge_status[static_cast<std::size_t>(e)] != EdgeStatus::tree) return;
            VertexId w = g.other_end(e, v);
            if (basis.parent_edge[static_cast<std::size_t>(w)] != e || s.contains(w)) return;
            s.insert(w);
            stack.push_back(w);
        };
        for (EdgeId e : g.out_edges(v)) walk(e);
        for (EdgeId e : g.in_edges(v)) walk(e);
    }
    candidate.subtree = std::move(s);
}

double weight(double delta_h, double p) {
    if (p < 0.0) throw std::invalid_argument("weight: p must be nonnegative");
    if (delta_h <= 0.0) return 1.0;
    return std::pow(1.0 + delta_h, p);
}

const PivotCandidate& select_entering(const std::vector<PivotCandidate>& candidates, double p, Rng& rng) {
    if (candidates.empty()) throw std::invalid_argument("select_entering: no candidates");
    double best = 0.0;
    std::vector<std::size_t> ties;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        double score = candidates[i].reduced_cost / weight(candidates[i].delta_h, p);
        if (ties.empty() || score < best) {
            best = score;
            ties.assign(1, i);
        } else if (score == best) {
            ties.push_back(i);
        }
    }
    std::size_t pick = ties.size() == 1 ? ties[0] : ties[rng.below(ties.size())];
    return candidates[pick];
}

PivotResult pivot(ForestBasis& basis, const SubproblemContext& ctx, const PivotCandidate& entering, ExitRule rule,
                  Rng* rng) {
    const Graph& g = ctx.problem->graph();
    if (entering.basis_version != basis.version)
        throw StaleCandidate("pivot: candidate was computed for basis version " +
                             std::to_string(entering.basis_version) + ", basis is at " +
                             std::to_string(basis.version));
    PivotCandidate cand = entering;
    if (cand.subtree.universe() != g.vertex_count() || cand.subtree.empty()) materialize_subtree(g, basis, cand);
    const VertexSet& shifted = cand.subtree;
    const int sigma = cand.shift;
    const int s = ctx.sign();
    const bool root_entering = cand.entering.is_vertex(g);

    std::vector<VariableId> at_zero, at_one;
    const auto members = shifted.members();
    for (VertexId w : members) {
        if (root_entering && w == cand.entering.value) continue;
        int dx = basis.delta_x[static_cast<std::size_t>(w)];
        int room = sigma > 0 ? ctx.upper(w) - dx : dx;
        if (room <= 0) at_zero.push_back(VariableId::vertex(w));
        else at_one.push_back(VariableId::vertex(w));
    }
    if (root_entering) at_one.push_back(cand.entering);
    for (VertexId w : members) {
        auto crossing = [&](EdgeId f, bool w_is_tail) {
            auto fi = static_cast<std::size_t>(f);
            if (basis.edge_status[fi] == EdgeStatus::tree) return;
            if (shifted.contains(g.other_end(f, w))) return;
            int d = w_is_tail ? sigma : -sigma;
            bool plus = basis.edge_status[fi] == EdgeStatus::plus_basic;
            int change = plus ? s * d : -s * d;
            if (change >= 0) return;
            VariableId id = plus ? VariableId::plus(g, f) : VariableId::minus(g, f);
            (basic_edge_value(basis, ctx, f) == 0 ? at_zero : at_one).push_back(id);
        };
        for (EdgeId f : g.out_edges(w)) crossing(f, true);
        for (EdgeId f : g.in_edges(w)) crossing(f, false);
    }

    PivotResult result;
    result.nondegenerate = at_zero.empty();
    const auto& blockers = result.nondegenerate ? at_one : at_zero;
    if (blockers.empty()) throw std::logic_error("pivot: unbounded step");
    if (rule == ExitRule::random) {
        if (!rng) throw std::invalid_argument("pivot: random exit rule needs an rng");
        result.exiting = blockers[rng->below(blockers.size())];
    } else {
        result.exiting = *std::min_element(blockers.begin(), blockers.end());
    }
    result.shifted = shifted;
    result.shift = sigma;

    if (result.nondegenerate)
        for (VertexId w : members) basis.delta_x[static_cast<std::size_t>(w)] += sigma;

    auto mark_root = [&](VertexId w) {
        basis.is_root[static_cast<std::size_t>(w)] = 1;
        basis.root_bound[static_cast<std::size_t>(w)] =
            basis.delta_x[static_cast<std::size_t>(w)] == 1 ? Bound::upper : Bound::lower;
    };
    const VariableId out = result.exiting;
    if (root_entering) {
        VertexId r = cand.entering.value;
        if (out == cand.entering) {
            mark_root(r);  // bound flip
        } else {
            basis.is_root[static_cast<std::size_t>(r)] = 0;
            if (out.is_vertex(g)) mark_root(out.value);
            else basis.edge_status[static_cast<std::size_t>(out.edge(g))] = EdgeStatus::tree;
        }
    } else {
        EdgeId e = cand.entering.edge(g);
        basis.edge_status[static_cast<std::size_t>(e)] =
            cand.entering.is_plus(g) ? EdgeStatus::plus_basic : EdgeStatus::minus_basic;
        if (out.is_vertex(g)) mark_root(out.value);
        else basis.edge_status[static_cast<std::size_t>(out.edge(g))] = EdgeStatus::tree;
    }
    basis.rebuild(g);
    ++basis.version;
    return result;
}

InvariantReport check_basis_invariants(const ForestBasis& basis, const SubproblemContext& ctx) {
    const Graph& g = ctx.problem->graph();
    const int n = g.vertex_count();
    const int m = g.edge_count();
    InvariantReport rep;
    auto fail = [&](bool& flag, const std::string& why) {
        flag = false;
        if (rep.detail.empty()) rep.detail = why;
    };

    if (static_cast<int>(basis.edge_status.size()) != m || static_cast<int>(basis.delta_x.size()) != n ||
        static_cast<int>(basis.is_root.size()) != n) {
        fail(rep.counting_identity, "basis arrays have wrong sizes");
        return rep;
    }
    int nonbasic_sides = 0;
    for (EdgeId e = 0; e < m; ++e) {
        switch (basis.edge_status[static_cast<std::size_t>(e)]) {
            case EdgeStatus::tree: nonbasic_sides += 2; break;
            case EdgeStatus::plus_basic:
            case EdgeStatus::minus_basic: nonbasic_sides += 1; break;
            default: fail(rep.edge_cover, "edge " + std::to_string(e) + " has an invalid status");
        }
    }
    if (basis.root_count() + nonbasic_sides != n + m)
        fail(rep.counting_identity, "roots + nonbasic edge sides = " + std::to_string(basis.root_count() + nonbasic_sides) +
                                        ", expected " + std::to_string(n + m));

    Components comp(n);
    for (EdgeId e = 0; e < m; ++e) {
        if (basis.edge_status[static_cast<std::size_t>(e)] != EdgeStatus::tree) continue;
        const Edge& ed = g.edge(e);
        if (!comp.unite(ed.tail, ed.head)) fail(rep.spanning_forest, "tree edges close a cycle at edge " + std::to_string(e));
        if (basis.delta_x[static_cast<std::size_t>(ed.tail)] != basis.delta_x[static_cast<std::size_t>(ed.head)])
            fail(rep.delta_x_consistent, "dx differs across tree edge " + std::to_string(e));
    }
    std::vector<int> roots_in(static_cast<std::size_t>(n), 0);
    for (VertexId v = 0; v < n; ++v)
        if (basis.is_root[static_cast<std::size_t>(v)]) ++roots_in[static_cast<std::size_t>(comp.find(v))];
    for (VertexId v = 0; v < n; ++v)
        if (comp.find(v) == v && roots_in[static_cast<std::size_t>(v)] != 1)
            fail(rep.one_root_per_tree, "tree containing vertex " + std::to_string(v) + " has " +
                                            std::to_string(roots_in[static_cast<std::size_t>(v)]) + " roots");
    if (static_cast<int>(basis.order.size()) != n)
        fail(rep.one_root_per_tree, "parent structure does not reach every vertex");

    for (VertexId v = 0; v < n; ++v) {
        auto vi = static_cast<std::size_t>(v);
        int dx = basis.delta_x[vi];
        if (dx < 0 || dx > ctx.upper(v)) fail(rep.delta_x_consistent, "dx[" + std::to_string(v) + "] out of bounds");
        if (basis.is_root[vi] && dx != (basis.root_bound[vi] == Bound::upper ? 1 : 0))
            fail(rep.delta_x_consistent, "root " + std::to_string(v) + " is not at its recorded bound");
    }
    for (EdgeId e = 0; e < m; ++e)
        if (basis.edge_status[static_cast<std::size_t>(e)] != EdgeStatus::tree && basic_edge_value(basis, ctx, e) < 0)
            fail(rep.orientation_feasible, "basic side of edge " + std::to_string(e) + " is negative");
    return rep;
}

SampleResult sample_graver_move(const SeparableProblem& problem, const Assignment& x, Direction direction,
                                const SamplerConfig& config, Rng& rng) {
    const Graph& g = problem.graph();
    SubproblemContext ctx(problem, x.x(), direction);
    ForestBasis basis = init_basis(g, rng);
    const std::int64_t cap =
        config.max_pivots_per_call > 0 ? config.max_pivots_per_call : 50 * std::int64_t{g.vertex_count() + g.edge_count()};

    CandidateOptions opts;
    opts.current_budget = x.budget();
    opts.check_budget = true;
    opts.require_improving = true;
    opts.tolerance = config.improvement_tolerance;
    opts.materialize_subtrees = false;

    SampleResult res;
    while (res.pivots < cap) {
        if (config.deadline && std::chrono::steady_clock::now() >= *config.deadline) {
            res.timed_out = true;
            return res;
        }
        auto candidates = candidate_moves(basis, ctx, opts);
        if (candidates.empty()) return res;
        PivotCandidate chosen = select_entering(candidates, config.p, rng);
        materialize_subtree(g, basis, chosen);
        PivotResult pr = pivot(basis, ctx, chosen, ExitRule::random, &rng);
        ++res.pivots;
        if (config.trace) config.trace({res.pivots, chosen.entering, !pr.nondegenerate, chosen.reduced_cost, chosen.delta_h});
        if (!pr.nondegenerate) continue;

        GraverMove move{pr.shifted, sign_of(direction) * pr.shift};
        std::vector<int> y = x.x();
        for (VertexId v : move.support.members()) y[static_cast<std::size_t>(v)] += move.sign;
        for (int yv : y)
            if (yv < 0 || yv > problem.q()) throw std::logic_error("sample_graver_move: sampled move leaves the box");
        Evaluation after = evaluate(problem, y);
        if (!problem.within_budget(after.budget))
            throw std::logic_error("sample_graver_move: sampled move violates the budget");
        if (!(after.objective < x.objective() - config.improvement_tolerance)) return res;
        res.move = std::move(move);
        res.reduced_cost = chosen.reduced_cost;
        res.predicted_delta_h = chosen.delta_h;
        return res;
    }
    res.pivot_cap_hit = true;
    return res;
}

ExactSubproblemResult solve_subproblem_exact(const SeparableProblem& problem, std::span<const int> x,
                                             Direction direction, std::int64_t max_pivots) {
    const Graph& g = problem.graph();
    SubproblemContext ctx(problem, std::vector<int>(x.begin(), x.end()), direction);
    ForestBasis basis = init_basis_deterministic(g);
    const std::int64_t size = g.vertex_count() + g.edge_count();
    const std::int64_t cap = max_pivots > 0 ? max_pivots : 1000 * size + 1000;

    CandidateOptions opts;
    opts.check_budget = false;
    opts.require_improving = true;
    opts.include_bound_blocked = true;
    opts.materialize_subtrees = false;

    ExactSubproblemResult res;
    std::int64_t degenerate_run = 0;
    for (;;) {
        auto candidates = candidate_moves(basis, ctx, opts);
        if (candidates.empty()) break;
        if (res.pivots >= cap)
            throw PivotCapExceeded("solve_subproblem_exact: " + std::to_string(cap) + " pivots without reaching optimality");
        const bool bland = degenerate_run > size;
        const PivotCandidate* chosen = &candidates.front();
        for (const auto& c : candidates) {
            if (bland) {
                if (c.entering < chosen->entering) chosen = &c;
            } else if (c.reduced_cost < chosen->reduced_cost ||
                       (c.reduced_cost == chosen->reduced_cost && c.entering < chosen->entering)) {
                chosen = &c;
            }
        }
        PivotResult pr = pivot(basis, ctx, *chosen, ExitRule::lowest_id, nullptr);
        ++res.pivots;
        degenerate_run = pr.nondegenerate ? 0 : degenerate_run + 1;
    }
    res.delta_x = basis.delta_x;
    res.lp_objective = lp_objective(basis, ctx);
    return res;
}

}  // namespace gtv
