#pragma once

// Primal simplex on the up/down augmentation LPs
//
//   min  sum_v c_v dx_v + sum_uv (c+_uv da+_uv + c-_uv da-_uv)
//   s.t. s (dx_u - dx_v) = da+_uv - da-_uv,   dx in [0,1] (0 when pinned),
//        da+, da- >= 0,
//
// with s = +1 for the up problem and -1 for the down problem. A basis is
// kept as a rooted spanning forest: tree edges have both da+ and da-
// nonbasic, every other edge has exactly one basic side, and every tree has
// a single root whose dx is nonbasic at a bound. Entering a variable shifts
// one subtree by +-1 in dx, so reduced costs and budget effects are subtree
// sums and every nondegenerate step is a connected +-chi_S move.

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "graver_tv/graph.hpp"
#include "graver_tv/graver_oracle.hpp"
#include "graver_tv/objective.hpp"
#include "graver_tv/rng.hpp"

namespace gtv {

enum class EdgeStatus : std::uint8_t { tree, plus_basic, minus_basic };
enum class Bound : std::uint8_t { lower, upper };

struct ForestBasis {
    std::vector<std::optional<EdgeId>> parent_edge;  // derived from the tree edges and roots
    std::vector<EdgeStatus> edge_status;
    std::vector<char> is_root;
    std::vector<Bound> root_bound;  // meaningful at roots only
    std::vector<int> delta_x;
    std::vector<VertexId> order;    // roots first, parents before children
    std::uint64_t version = 0;

    int root_count() const;
    int tree_edge_count() const;
    /// Recomputes parent_edge and order by walking tree edges from the roots.
    void rebuild(const Graph& g);
};

/// Singleton trees rooted at dx = 0; each edge's basic side drawn with
/// probability 1/2.
ForestBasis init_basis(const Graph& g, Rng& rng);
/// Same shape, every edge with da+ basic.
ForestBasis init_basis_deterministic(const Graph& g);

/// Variable ids: dx_v -> v, da+_e -> |V| + 2e, da-_e -> |V| + 2e + 1.
struct VariableId {
    int value;

    static VariableId vertex(VertexId v) { return {v}; }
    static VariableId plus(const Graph& g, EdgeId e) { return {g.vertex_count() + 2 * e}; }
    static VariableId minus(const Graph& g, EdgeId e) { return {g.vertex_count() + 2 * e + 1}; }

    bool is_vertex(const Graph& g) const { return value < g.vertex_count(); }
    EdgeId edge(const Graph& g) const { return (value - g.vertex_count()) / 2; }
    bool is_plus(const Graph& g) const { return !is_vertex(g) && (value - g.vertex_count()) % 2 == 0; }
    std::string describe(const Graph& g) const;

    bool operator==(const VariableId&) const = default;
    auto operator<=>(const VariableId&) const = default;
};

struct PivotCandidate {
    VariableId entering{0};
    VertexId subtree_root = -1;  // the subtree below this vertex shifts
    VertexSet subtree;           // filled when materialized
    int shift = 1;               // +-1 in dx
    double reduced_cost = 0.0;
    double delta_h = 0.0;
    std::uint64_t basis_version = 0;
};

/// Data the candidate scan needs besides the basis.
struct SubproblemContext {
    const SeparableProblem* problem = nullptr;
    std::vector<int> x;  // master point the subproblem is posed about
    IncrementalCosts costs;

    SubproblemContext(const SeparableProblem& p, std::vector<int> point, Direction direction);
    int sign() const { return sign_of(costs.direction); }
    int upper(VertexId v) const { return costs.fixed_mask[static_cast<std::size_t>(v)] ? 0 : 1; }
};

struct CandidateOptions {
    double current_budget = 0.0;
    bool check_budget = true;
    /// Keep only reduced_cost < -tolerance.
    bool require_improving = true;
    double tolerance = 1e-9;
    /// Also list moves that would push some dx past its bounds (they pivot
    /// degenerately); needed for LP optimality, excluded when sampling.
    bool include_bound_blocked = false;
    bool materialize_subtrees = true;
};

std::vector<PivotCandidate> candidate_moves(const ForestBasis& basis, const SubproblemContext& ctx,
                                            const CandidateOptions& options);

/// Fills candidate.subtree from candidate.subtree_root.
void materialize_subtree(const Graph& g, const ForestBasis& basis, PivotCandidate& candidate);

/// 1 when delta_h <= 0, (1 + delta_h)^p otherwise.
double weight(double delta_h, double p);

/// Minimizes reduced_cost / weight(delta_h, p); exact ties drawn uniformly.
const PivotCandidate& select_entering(const std::vector<PivotCandidate>& candidates, double p, Rng& rng);

class StaleCandidate : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

enum class ExitRule { random, lowest_id };

struct PivotResult {
    bool nondegenerate = false;
    VariableId exiting{0};
    VertexSet shifted;  // the subtree (moved only when nondegenerate)
    int shift = 0;      // in dx
};

PivotResult pivot(ForestBasis& basis, const SubproblemContext& ctx, const PivotCandidate& entering, ExitRule rule,
                  Rng* rng);

struct InvariantReport {
    bool counting_identity = true;  // #roots + #nonbasic edge sides = |V| + |E|
    bool edge_cover = true;         // every edge has a nonbasic side
    bool spanning_forest = true;
    bool one_root_per_tree = true;
    bool delta_x_consistent = true;  // in {0, ub}, tree-constant, equal to the root bound
    bool orientation_feasible = true;
    std::string detail;

    bool ok() const {
        return counting_identity && edge_cover && spanning_forest && one_root_per_tree && delta_x_consistent &&
               orientation_feasible;
    }
};

InvariantReport check_basis_invariants(const ForestBasis& basis, const SubproblemContext& ctx);

/// Value of the basic side of a non-tree edge.
int basic_edge_value(const ForestBasis& basis, const SubproblemContext& ctx, EdgeId e);

/// LP objective at the current basic solution.
double lp_objective(const ForestBasis& basis, const SubproblemContext& ctx);

struct PivotTraceRow {
    std::int64_t pivot_index;
    VariableId entering;
    bool degenerate;
    double reduced_cost;
    double delta_h;
};

struct SamplerConfig {
    double p = 0.0;
    std::uint64_t rng_seed = 0;
    /// 0 selects 50 * (|V| + |E|).
    std::int64_t max_pivots_per_call = 0;
    double improvement_tolerance = 1e-9;
    std::optional<std::chrono::steady_clock::time_point> deadline;
    std::function<void(const PivotTraceRow&)> trace;
};

struct SampleResult {
    std::optional<GraverMove> move;
    std::int64_t pivots = 0;
    bool timed_out = false;
    bool pivot_cap_hit = false;
    double reduced_cost = 0.0;
    double predicted_delta_h = 0.0;
};

/// Randomized simplex run on the direction's subproblem about x, stopped at
/// the first nondegenerate pivot. The returned move (support, sign) is
/// strictly improving and keeps x within bounds and budget.
SampleResult sample_graver_move(const SeparableProblem& problem, const Assignment& x, Direction direction,
                                const SamplerConfig& config, Rng& rng);

class PivotCapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExactSubproblemResult {
    std::vector<int> delta_x;
    double lp_objective = 0.0;
    std::int64_t pivots = 0;
};

/// Runs the forest simplex to LP optimality with Dantzig pricing (lowest id
/// on ties) and lowest-id exits, switching to Bland's rule during long
/// degenerate stretches. The budget is ignored.
ExactSubproblemResult solve_subproblem_exact(const SeparableProblem& problem, std::span<const int> x,
                                             Direction direction, std::int64_t max_pivots = 0);

}  // namespace gtv
