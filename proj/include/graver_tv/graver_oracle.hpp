#pragma once

// Exhaustive ground truth for small graphs: Graver bases of the edge
// difference constraint matrix and of its split (a+, a-) variant, the
// conformal order, brute-force solving, and local/Graver optimality checks.
// Nothing here is meant to run at experiment scale.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "graver_tv/graph.hpp"
#include "graver_tv/objective.hpp"

namespace gtv {

class CapExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// (x, a) with a_uv = x_u - x_v for every edge.
struct KernelElement {
    std::vector<int> x;
    std::vector<int> a;

    static KernelElement from_x(const Graph& g, std::vector<int> x);
    bool in_kernel(const Graph& g) const;
    bool is_zero() const;
    bool operator==(const KernelElement&) const = default;
};

/// sign * (chi_S, chi_out(S) - chi_in(S)).
struct GraverMove {
    VertexSet support;
    int sign = 1;

    std::vector<int> edge_vector(const Graph& g) const;
    KernelElement as_kernel(const Graph& g) const;
    bool operator==(const GraverMove&) const = default;
};

/// Componentwise x_i y_i >= 0 and |x_i| <= |y_i|.
bool sq_leq(std::span<const int> u, std::span<const int> v);
bool sq_leq(const KernelElement& u, const KernelElement& v);

/// A Graver element below z: the connected component of the top level set
/// (bottom level set when no entry is positive) containing its smallest
/// vertex. Throws on z = 0.
GraverMove majorizer(const Graph& g, const KernelElement& z);

/// Every +-chi_S move with S connected, ordered by subset enumeration order,
/// + before -.
std::vector<GraverMove> enumerate_graver_tv(const Graph& g, std::optional<std::int64_t> max_subsets = 1'000'000);

/// The kernel-element minimality oracle: the conformally minimal nonzero
/// kernel elements with every |x_v| <= window, by exhaustive enumeration.
std::vector<KernelElement> bounded_minimal_kernel_elements(const Graph& g, int window);

/// Element of the kernel of [B -I I]: x_u - x_v = a+_uv - a-_uv.
struct PrimeElement {
    std::vector<int> x;
    std::vector<int> a_plus;
    std::vector<int> a_minus;

    bool in_kernel(const Graph& g) const;
    std::vector<int> flat() const;
    bool operator==(const PrimeElement&) const = default;
    bool operator<(const PrimeElement& o) const { return flat() < o.flat(); }
};

struct PrimeMove {
    enum class Kind { edge_pair, subset };
    Kind kind = Kind::subset;
    int sign = 1;
    EdgeId edge = -1;                 // edge_pair only
    VertexSet support;                // subset only
    std::vector<EdgeId> plus_edges;   // boundary edges carried by a+
    std::vector<EdgeId> minus_edges;  // boundary edges carried by a-

    PrimeElement vector(const Graph& g) const;
};

/// +-(0, e_uv, e_uv) for every edge, then for every connected S, both signs
/// and every split of the boundary of S between a+ and a-.
std::vector<PrimeMove> enumerate_graver_tv_prime(const Graph& g, std::optional<std::int64_t> max_subsets = 100'000);

/// Conformally minimal nonzero kernel elements of [B -I I] with all entries
/// in {-1,0,1}, by exhaustive enumeration.
std::vector<PrimeElement> bounded_minimal_prime_elements(const Graph& g);

struct BruteForceOptions {
    std::int64_t max_evaluations = 50'000'000;
};

/// Exact minimizer over the feasible lattice points, ties broken toward the
/// lexicographically smallest x. Throws CapExceeded or, when nothing is
/// feasible, std::runtime_error.
Assignment brute_force_solve(const SeparableProblem& problem, BruteForceOptions options = {});

enum class OptimalityLevel { one_opt, two_opt, graver_opt };

struct OptimalityCheck {
    bool optimal = true;
    std::optional<std::vector<int>> witness;  // first strictly improving feasible point found
};

/// Strict improvement means a drop of more than 1e-9.
OptimalityCheck check_optimality(const SeparableProblem& problem, const Assignment& x, OptimalityLevel level);

struct PathSearchOptions {
    std::int64_t max_states = 2'000'000;
};

/// Whether some globally optimal point is reachable from x0 by a sequence of
/// feasible, strictly improving steps x += k g with g a Graver move, k >= 1.
bool improving_path_exists(const SeparableProblem& problem, const Assignment& x0, PathSearchOptions options = {});

/// Steepest Graver augmentation over the enumerated basis: each step takes
/// the feasible x + k g of least objective; stops when nothing improves.
Assignment exhaustive_graver_augmentation(const SeparableProblem& problem, const Assignment& x0);

}  // namespace gtv
