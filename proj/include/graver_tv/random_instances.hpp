#pragma once

// Seeded random instances for tests, oracle batches, and benchmarks.

#include <cstdint>

#include "graver_tv/objective.hpp"
#include "graver_tv/rng.hpp"

namespace gtv {

/// Uniform integer in [lo, hi].
int uniform_int(Rng& rng, int lo, int hi);

/// Convex table on [lo, hi] built from sorted random slopes.
ConvexTable random_convex(Rng& rng, int lo, int hi, bool integral, int slope_range = 4);

/// Edge table on [-q, q], convex and minimized at 0.
ConvexTable random_edge_table(Rng& rng, int q, bool integral);

enum class BudgetShape { identity, random_convex_increasing };

struct InstanceOptions {
    int rows = 2;
    int cols = 3;
    int q = 2;
    bool integral = true;
    BudgetShape budget = BudgetShape::identity;
    /// Cap as a fraction of H at the all-q point, floored; < 0 means no cap.
    double cap_fraction = -1.0;
};

/// Random grid instance: random convex node tables, TV-like edge tables,
/// budget tables that vanish at 0.
SeparableProblem random_problem(Rng& rng, const InstanceOptions& options);

}  // namespace gtv
