#pragma once

// Seeded brute-force cross-check batches driven by the `oracle` command.

#include <cstdint>
#include <string>
#include <vector>

namespace gtv {

enum class BatchKind { unconstrained, constrained, penalty };
const char* to_string(BatchKind kind);

struct BatchOptions {
    int count = 30;
    std::uint64_t seed = 0;
    int rows = 3;
    int cols = 3;
    int trials = 10;  // constrained batch only
};

struct BatchCase {
    int index = 0;
    int q = 0;
    bool skipped = false;  // brute force over its evaluation cap
    bool passed = true;
    double reference = 0.0;  // brute-force or init objective, per batch
    double achieved = 0.0;
    std::string note;
};

struct BatchResult {
    BatchKind kind;
    std::vector<BatchCase> cases;
    int passed() const;
    int failed() const;
    int skipped() const;
};

/// unconstrained: exact solver vs brute force, |dJ| <= 1e-9 max(1, |J|).
/// constrained: best of `trials` heuristic runs from zero is feasible,
///   2-optimal and no worse than the init point.
/// penalty: penalized init x satisfies J(x) - J(x0) <= p (J* - J(x0)) + 1e-9
///   with p = H(x) / cap, x0 the minimal-budget point (cases with
///   H(x0) != 0 are skipped).
BatchResult run_batch(BatchKind kind, const BatchOptions& options);

}  // namespace gtv
