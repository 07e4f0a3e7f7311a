#pragma once

// Small dense bounded-variable primal simplex (two phases, Bland's rule).
// Meant for relaxations of a few thousand variables at most.

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace gtv {

class LpIterationCap : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class RowSense { less_equal, equal, greater_equal };

/// min c^T x  s.t.  rows, lower <= x <= upper (all bounds finite).
struct DenseLP {
    std::vector<double> objective;
    std::vector<std::vector<double>> rows;
    std::vector<RowSense> senses;
    std::vector<double> rhs;
    std::vector<double> lower;
    std::vector<double> upper;

    int variable_count() const { return static_cast<int>(objective.size()); }
    int add_variable(double cost, double lo, double hi);
    void add_row(std::vector<double> coefficients, RowSense sense, double value);
    /// Throws std::invalid_argument on inconsistent dimensions or bounds.
    void validate() const;
};

enum class LpStatus { optimal, infeasible };

struct LpSolution {
    LpStatus status = LpStatus::infeasible;
    std::vector<double> x;
    double objective = 0.0;
    std::int64_t iterations = 0;
};

/// iteration_cap = 0 selects 50 * (rows + columns) + 1000.
LpSolution solve_lp(const DenseLP& lp, std::int64_t iteration_cap = 0);

}  // namespace gtv
