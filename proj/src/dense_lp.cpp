#include "graver_tv/dense_lp.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace gtv {

namespace {

constexpr double kEps = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Bounded-variable tableau; every column lives in [0, upper[j]].
struct Tableau {
    int m = 0;
    int n = 0;
    std::vector<std::vector<double>> t;  // m x n, B^{-1} A
    std::vector<double> xb;              // basic values
    std::vector<int> basis;              // row -> column
    std::vector<int> row_of;             // column -> row or -1
    std::vector<char> at_upper;
    std::vector<double> upper;
    std::int64_t iterations = 0;

    void pivot_on(int r, int j) {
        auto& pr = t[static_cast<std::size_t>(r)];
        double piv = pr[static_cast<std::size_t>(j)];
        for (double& v : pr) v /= piv;
        for (int i = 0; i < m; ++i) {
            if (i == r) continue;
            auto& row = t[static_cast<std::size_t>(i)];
            double f = row[static_cast<std::size_t>(j)];
            if (f == 0.0) continue;
            for (int k = 0; k < n; ++k) row[static_cast<std::size_t>(k)] -= f * pr[static_cast<std::size_t>(k)];
        }
        row_of[static_cast<std::size_t>(basis[static_cast<std::size_t>(r)])] = -1;
        basis[static_cast<std::size_t>(r)] = j;
        row_of[static_cast<std::size_t>(j)] = r;
    }

    double value(int j) const {
        int r = row_of[static_cast<std::size_t>(j)];
        if (r >= 0) return xb[static_cast<std::size_t>(r)];
        return at_upper[static_cast<std::size_t>(j)] ? upper[static_cast<std::size_t>(j)] : 0.0;
    }

    // Runs Bland's-rule primal simplex for the given costs.
    void optimize(const std::vector<double>& cost, std::int64_t cap) {
        for (;;) {
            int enter = -1;
            int dir = 0;
            for (int j = 0; j < n && enter < 0; ++j) {
                if (row_of[static_cast<std::size_t>(j)] >= 0) continue;
                double d = cost[static_cast<std::size_t>(j)];
                for (int i = 0; i < m; ++i)
                    d -= cost[static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])] *
                         t[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                if (!at_upper[static_cast<std::size_t>(j)] && d < -kEps && upper[static_cast<std::size_t>(j)] > 0) {
                    enter = j;
                    dir = 1;
                } else if (at_upper[static_cast<std::size_t>(j)] && d > kEps) {
                    enter = j;
                    dir = -1;
                }
            }
            if (enter < 0) return;
            if (iterations >= cap)
                throw LpIterationCap("solve_lp: iteration cap of " + std::to_string(cap) + " reached");
            ++iterations;

            double step = upper[static_cast<std::size_t>(enter)];
            int leave = -1;
            bool leave_to_upper = false;
            for (int i = 0; i < m; ++i) {
                double a = dir * t[static_cast<std::size_t>(i)][static_cast<std::size_t>(enter)];
                int col = basis[static_cast<std::size_t>(i)];
                double limit = kInf;
                bool to_upper = false;
                if (a > kEps) {
                    limit = std::max(0.0, xb[static_cast<std::size_t>(i)]) / a;
                } else if (a < -kEps && std::isfinite(upper[static_cast<std::size_t>(col)])) {
                    limit = std::max(0.0, upper[static_cast<std::size_t>(col)] - xb[static_cast<std::size_t>(i)]) / -a;
                    to_upper = true;
                }
                if (limit < step || (limit == step && leave >= 0 && col < basis[static_cast<std::size_t>(leave)])) {
                    step = limit;
                    leave = i;
                    leave_to_upper = to_upper;
                }
            }
            if (!std::isfinite(step)) throw std::logic_error("solve_lp: unbounded direction");
            for (int i = 0; i < m; ++i)
                xb[static_cast<std::size_t>(i)] -= step * dir * t[static_cast<std::size_t>(i)][static_cast<std::size_t>(enter)];
            if (leave < 0) {
                at_upper[static_cast<std::size_t>(enter)] = dir > 0 ? 1 : 0;  // bound flip
                continue;
            }
            int out = basis[static_cast<std::size_t>(leave)];
            double entering_value = dir > 0 ? step : upper[static_cast<std::size_t>(enter)] - step;
            pivot_on(leave, enter);
            xb[static_cast<std::size_t>(leave)] = entering_value;
            at_upper[static_cast<std::size_t>(enter)] = 0;
            at_upper[static_cast<std::size_t>(out)] = leave_to_upper ? 1 : 0;
        }
    }
};

}  // namespace

int DenseLP::add_variable(double cost, double lo, double hi) {
    objective.push_back(cost);
    lower.push_back(lo);
    upper.push_back(hi);
    for (auto& r : rows) r.push_back(0.0);
    return variable_count() - 1;
}

void DenseLP::add_row(std::vector<double> coefficients, RowSense sense, double value) {
    if (static_cast<int>(coefficients.size()) != variable_count())
        throw std::invalid_argument("DenseLP::add_row: coefficient count != variable count");
    rows.push_back(std::move(coefficients));
    senses.push_back(sense);
    rhs.push_back(value);
}

void DenseLP::validate() const {
    const auto n = objective.size();
    if (lower.size() != n || upper.size() != n) throw std::invalid_argument("DenseLP: bound vectors have wrong size");
    if (senses.size() != rows.size() || rhs.size() != rows.size())
        throw std::invalid_argument("DenseLP: row metadata has wrong size");
    for (const auto& r : rows)
        if (r.size() != n) throw std::invalid_argument("DenseLP: row has wrong length");
    for (std::size_t j = 0; j < n; ++j)
        if (!std::isfinite(lower[j]) || !std::isfinite(upper[j]) || lower[j] > upper[j])
            throw std::invalid_argument("DenseLP: variable " + std::to_string(j) + " has invalid bounds");
}

LpSolution solve_lp(const DenseLP& lp, std::int64_t iteration_cap) {
    lp.validate();
    const int n0 = lp.variable_count();
    const int m = static_cast<int>(lp.rows.size());
    const std::int64_t cap = iteration_cap > 0 ? iteration_cap : 50 * std::int64_t{m + n0} + 1000;

    // Columns: shifted originals, one slack/surplus per inequality row, one
    // artificial per row without a usable slack.
    std::vector<double> b(static_cast<std::size_t>(m));
    std::vector<double> sign(static_cast<std::size_t>(m), 1.0);
    std::vector<RowSense> sense(lp.senses);
    for (int i = 0; i < m; ++i) {
        double v = lp.rhs[static_cast<std::size_t>(i)];
        for (int j = 0; j < n0; ++j) v -= lp.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * lp.lower[static_cast<std::size_t>(j)];
        if (v < 0) {
            v = -v;
            sign[static_cast<std::size_t>(i)] = -1.0;
            if (sense[static_cast<std::size_t>(i)] == RowSense::less_equal) sense[static_cast<std::size_t>(i)] = RowSense::greater_equal;
            else if (sense[static_cast<std::size_t>(i)] == RowSense::greater_equal) sense[static_cast<std::size_t>(i)] = RowSense::less_equal;
        }
        b[static_cast<std::size_t>(i)] = v;
    }
    int slack_count = 0, art_count = 0;
    for (RowSense s : sense) {
        if (s != RowSense::equal) ++slack_count;
        if (s != RowSense::less_equal) ++art_count;
    }
    Tableau tb;
    tb.m = m;
    tb.n = n0 + slack_count + art_count;
    tb.t.assign(static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(tb.n), 0.0));
    tb.upper.assign(static_cast<std::size_t>(tb.n), kInf);
    tb.at_upper.assign(static_cast<std::size_t>(tb.n), 0);
    tb.row_of.assign(static_cast<std::size_t>(tb.n), -1);
    tb.basis.assign(static_cast<std::size_t>(m), -1);
    tb.xb = b;
    for (int j = 0; j < n0; ++j)
        tb.upper[static_cast<std::size_t>(j)] = lp.upper[static_cast<std::size_t>(j)] - lp.lower[static_cast<std::size_t>(j)];

    std::vector<double> phase1(static_cast<std::size_t>(tb.n), 0.0);
    int next_slack = n0, next_art = n0 + slack_count;
    for (int i = 0; i < m; ++i) {
        auto& row = tb.t[static_cast<std::size_t>(i)];
        for (int j = 0; j < n0; ++j)
            row[static_cast<std::size_t>(j)] = sign[static_cast<std::size_t>(i)] * lp.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        int basic = -1;
        switch (sense[static_cast<std::size_t>(i)]) {
            case RowSense::less_equal:
                row[static_cast<std::size_t>(next_slack)] = 1.0;
                basic = next_slack++;
                break;
            case RowSense::greater_equal:
                row[static_cast<std::size_t>(next_slack++)] = -1.0;
                [[fallthrough]];
            case RowSense::equal:
                row[static_cast<std::size_t>(next_art)] = 1.0;
                phase1[static_cast<std::size_t>(next_art)] = 1.0;
                basic = next_art++;
                break;
        }
        tb.basis[static_cast<std::size_t>(i)] = basic;
        tb.row_of[static_cast<std::size_t>(basic)] = i;
    }

    LpSolution sol;
    tb.optimize(phase1, cap);
    double infeasibility = 0.0;
    for (int j = n0 + slack_count; j < tb.n; ++j) infeasibility += tb.value(j);
    double scale = 1.0;
    for (double v : b) scale = std::max(scale, std::fabs(v));
    if (infeasibility > 1e-7 * scale) {
        sol.status = LpStatus::infeasible;
        sol.iterations = tb.iterations;
        return sol;
    }
    for (int j = n0 + slack_count; j < tb.n; ++j) tb.upper[static_cast<std::size_t>(j)] = 0.0;

    std::vector<double> phase2(static_cast<std::size_t>(tb.n), 0.0);
    for (int j = 0; j < n0; ++j) phase2[static_cast<std::size_t>(j)] = lp.objective[static_cast<std::size_t>(j)];
    tb.optimize(phase2, cap);

    sol.status = LpStatus::optimal;
    sol.iterations = tb.iterations;
    sol.x.resize(static_cast<std::size_t>(n0));
    for (int j = 0; j < n0; ++j) {
        double v = lp.lower[static_cast<std::size_t>(j)] + tb.value(j);
        v = std::min(std::max(v, lp.lower[static_cast<std::size_t>(j)]), lp.upper[static_cast<std::size_t>(j)]);
        sol.x[static_cast<std::size_t>(j)] = v;
        sol.objective += lp.objective[static_cast<std::size_t>(j)] * v;
    }
    return sol;
}

}  // namespace gtv
