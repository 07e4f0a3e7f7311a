#include "graver_tv/random_instances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gtv {

int uniform_int(Rng& rng, int lo, int hi) {
    return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1)));
}

ConvexTable random_convex(Rng& rng, int lo, int hi, bool integral, int slope_range) {
    const int n = hi - lo;
    std::vector<double> slopes;
    for (int i = 0; i < n; ++i)
        slopes.push_back(integral ? uniform_int(rng, -slope_range, slope_range)
                                  : (rng.uniform() * 2.0 - 1.0) * slope_range);
    std::sort(slopes.begin(), slopes.end());
    std::vector<double> v{integral ? static_cast<double>(uniform_int(rng, 0, 3)) : rng.uniform() * 3.0};
    for (double s : slopes) v.push_back(v.back() + s);
    return ConvexTable(lo, std::move(v));
}

ConvexTable random_edge_table(Rng& rng, int q, bool integral) {
    std::vector<double> right, left;
    double sr = 0.0, sl = 0.0, vr = 0.0, vl = 0.0;
    for (int t = 1; t <= q; ++t) {
        sr += integral ? uniform_int(rng, 0, 2) : rng.uniform() * 2.0;
        sl += integral ? uniform_int(rng, 0, 2) : rng.uniform() * 2.0;
        vr += sr;
        vl += sl;
        right.push_back(vr);
        left.push_back(vl);
    }
    std::vector<double> v(left.rbegin(), left.rend());
    v.push_back(0.0);
    v.insert(v.end(), right.begin(), right.end());
    return ConvexTable(-q, std::move(v));
}

SeparableProblem random_problem(Rng& rng, const InstanceOptions& o) {
    Graph g = grid_graph(o.rows, o.cols);
    std::vector<ConvexTable> node, edge, budget;
    for (int v = 0; v < g.vertex_count(); ++v) node.push_back(random_convex(rng, 0, o.q, o.integral));
    for (int e = 0; e < g.edge_count(); ++e) edge.push_back(random_edge_table(rng, o.q, o.integral));
    double h_top = 0.0;
    for (int v = 0; v < g.vertex_count(); ++v) {
        ConvexTable h = ConvexTable::linear(0, o.q, 1.0);
        if (o.budget == BudgetShape::random_convex_increasing) {
            std::vector<double> vals{0.0};
            double slope = 0.0;
            for (int t = 1; t <= o.q; ++t) {
                slope += uniform_int(rng, 0, 2);
                vals.push_back(vals.back() + slope);
            }
            h = ConvexTable(0, std::move(vals));
        }
        h_top += h(o.q);
        budget.push_back(std::move(h));
    }
    double cap = o.cap_fraction < 0 ? std::numeric_limits<double>::infinity() : std::floor(o.cap_fraction * h_top);
    return SeparableProblem(std::move(g), o.q, std::move(node), std::move(edge), std::move(budget), cap);
}

}  // namespace gtv
