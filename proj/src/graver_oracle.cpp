#include "graver_tv/graver_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <numeric>
#include <string>
#include <unordered_set>

namespace gtv {

namespace {

constexpr double kImprovement = 1e-9;

struct VecHash {
    std::size_t operator()(const std::vector<int>& v) const {
        std::size_t h = v.size();
        for (int x : v) h ^= static_cast<std::size_t>(x + 0x9e3779b9) + (h << 6) + (h >> 2);
        return h;
    }
};

int l1(const std::vector<int>& v) {
    int s = 0;
    for (int x : v) s += std::abs(x);
    return s;
}

// Advances x through {lo..hi}^n in lexicographic order (last index fastest).
bool odometer(std::vector<int>& x, int lo, int hi) {
    for (std::size_t i = x.size(); i-- > 0;) {
        if (x[i] < hi) {
            ++x[i];
            return true;
        }
        x[i] = lo;
    }
    return false;
}

}  // namespace

KernelElement KernelElement::from_x(const Graph& g, std::vector<int> x) {
    KernelElement k;
    k.a.resize(static_cast<std::size_t>(g.edge_count()));
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const Edge& ed = g.edge(e);
        k.a[static_cast<std::size_t>(e)] = x[static_cast<std::size_t>(ed.tail)] - x[static_cast<std::size_t>(ed.head)];
    }
    k.x = std::move(x);
    return k;
}

bool KernelElement::in_kernel(const Graph& g) const {
    if (static_cast<int>(x.size()) != g.vertex_count() || static_cast<int>(a.size()) != g.edge_count()) return false;
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const Edge& ed = g.edge(e);
        if (a[static_cast<std::size_t>(e)] != x[static_cast<std::size_t>(ed.tail)] - x[static_cast<std::size_t>(ed.head)])
            return false;
    }
    return true;
}

bool KernelElement::is_zero() const {
    return std::all_of(x.begin(), x.end(), [](int v) { return v == 0; }) &&
           std::all_of(a.begin(), a.end(), [](int v) { return v == 0; });
}

std::vector<int> GraverMove::edge_vector(const Graph& g) const {
    std::vector<int> a(static_cast<std::size_t>(g.edge_count()), 0);
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const Edge& ed = g.edge(e);
        bool t = support.contains(ed.tail);
        bool h = support.contains(ed.head);
        if (t && !h) a[static_cast<std::size_t>(e)] = sign;
        else if (!t && h) a[static_cast<std::size_t>(e)] = -sign;
    }
    return a;
}

KernelElement GraverMove::as_kernel(const Graph& g) const {
    KernelElement k;
    k.x.assign(static_cast<std::size_t>(g.vertex_count()), 0);
    for (VertexId v : support.members()) k.x[static_cast<std::size_t>(v)] = sign;
    k.a = edge_vector(g);
    return k;
}

bool sq_leq(std::span<const int> u, std::span<const int> v) {
    if (u.size() != v.size()) throw std::invalid_argument("sq_leq: length mismatch");
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (static_cast<long long>(u[i]) * v[i] < 0) return false;
        if (std::abs(u[i]) > std::abs(v[i])) return false;
    }
    return true;
}

bool sq_leq(const KernelElement& u, const KernelElement& v) { return sq_leq(u.x, v.x) && sq_leq(u.a, v.a); }

GraverMove majorizer(const Graph& g, const KernelElement& z) {
    if (z.is_zero()) throw std::invalid_argument("majorizer: zero kernel element");
    if (static_cast<int>(z.x.size()) != g.vertex_count()) throw std::invalid_argument("majorizer: length mismatch");
    bool any_positive = std::any_of(z.x.begin(), z.x.end(), [](int v) { return v > 0; });
    int level = any_positive ? *std::max_element(z.x.begin(), z.x.end()) : *std::min_element(z.x.begin(), z.x.end());
    VertexId start = static_cast<VertexId>(std::find(z.x.begin(), z.x.end(), level) - z.x.begin());

    GraverMove move{VertexSet(g.vertex_count()), any_positive ? 1 : -1};
    std::vector<VertexId> stack{start};
    move.support.insert(start);
    while (!stack.empty()) {
        VertexId v = stack.back();
        stack.pop_back();
        auto relax = [&](EdgeId e) {
            VertexId w = g.other_end(e, v);
            if (z.x[static_cast<std::size_t>(w)] == level && !move.support.contains(w)) {
                move.support.insert(w);
                stack.push_back(w);
            }
        };
        for (EdgeId e : g.out_edges(v)) relax(e);
        for (EdgeId e : g.in_edges(v)) relax(e);
    }
    if (!sq_leq(move.as_kernel(g), z)) throw std::logic_error("majorizer: constructed move is not below z");
    return move;
}

std::vector<GraverMove> enumerate_graver_tv(const Graph& g, std::optional<std::int64_t> max_subsets) {
    std::vector<GraverMove> moves;
    try {
        enumerate_connected_subsets(
            g,
            [&](const VertexSet& s) {
                moves.push_back({s, 1});
                moves.push_back({s, -1});
            },
            max_subsets);
    } catch (const CountExceeded& e) {
        throw CapExceeded(std::string("enumerate_graver_tv: ") + e.what());
    }
    return moves;
}

std::vector<KernelElement> bounded_minimal_kernel_elements(const Graph& g, int window) {
    if (window < 1) throw std::invalid_argument("bounded_minimal_kernel_elements: window must be >= 1");
    const auto n = static_cast<std::size_t>(g.vertex_count());
    double states = std::pow(2.0 * window + 1.0, static_cast<double>(n));
    if (states > 5e6) throw CapExceeded("bounded_minimal_kernel_elements: window too large for this graph");

    std::vector<KernelElement> all;
    std::vector<int> x(n, -window);
    do {
        if (std::any_of(x.begin(), x.end(), [](int v) { return v != 0; })) all.push_back(KernelElement::from_x(g, x));
    } while (odometer(x, -window, window));

    std::vector<int> norm(all.size());
    for (std::size_t i = 0; i < all.size(); ++i) norm[i] = l1(all[i].x) + l1(all[i].a);
    std::vector<std::size_t> order(all.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return norm[i] < norm[j]; });

    // Anything strictly below z has smaller norm and lies in the window, and
    // is itself above some minimal element, so comparing against the minimal
    // elements found so far decides minimality.
    std::vector<KernelElement> minimal;
    for (std::size_t i : order) {
        const KernelElement& z = all[i];
        bool dominated = std::any_of(minimal.begin(), minimal.end(), [&](const KernelElement& m) { return sq_leq(m, z); });
        if (!dominated) minimal.push_back(z);
    }
    return minimal;
}

bool PrimeElement::in_kernel(const Graph& g) const {
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const Edge& ed = g.edge(e);
        auto i = static_cast<std::size_t>(e);
        if (x[static_cast<std::size_t>(ed.tail)] - x[static_cast<std::size_t>(ed.head)] != a_plus[i] - a_minus[i])
            return false;
    }
    return true;
}

std::vector<int> PrimeElement::flat() const {
    std::vector<int> f(x);
    f.insert(f.end(), a_plus.begin(), a_plus.end());
    f.insert(f.end(), a_minus.begin(), a_minus.end());
    return f;
}

PrimeElement PrimeMove::vector(const Graph& g) const {
    PrimeElement p;
    auto n = static_cast<std::size_t>(g.vertex_count());
    auto m = static_cast<std::size_t>(g.edge_count());
    p.x.assign(n, 0);
    p.a_plus.assign(m, 0);
    p.a_minus.assign(m, 0);
    if (kind == Kind::edge_pair) {
        p.a_plus[static_cast<std::size_t>(edge)] = sign;
        p.a_minus[static_cast<std::size_t>(edge)] = sign;
        return p;
    }
    for (VertexId v : support.members()) p.x[static_cast<std::size_t>(v)] = sign;
    // Boundary edge difference d = +-1; a+ carries it as +d, a- as -d.
    auto diff = [&](EdgeId e) {
        const Edge& ed = g.edge(e);
        return p.x[static_cast<std::size_t>(ed.tail)] - p.x[static_cast<std::size_t>(ed.head)];
    };
    for (EdgeId e : plus_edges) p.a_plus[static_cast<std::size_t>(e)] = diff(e);
    for (EdgeId e : minus_edges) p.a_minus[static_cast<std::size_t>(e)] = -diff(e);
    return p;
}

std::vector<PrimeMove> enumerate_graver_tv_prime(const Graph& g, std::optional<std::int64_t> max_subsets) {
    std::vector<PrimeMove> moves;
    for (EdgeId e = 0; e < g.edge_count(); ++e)
        for (int sign : {1, -1}) {
            PrimeMove pm;
            pm.kind = PrimeMove::Kind::edge_pair;
            pm.sign = sign;
            pm.edge = e;
            pm.support = VertexSet(g.vertex_count());
            moves.push_back(std::move(pm));
        }
    std::vector<VertexSet> subsets;
    try {
        subsets = connected_subsets(g, max_subsets);
    } catch (const CountExceeded& ex) {
        throw CapExceeded(std::string("enumerate_graver_tv_prime: ") + ex.what());
    }
    for (const VertexSet& s : subsets) {
        Boundary b = boundary(g, s);
        std::vector<EdgeId> cut = b.out_edges;
        cut.insert(cut.end(), b.in_edges.begin(), b.in_edges.end());
        std::sort(cut.begin(), cut.end());
        if (cut.size() > 24) throw CapExceeded("enumerate_graver_tv_prime: boundary too large");
        const std::uint64_t splits = std::uint64_t{1} << cut.size();
        for (int sign : {1, -1})
            for (std::uint64_t mask = 0; mask < splits; ++mask) {
                PrimeMove pm;
                pm.kind = PrimeMove::Kind::subset;
                pm.sign = sign;
                pm.support = s;
                for (std::size_t i = 0; i < cut.size(); ++i)
                    ((mask >> i) & 1u ? pm.minus_edges : pm.plus_edges).push_back(cut[i]);
                moves.push_back(std::move(pm));
            }
    }
    return moves;
}

std::vector<PrimeElement> bounded_minimal_prime_elements(const Graph& g) {
    const auto n = static_cast<std::size_t>(g.vertex_count());
    const auto m = static_cast<std::size_t>(g.edge_count());
    if (n > 10 || m > 16) throw CapExceeded("bounded_minimal_prime_elements: graph too large");

    // Options for (a+, a-) in {-1,0,1}^2 with a+ - a- = d.
    auto options = [](int d) {
        std::vector<std::pair<int, int>> out;
        for (int p = -1; p <= 1; ++p)
            for (int q = -1; q <= 1; ++q)
                if (p - q == d) out.emplace_back(p, q);
        return out;
    };
    std::vector<PrimeElement> minimal;
    std::vector<int> x(n, -1);
    do {
        std::vector<int> d(m);
        for (std::size_t e = 0; e < m; ++e) {
            const Edge& ed = g.edge(static_cast<EdgeId>(e));
            d[e] = x[static_cast<std::size_t>(ed.tail)] - x[static_cast<std::size_t>(ed.head)];
        }
        std::vector<std::vector<std::pair<int, int>>> opts(m);
        for (std::size_t e = 0; e < m; ++e) opts[e] = options(d[e]);

        std::vector<std::size_t> pick(m, 0);
        bool more = true;
        while (more) {
            PrimeElement z{x, std::vector<int>(m), std::vector<int>(m)};
            for (std::size_t e = 0; e < m; ++e) std::tie(z.a_plus[e], z.a_minus[e]) = opts[e][pick[e]];
            bool zero = std::all_of(x.begin(), x.end(), [](int v) { return v == 0; }) &&
                        std::all_of(z.a_plus.begin(), z.a_plus.end(), [](int v) { return v == 0; }) &&
                        std::all_of(z.a_minus.begin(), z.a_minus.end(), [](int v) { return v == 0; });
            if (!zero) {
                // Count kernel elements y below z; z is minimal iff the only
                // ones are 0 and z itself.
                std::vector<std::size_t> xs;
                for (std::size_t v = 0; v < n; ++v)
                    if (x[v] != 0) xs.push_back(v);
                bool minimal_z = true;
                for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << xs.size()) && minimal_z; ++mask) {
                    std::vector<int> y(n, 0);
                    for (std::size_t i = 0; i < xs.size(); ++i)
                        if ((mask >> i) & 1u) y[xs[i]] = x[xs[i]];
                    long long combos = 1;
                    for (std::size_t e = 0; e < m && combos > 0; ++e) {
                        const Edge& ed = g.edge(static_cast<EdgeId>(e));
                        int dy = y[static_cast<std::size_t>(ed.tail)] - y[static_cast<std::size_t>(ed.head)];
                        std::vector<int> ps{0}, qs{0};
                        if (z.a_plus[e] != 0) ps.push_back(z.a_plus[e]);
                        if (z.a_minus[e] != 0) qs.push_back(z.a_minus[e]);
                        int count = 0;
                        for (int p : ps)
                            for (int q : qs)
                                if (p - q == dy) ++count;
                        combos *= count;
                    }
                    std::uint64_t full = (std::uint64_t{1} << xs.size()) - 1;
                    if (mask == full) combos -= 1;  // z itself
                    if (mask == 0) combos -= 1;     // the zero vector
                    if (combos > 0) minimal_z = false;
                }
                if (minimal_z) minimal.push_back(std::move(z));
            }
            more = false;
            for (std::size_t e = m; e-- > 0;) {
                if (++pick[e] < opts[e].size()) {
                    more = true;
                    break;
                }
                pick[e] = 0;
            }
        }
    } while (odometer(x, -1, 1));
    return minimal;
}

Assignment brute_force_solve(const SeparableProblem& problem, BruteForceOptions options) {
    const auto n = static_cast<std::size_t>(problem.vertex_count());
    double states = std::pow(problem.q() + 1.0, static_cast<double>(n));
    if (states > static_cast<double>(options.max_evaluations))
        throw CapExceeded("brute_force_solve: (q+1)^|V| = " + std::to_string(states) + " exceeds cap");
    std::vector<int> x(n, 0);
    std::optional<std::vector<int>> best;
    double best_obj = 0.0;
    do {
        Evaluation ev = evaluate(problem, x);
        if (!problem.within_budget(ev.budget)) continue;
        if (!best || ev.objective < best_obj) {
            best = x;
            best_obj = ev.objective;
        }
    } while (odometer(x, 0, problem.q()));
    if (!best) throw std::runtime_error("brute_force_solve: no feasible point");
    return Assignment(problem, *best);
}

OptimalityCheck check_optimality(const SeparableProblem& problem, const Assignment& x, OptimalityLevel level) {
    OptimalityCheck out;
    const int n = problem.vertex_count();
    const int q = problem.q();
    auto try_changes = [&](std::span<const std::pair<VertexId, int>> changes) {
        for (const auto& [v, val] : changes)
            if (val < 0 || val > q) return false;
        Evaluation d = delta_evaluate(problem, x, changes);
        if (d.objective < -kImprovement && problem.within_budget(x.budget() + d.budget)) {
            std::vector<int> w = x.x();
            for (const auto& [v, val] : changes) w[static_cast<std::size_t>(v)] = val;
            // Confirm against a fresh evaluation before reporting.
            Evaluation fresh = evaluate(problem, w);
            if (fresh.objective < x.objective() - kImprovement && problem.within_budget(fresh.budget)) {
                out.optimal = false;
                out.witness = std::move(w);
                return true;
            }
        }
        return false;
    };

    if (level == OptimalityLevel::graver_opt) {
        for (const GraverMove& g : enumerate_graver_tv(problem.graph())) {
            std::vector<int> w = x.x();
            bool ok = true;
            for (VertexId v : g.support.members()) {
                w[static_cast<std::size_t>(v)] += g.sign;
                if (w[static_cast<std::size_t>(v)] < 0 || w[static_cast<std::size_t>(v)] > q) ok = false;
            }
            if (!ok) continue;
            Evaluation ev = evaluate(problem, w);
            if (ev.objective < x.objective() - kImprovement && problem.within_budget(ev.budget)) {
                out.optimal = false;
                out.witness = std::move(w);
                return out;
            }
        }
        return out;
    }

    const int max_step = level == OptimalityLevel::one_opt ? 1 : 2;
    for (VertexId v = 0; v < n; ++v)
        for (int step = -max_step; step <= max_step; ++step) {
            if (step == 0) continue;
            std::pair<VertexId, int> c{v, x[v] + step};
            if (try_changes(std::span(&c, 1))) return out;
        }
    if (level == OptimalityLevel::two_opt) {
        for (VertexId i = 0; i < n; ++i)
            for (VertexId j = i + 1; j < n; ++j)
                for (int si : {-1, 1})
                    for (int sj : {-1, 1}) {
                        std::pair<VertexId, int> c[2] = {{i, x[i] + si}, {j, x[j] + sj}};
                        if (try_changes(c)) return out;
                    }
    }
    return out;
}

bool improving_path_exists(const SeparableProblem& problem, const Assignment& x0, PathSearchOptions options) {
    if (!is_feasible(problem, x0.x())) throw std::invalid_argument("improving_path_exists: infeasible start");
    const double target = brute_force_solve(problem).objective();
    const auto moves = enumerate_graver_tv(problem.graph());
    const double tol = kImprovement * std::max(1.0, std::fabs(target));

    std::unordered_set<std::vector<int>, VecHash> visited;
    std::deque<std::pair<std::vector<int>, double>> frontier;
    visited.insert(x0.x());
    frontier.emplace_back(x0.x(), x0.objective());
    while (!frontier.empty()) {
        auto [x, obj] = std::move(frontier.front());
        frontier.pop_front();
        if (obj <= target + tol) return true;
        for (const GraverMove& g : moves) {
            std::vector<int> y = x;
            for (int k = 1;; ++k) {
                bool ok = true;
                for (VertexId v : g.support.members()) {
                    int nv = y[static_cast<std::size_t>(v)] + g.sign;
                    if (nv < 0 || nv > problem.q()) ok = false;
                    y[static_cast<std::size_t>(v)] = nv;
                }
                if (!ok) break;
                Evaluation ev = evaluate(problem, y);
                if (ev.objective < obj - kImprovement && problem.within_budget(ev.budget) && !visited.contains(y)) {
                    if (static_cast<std::int64_t>(visited.size()) >= options.max_states)
                        throw CapExceeded("improving_path_exists: state cap exceeded");
                    visited.insert(y);
                    frontier.emplace_back(y, ev.objective);
                }
            }
        }
    }
    return false;
}

Assignment exhaustive_graver_augmentation(const SeparableProblem& problem, const Assignment& x0) {
    if (!is_feasible(problem, x0.x())) throw std::invalid_argument("exhaustive_graver_augmentation: infeasible start");
    const auto moves = enumerate_graver_tv(problem.graph());
    std::vector<int> x = x0.x();
    double obj = x0.objective();
    for (;;) {
        std::optional<std::vector<int>> best;
        double best_obj = obj - kImprovement;
        for (const GraverMove& g : moves) {
            std::vector<int> y = x;
            for (;;) {
                bool ok = true;
                for (VertexId v : g.support.members()) {
                    int nv = y[static_cast<std::size_t>(v)] + g.sign;
                    if (nv < 0 || nv > problem.q()) ok = false;
                    y[static_cast<std::size_t>(v)] = nv;
                }
                if (!ok) break;
                Evaluation ev = evaluate(problem, y);
                if (problem.within_budget(ev.budget) && ev.objective < best_obj) {
                    best = y;
                    best_obj = ev.objective;
                }
            }
        }
        if (!best) break;
        x = std::move(*best);
        obj = best_obj;
    }
    return Assignment(problem, x);
}

}  // namespace gtv
