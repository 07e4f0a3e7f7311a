#include "graver_tv/graph.hpp"

#include <algorithm>
#include <bit>
#include <string>

namespace gtv {

VertexSet::VertexSet(int universe) : universe_(universe), words_((static_cast<std::size_t>(universe) + 63) / 64, 0) {
    if (universe < 0) throw std::invalid_argument("VertexSet: negative universe");
}

VertexSet::VertexSet(int universe, std::initializer_list<VertexId> members) : VertexSet(universe) {
    for (VertexId v : members) insert(v);
}

VertexSet VertexSet::from_members(int universe, const std::vector<VertexId>& members) {
    VertexSet s(universe);
    for (VertexId v : members) s.insert(v);
    return s;
}

VertexSet VertexSet::full(int universe) {
    VertexSet s(universe);
    for (VertexId v = 0; v < universe; ++v) s.insert(v);
    return s;
}

void VertexSet::check(VertexId v) const {
    if (v < 0 || v >= universe_)
        throw std::out_of_range("vertex id " + std::to_string(v) + " out of range [0," +
                                std::to_string(universe_) + ")");
}

void VertexSet::insert(VertexId v) {
    check(v);
    words_[static_cast<std::size_t>(v) >> 6] |= std::uint64_t{1} << (v & 63);
}

void VertexSet::erase(VertexId v) {
    check(v);
    words_[static_cast<std::size_t>(v) >> 6] &= ~(std::uint64_t{1} << (v & 63));
}

int VertexSet::count() const {
    int c = 0;
    for (auto w : words_) c += std::popcount(w);
    return c;
}

bool VertexSet::empty() const {
    return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

std::vector<VertexId> VertexSet::members() const {
    std::vector<VertexId> out;
    for (std::size_t i = 0; i < words_.size(); ++i) {
        std::uint64_t w = words_[i];
        while (w != 0) {
            int bit = std::countr_zero(w);
            out.push_back(static_cast<VertexId>(i * 64 + static_cast<std::size_t>(bit)));
            w &= w - 1;
        }
    }
    return out;
}

VertexId VertexSet::first() const {
    for (std::size_t i = 0; i < words_.size(); ++i)
        if (words_[i] != 0) return static_cast<VertexId>(i * 64 + static_cast<std::size_t>(std::countr_zero(words_[i])));
    return -1;
}

bool VertexSet::operator<(const VertexSet& other) const {
    if (universe_ != other.universe_) return universe_ < other.universe_;
    return words_ < other.words_;
}

std::size_t VertexSet::hash() const {
    std::size_t h = static_cast<std::size_t>(universe_) * 0x9e3779b97f4a7c15ULL;
    for (auto w : words_) h ^= std::hash<std::uint64_t>{}(w) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
}

Graph::Graph(int vertex_count, std::vector<Edge> edges)
    : vertex_count_(vertex_count), edges_(std::move(edges)),
      out_(static_cast<std::size_t>(vertex_count)), in_(static_cast<std::size_t>(vertex_count)) {
    if (vertex_count < 0) throw std::invalid_argument("Graph: negative vertex count");
    for (EdgeId e = 0; e < edge_count(); ++e) {
        const Edge& ed = edges_[static_cast<std::size_t>(e)];
        if (ed.tail < 0 || ed.tail >= vertex_count || ed.head < 0 || ed.head >= vertex_count)
            throw std::out_of_range("Graph: edge " + std::to_string(e) + " has an endpoint out of range");
        if (ed.tail == ed.head) throw std::invalid_argument("Graph: self-loop at edge " + std::to_string(e));
        out_[static_cast<std::size_t>(ed.tail)].push_back(e);
        in_[static_cast<std::size_t>(ed.head)].push_back(e);
    }
}

bool Graph::incidence_consistent() const {
    Graph rebuilt(vertex_count_, edges_);
    return rebuilt.out_ == out_ && rebuilt.in_ == in_;
}

Graph grid_graph(int rows, int cols) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("grid_graph: rows and cols must be positive");
    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(rows * (cols - 1) + (rows - 1) * cols));
    auto id = [cols](int r, int c) { return r * cols + c; };
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c + 1 < cols; ++c) edges.push_back({id(r, c), id(r, c + 1)});
    for (int r = 0; r + 1 < rows; ++r)
        for (int c = 0; c < cols; ++c) edges.push_back({id(r, c), id(r + 1, c)});
    return Graph(rows * cols, std::move(edges));
}

Graph path_graph(int n) {
    if (n < 1) throw std::invalid_argument("path_graph: n must be positive");
    std::vector<Edge> edges;
    for (int v = 0; v + 1 < n; ++v) edges.push_back({v, v + 1});
    return Graph(n, std::move(edges));
}

Graph cycle_graph(int n) {
    if (n < 3) throw std::invalid_argument("cycle_graph: n must be at least 3");
    std::vector<Edge> edges;
    for (int v = 0; v < n; ++v) edges.push_back({v, (v + 1) % n});
    return Graph(n, std::move(edges));
}

Boundary boundary(const Graph& g, const VertexSet& s) {
    if (s.universe() != g.vertex_count())
        throw std::out_of_range("boundary: vertex set universe does not match graph");
    Boundary b;
    for (EdgeId e = 0; e < g.edge_count(); ++e) {
        const Edge& ed = g.edge(e);
        bool t = s.contains(ed.tail);
        bool h = s.contains(ed.head);
        if (t && !h) b.out_edges.push_back(e);
        else if (!t && h) b.in_edges.push_back(e);
    }
    return b;
}

bool is_induced_connected(const Graph& g, const VertexSet& s) {
    if (s.universe() != g.vertex_count())
        throw std::out_of_range("is_induced_connected: vertex set universe does not match graph");
    VertexId start = s.first();
    if (start < 0) throw std::invalid_argument("is_induced_connected: empty vertex set");
    VertexSet seen(g.vertex_count());
    std::vector<VertexId> stack{start};
    seen.insert(start);
    int reached = 1;
    while (!stack.empty()) {
        VertexId v = stack.back();
        stack.pop_back();
        auto relax = [&](EdgeId e) {
            VertexId w = g.other_end(e, v);
            if (s.contains(w) && !seen.contains(w)) {
                seen.insert(w);
                ++reached;
                stack.push_back(w);
            }
        };
        for (EdgeId e : g.out_edges(v)) relax(e);
        for (EdgeId e : g.in_edges(v)) relax(e);
    }
    return reached == s.count();
}

namespace {

struct SubsetEnumerator {
    const Graph& g;
    const std::function<void(const VertexSet&)>& visit;
    std::optional<std::int64_t> max_count;
    std::int64_t produced = 0;
    VertexId root = 0;
    VertexSet current;
    VertexSet seen;  // current, banned, or already in the frontier

    void emit() {
        if (max_count && produced >= *max_count)
            throw CountExceeded("connected subset enumeration exceeded " + std::to_string(*max_count) + " sets");
        ++produced;
        visit(current);
    }

    void grow(std::vector<VertexId> frontier) {
        emit();
        for (std::size_t i = 0; i < frontier.size(); ++i) {
            VertexId w = frontier[i];
            std::vector<VertexId> next(frontier.begin() + static_cast<std::ptrdiff_t>(i) + 1, frontier.end());
            std::vector<VertexId> added;
            auto offer = [&](EdgeId e) {
                VertexId x = g.other_end(e, w);
                if (x > root && !seen.contains(x)) {
                    seen.insert(x);
                    added.push_back(x);
                    next.push_back(x);
                }
            };
            for (EdgeId e : g.out_edges(w)) offer(e);
            for (EdgeId e : g.in_edges(w)) offer(e);
            current.insert(w);
            grow(std::move(next));
            current.erase(w);
            for (VertexId x : added) seen.erase(x);
            // w stays in `seen`: later siblings must not re-add it. Whoever
            // added it to `seen` removes it.
        }
    }
};

}  // namespace

std::int64_t enumerate_connected_subsets(const Graph& g, const std::function<void(const VertexSet&)>& visit,
                                         std::optional<std::int64_t> max_count) {
    SubsetEnumerator en{g, visit, max_count, 0, 0, VertexSet(g.vertex_count()), VertexSet(g.vertex_count())};
    for (VertexId r = 0; r < g.vertex_count(); ++r) {
        en.root = r;
        en.current.insert(r);
        en.seen.insert(r);
        std::vector<VertexId> frontier;
        auto offer = [&](EdgeId e) {
            VertexId x = g.other_end(e, r);
            if (x > r && !en.seen.contains(x)) {
                en.seen.insert(x);
                frontier.push_back(x);
            }
        };
        for (EdgeId e : g.out_edges(r)) offer(e);
        for (EdgeId e : g.in_edges(r)) offer(e);
        en.grow(frontier);
        for (VertexId x : frontier) en.seen.erase(x);
        en.current.erase(r);
        en.seen.erase(r);
    }
    return en.produced;
}

std::vector<VertexSet> connected_subsets(const Graph& g, std::optional<std::int64_t> max_count) {
    std::vector<VertexSet> out;
    enumerate_connected_subsets(g, [&](const VertexSet& s) { out.push_back(s); }, max_count);
    return out;
}

std::int64_t count_connected_subsets(const Graph& g, std::optional<std::int64_t> max_count) {
    return enumerate_connected_subsets(g, [](const VertexSet&) {}, max_count);
}

}  // namespace gtv
