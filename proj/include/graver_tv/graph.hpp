#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace gtv {

using VertexId = int;
using EdgeId = int;

/// Dense bitset over vertex ids 0..n-1.
class VertexSet {
public:
    VertexSet() = default;
    explicit VertexSet(int universe);
    VertexSet(int universe, std::initializer_list<VertexId> members);

    static VertexSet from_members(int universe, const std::vector<VertexId>& members);
    static VertexSet full(int universe);

    int universe() const { return universe_; }
    bool contains(VertexId v) const {
        return (words_[static_cast<std::size_t>(v) >> 6] >> (v & 63)) & 1u;
    }
    void insert(VertexId v);
    void erase(VertexId v);
    int count() const;
    bool empty() const;
    std::vector<VertexId> members() const;

    /// Smallest member, or -1 when empty.
    VertexId first() const;

    bool operator==(const VertexSet& other) const = default;
    bool operator<(const VertexSet& other) const;

    std::size_t hash() const;

private:
    void check(VertexId v) const;

    int universe_ = 0;
    std::vector<std::uint64_t> words_;
};

struct VertexSetHash {
    std::size_t operator()(const VertexSet& s) const { return s.hash(); }
};

struct Edge {
    VertexId tail;
    VertexId head;
    bool operator==(const Edge&) const = default;
};

/// Directed graph with stable vertex and edge ids. Immutable once built.
class Graph {
public:
    Graph() = default;
    Graph(int vertex_count, std::vector<Edge> edges);

    int vertex_count() const { return vertex_count_; }
    int edge_count() const { return static_cast<int>(edges_.size()); }
    const std::vector<Edge>& edges() const { return edges_; }
    const Edge& edge(EdgeId e) const { return edges_.at(static_cast<std::size_t>(e)); }

    /// Edges whose tail is v.
    const std::vector<EdgeId>& out_edges(VertexId v) const { return out_[static_cast<std::size_t>(v)]; }
    /// Edges whose head is v.
    const std::vector<EdgeId>& in_edges(VertexId v) const { return in_[static_cast<std::size_t>(v)]; }

    /// The endpoint of e that is not v.
    VertexId other_end(EdgeId e, VertexId v) const {
        const Edge& ed = edges_[static_cast<std::size_t>(e)];
        return ed.tail == v ? ed.head : ed.tail;
    }

    /// Rebuilds the incidence index from the edge list and compares.
    bool incidence_consistent() const;

    bool operator==(const Graph& other) const {
        return vertex_count_ == other.vertex_count_ && edges_ == other.edges_;
    }

private:
    int vertex_count_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<EdgeId>> out_;
    std::vector<std::vector<EdgeId>> in_;
};

/// rows x cols grid, row-major ids; horizontal edges point left to right,
/// vertical edges top to bottom.
Graph grid_graph(int rows, int cols);
Graph path_graph(int n);
Graph cycle_graph(int n);

struct Boundary {
    std::vector<EdgeId> out_edges;  // tail in S, head outside
    std::vector<EdgeId> in_edges;   // tail outside, head in S
};

Boundary boundary(const Graph& g, const VertexSet& s);

/// Weak connectivity of the subgraph induced by s. Throws on empty s.
bool is_induced_connected(const Graph& g, const VertexSet& s);

class CountExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Calls visit once for every nonempty vertex set inducing a weakly
/// connected subgraph. Sets are grown from their minimal vertex with a
/// banned set, so no set is produced twice. Throws CountExceeded once more
/// than max_count sets would be produced. Returns the number visited.
std::int64_t enumerate_connected_subsets(const Graph& g,
                                         const std::function<void(const VertexSet&)>& visit,
                                         std::optional<std::int64_t> max_count = std::nullopt);

std::vector<VertexSet> connected_subsets(const Graph& g,
                                         std::optional<std::int64_t> max_count = std::nullopt);

std::int64_t count_connected_subsets(const Graph& g,
                                     std::optional<std::int64_t> max_count = std::nullopt);

}  // namespace gtv
