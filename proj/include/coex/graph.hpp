#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace coex {

/// Undirected simple graph on vertices 0..n-1, stored as a dense matrix
/// plus sorted neighbor lists.
class Graph {
public:
    Graph() = default;
    explicit Graph(std::size_t n) : n_(n), adj_(n * n, 0), nbrs_(n) {}

    std::size_t size() const { return n_; }

    void add_edge(std::size_t a, std::size_t b);
    bool has_edge(std::size_t a, std::size_t b) const { return adj_[a * n_ + b] != 0; }
    const std::vector<std::size_t>& neighbors(std::size_t v) const { return nbrs_[v]; }
    std::size_t degree(std::size_t v) const { return nbrs_[v].size(); }
    std::size_t edge_count() const;

    /// Subgraph induced by `vertices`; vertex i of the result is vertices[i].
    Graph induced(const std::vector<std::size_t>& vertices) const;

    /// Connected components, each sorted ascending, ordered by smallest vertex.
    std::vector<std::vector<std::size_t>> components() const;

    bool operator==(const Graph& other) const { return n_ == other.n_ && adj_ == other.adj_; }

private:
    std::size_t n_ = 0;
    std::vector<std::uint8_t> adj_;
    std::vector<std::vector<std::size_t>> nbrs_;
};

}  // namespace coex
