#include "coex/graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace coex {

void Graph::add_edge(std::size_t a, std::size_t b)
{
    if (a >= n_ || b >= n_) throw std::out_of_range("Graph::add_edge: vertex out of range");
    if (a == b) throw std::invalid_argument("Graph::add_edge: self edge");
    if (has_edge(a, b)) return;
    adj_[a * n_ + b] = 1;
    adj_[b * n_ + a] = 1;
    nbrs_[a].insert(std::lower_bound(nbrs_[a].begin(), nbrs_[a].end(), b), b);
    nbrs_[b].insert(std::lower_bound(nbrs_[b].begin(), nbrs_[b].end(), a), a);
}

std::size_t Graph::edge_count() const
{
    std::size_t twice = 0;
    for (const auto& n : nbrs_) twice += n.size();
    return twice / 2;
}

Graph Graph::induced(const std::vector<std::size_t>& vertices) const
{
    Graph g(vertices.size());
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        for (std::size_t j = i + 1; j < vertices.size(); ++j) {
            if (has_edge(vertices[i], vertices[j])) g.add_edge(i, j);
        }
    }
    return g;
}

std::vector<std::vector<std::size_t>> Graph::components() const
{
    std::vector<std::vector<std::size_t>> out;
    std::vector<char> seen(n_, 0);
    for (std::size_t s = 0; s < n_; ++s) {
        if (seen[s]) continue;
        std::vector<std::size_t> comp{s};
        seen[s] = 1;
        for (std::size_t k = 0; k < comp.size(); ++k) {
            for (auto w : nbrs_[comp[k]]) {
                if (!seen[w]) {
                    seen[w] = 1;
                    comp.push_back(w);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
    }
    return out;
}

}  // namespace coex
