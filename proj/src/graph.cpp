#include "opdyn/graph.hpp"

#include <algorithm>
#include <string>

#include "opdyn/errors.hpp"

namespace opdyn {

SocialGraph SocialGraph::build(int n, std::vector<Edge> edges) {
    if (n <= 1) fail(errc::too_few_nodes, "a social network needs more than one agent, got " + std::to_string(n));
    for (const Edge& e : edges)
        if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n)
            fail(errc::endpoint_out_of_range, "edge (" + std::to_string(e.from + 1) + ", " +
                                                  std::to_string(e.to + 1) + ") is outside 1.." +
                                                  std::to_string(n));

    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    SocialGraph g;
    g.n_ = n;
    for (int i = 0; i < n; ++i) {
        const Edge loop{i, i};
        if (!std::binary_search(edges.begin(), edges.end(), loop)) {
            edges.push_back(loop);
            g.added_self_loops_.push_back(i);
        }
    }
    std::sort(edges.begin(), edges.end());

    g.edges_ = std::move(edges);
    g.out_.resize(static_cast<std::size_t>(n));
    for (const Edge& e : g.edges_) g.out_[static_cast<std::size_t>(e.from)].push_back(e.to);
    return g;
}

bool SocialGraph::has_edge(Edge e) const {
    return std::binary_search(edges_.begin(), edges_.end(), e);
}

int SocialGraph::edge_index(Edge e) const {
    const auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
    if (it == edges_.end() || *it != e) return -1;
    return static_cast<int>(it - edges_.begin());
}

bool reaches_target_set(const SocialGraph& g, const std::vector<int>& targets) {
    const int n = g.node_count();
    for (int t : targets)
        if (t < 0 || t >= n) fail(errc::endpoint_out_of_range, "target node " + std::to_string(t + 1) + " is outside 1.." + std::to_string(n));
    if (targets.empty()) return false;

    // Edge (i, j) lets i reach j, so walk edges backwards from the targets.
    std::vector<std::vector<int>> in(static_cast<std::size_t>(n));
    for (const Edge& e : g.edge_list()) in[static_cast<std::size_t>(e.to)].push_back(e.from);

    std::vector<char> reached(static_cast<std::size_t>(n), 0);
    std::vector<int> queue;
    for (int t : targets)
        if (!reached[static_cast<std::size_t>(t)]) {
            reached[static_cast<std::size_t>(t)] = 1;
            queue.push_back(t);
        }
    while (!queue.empty()) {
        const int j = queue.back();
        queue.pop_back();
        for (int i : in[static_cast<std::size_t>(j)])
            if (!reached[static_cast<std::size_t>(i)]) {
                reached[static_cast<std::size_t>(i)] = 1;
                queue.push_back(i);
            }
    }
    return std::all_of(reached.begin(), reached.end(), [](char c) { return c != 0; });
}

Matrix DegreeMatrix::to_matrix() const {
    std::vector<double> d(diagonal.begin(), diagonal.end());
    return Matrix::diagonal(d);
}

DegreeMatrix degree_matrix(const SocialGraph& g) {
    DegreeMatrix d;
    d.diagonal.reserve(static_cast<std::size_t>(g.node_count()));
    for (int i = 0; i < g.node_count(); ++i) d.diagonal.push_back(g.degree(i));
    return d;
}

}  // namespace opdyn
