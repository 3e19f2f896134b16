#pragma once

#include <compare>
#include <cstddef>
#include <vector>

#include "opdyn/matrix.hpp"

namespace opdyn {

/// Directed edge (i, j): agent j may directly influence agent i.
/// Node ids are 0-based everywhere inside the library; file formats and
/// CLI output use 1-based ids.
struct Edge {
    int from = 0;
    int to = 0;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Directed social network with mandatory self-loops. Immutable after
/// construction; the canonical lexicographic edge order defines the edge
/// indexing used for reproducible uniform sampling.
class SocialGraph {
public:
    /// A default-constructed graph is empty; build() is the way to obtain a
    /// valid one.
    SocialGraph() = default;

    /// Validates endpoints, deduplicates, adds any missing self-loops
    /// (recorded in auto_added_self_loops) and canonicalizes the edge list.
    /// Throws TooFewNodes for n <= 1 and EndpointOutOfRange for bad ids.
    static SocialGraph build(int n, std::vector<Edge> edges);

    int node_count() const noexcept { return n_; }
    int edge_count() const noexcept { return static_cast<int>(edges_.size()); }

    /// N_i: sorted out-neighbors of i (always contains i itself).
    const std::vector<int>& neighbors(int i) const { return out_[static_cast<std::size_t>(i)]; }
    int degree(int i) const { return static_cast<int>(neighbors(i).size()); }

    /// Canonical lexicographically ordered edge list.
    const std::vector<Edge>& edge_list() const noexcept { return edges_; }

    bool has_edge(Edge e) const;
    /// Position of e in the canonical edge list, or -1 if absent.
    int edge_index(Edge e) const;

    /// Nodes whose self-loop was supplied by build() rather than the input.
    const std::vector<int>& auto_added_self_loops() const noexcept { return added_self_loops_; }

private:
    int n_ = 0;
    std::vector<std::vector<int>> out_;
    std::vector<Edge> edges_;
    std::vector<int> added_self_loops_;
};

/// True iff every node has a directed path (possibly of length zero) to some
/// node in targets. Implemented as reverse BFS from the target set.
bool reaches_target_set(const SocialGraph& g, const std::vector<int>& targets);

/// Diagonal degree matrix D with D_ii = d_i = |N_i|.
struct DegreeMatrix {
    std::vector<int> diagonal;
    Matrix to_matrix() const;
};

DegreeMatrix degree_matrix(const SocialGraph& g);

}  // namespace opdyn
