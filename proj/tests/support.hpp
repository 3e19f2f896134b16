#pragma once

// Shared fixtures, generators and independent oracles for the test suites.
// Everything here is deterministic: generators take explicit RngStream
// seeds so a failing case can be replayed.

#include <algorithm>
#include <cmath>
#include <vector>

#include "opdyn/graph.hpp"
#include "opdyn/linalg.hpp"
#include "opdyn/matrix.hpp"
#include "opdyn/model.hpp"
#include "opdyn/rng.hpp"

namespace opdyn::test {

// Four-agent influence network: rows 1, 2, 4 listen to everyone, agent 3
// only to itself (totally stubborn). 13 directed edges including self-loops.
inline SocialGraph paper_graph() {
    std::vector<Edge> edges;
    for (int i : {0, 1, 3})
        for (int j = 0; j < 4; ++j) edges.push_back({i, j});
    edges.push_back({2, 2});
    return SocialGraph::build(4, edges);
}

inline Matrix paper_w() {
    return Matrix::from_rows(4, 4,
                             {.220, .120, .360, .300,  //
                              .147, .215, .344, .294,  //
                              0, 0, 1, 0,              //
                              .090, .178, .446, .286});
}

inline std::vector<double> paper_u() { return {25.0, 25.0, 75.0, 85.0}; }

inline FJModel paper_fj_model() { return FJModel::create(paper_graph(), paper_w(), paper_u()); }

// Published limit quantities for the same network (3-decimal print-outs).
inline std::vector<double> paper_x_limit() { return {60.0, 60.0, 75.0, 75.0}; }

inline Matrix paper_total_effects() {
    return Matrix::from_rows(4, 4,
                             {.280, .045, .551, .124,  //
                              .047, .278, .549, .126,  //
                              0, 0, 1, 0,              //
                              .030, .048, .532, .390});
}

inline std::vector<double> paper_h() { return {.945, .946, 0.0, .928}; }

inline Matrix paper_gamma() {
    return Matrix::from_rows(4, 4,
                             {.356, .099, .297, .248,  //
                              .122, .349, .285, .244,  //
                              0, 0, 1.0, 0,            //
                              .069, .137, .343, .451});
}

inline GossipModel paper_gossip_model() { return fj_to_gossip(paper_fj_model()); }

inline double uniform(RngStream& rng, double lo, double hi) {
    return lo + (hi - lo) * rng.next_unit();
}

// Random directed graph with guaranteed self-loops; when min_degree is 2
// every node also gets at least one non-self neighbor.
inline SocialGraph random_graph(RngStream& rng, int max_nodes = 10, int min_degree = 1) {
    const int n = 2 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_nodes - 1)));
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i) {
        edges.push_back({i, i});
        int extra = 0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            if (rng.next_unit() < 0.4) {
                edges.push_back({i, j});
                ++extra;
            }
        }
        if (min_degree >= 2 && extra == 0) {
            int j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(n - 1)));
            if (j >= i) ++j;
            edges.push_back({i, j});
        }
    }
    return SocialGraph::build(n, edges);
}

// Random row-stochastic W supported on the graph with a positive diagonal
// (so the convergence hypothesis holds and I - Lambda W stays well
// conditioned: the raw self-weight dominates at least 1/(d+1) of its row).
inline FJModel random_fj_model(RngStream& rng, int max_nodes = 10, int min_degree = 2) {
    const SocialGraph g = random_graph(rng, max_nodes, min_degree);
    const int n = g.node_count();
    Matrix w(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (int j : g.neighbors(i)) {
            const double raw = (j == i) ? 1.0 + rng.next_unit() : uniform(rng, 0.05, 1.0);
            w(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = raw;
            sum += raw;
        }
        for (int j : g.neighbors(i))
            w(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) /= sum;
    }
    std::vector<double> u(static_cast<std::size_t>(n));
    for (double& v : u) v = uniform(rng, 0.0, 100.0);
    return FJModel::create(g, std::move(w), std::move(u));
}

// Random gossip model; openness mixes interior values with exact 0 and 1.
// When require_assumption is set, resamples until some open agent is
// reachable from everywhere.
inline GossipModel random_gossip_model(RngStream& rng, int max_nodes = 10,
                                       bool require_assumption = true) {
    for (;;) {
        const SocialGraph g = random_graph(rng, max_nodes);
        const int n = g.node_count();
        std::vector<double> h(static_cast<std::size_t>(n));
        for (double& v : h) {
            const double pick = rng.next_unit();
            v = pick < 0.1 ? 0.0 : (pick > 0.9 ? 1.0 : rng.next_unit());
        }
        Matrix gamma(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            double sum = 0.0;
            for (int j : g.neighbors(i)) {
                const double raw = uniform(rng, 0.05, 1.0);
                gamma(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = raw;
                sum += raw;
            }
            for (int j : g.neighbors(i))
                gamma(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) /= sum;
        }
        std::vector<double> u(static_cast<std::size_t>(n));
        for (double& v : u) v = uniform(rng, 0.0, 100.0);
        GossipModel m = GossipModel::create(g, std::move(h), std::move(gamma), std::move(u));
        if (!require_assumption || validate_gossip_assumption(m)) return m;
    }
}

// Test-local reachability oracle (distinct from the library BFS): iterated
// boolean closure over the positive-entry graph.
inline bool reaches_deficiency_oracle(const Matrix& m, double tol = 1e-9) {
    const std::size_t n = m.rows();
    std::vector<char> good(n, 0);
    for (std::size_t i = 0; i < n; ++i) good[i] = m.row_sum(i) < 1.0 - tol;
    for (std::size_t pass = 0; pass < n; ++pass)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (!good[i] && good[j] && m(i, j) > 0.0) good[i] = 1;
    return std::all_of(good.begin(), good.end(), [](char c) { return c != 0; });
}

// Random 5x5 substochastic matrix: each row keeps at most three positive
// entries, a random nonempty subset of rows is deficient, and rejection
// guarantees every node reaches a deficient row (per the oracle above).
inline Matrix random_substochastic_reachable(RngStream& rng) {
    constexpr std::size_t n = 5;
    for (;;) {
        Matrix m(n, n);
        std::uint64_t deficient = 1 + rng.next_below((1ULL << n) - 1);
        for (std::size_t i = 0; i < n; ++i) {
            const int support = 1 + static_cast<int>(rng.next_below(3));
            double sum = 0.0;
            for (int s = 0; s < support; ++s) {
                const std::size_t j = static_cast<std::size_t>(rng.next_below(n));
                const double raw = uniform(rng, 0.1, 1.0);
                m(i, j) += raw;
                sum += raw;
            }
            const double target = (deficient >> i) & 1 ? uniform(rng, 0.2, 0.8) : 1.0;
            for (std::size_t j = 0; j < n; ++j) m(i, j) *= target / sum;
        }
        if (reaches_deficiency_oracle(m)) return m;
    }
}

// Long plain power iteration; used as an independent check on the library's
// repeated-squaring estimator for nonnegative matrices with a positive
// diagonal (where the per-step ratio settles).
inline double power_iteration_oracle(const Matrix& m, int iterations = 200000) {
    const std::size_t n = m.rows();
    std::vector<double> x(n, 1.0);
    double ratio = 0.0;
    for (int it = 0; it < iterations; ++it) {
        std::vector<double> y = m * x;
        const double norm = inf_norm(y);
        if (norm == 0.0) return 0.0;
        ratio = norm / inf_norm(x);
        for (double& v : y) v /= norm;
        x = std::move(y);
    }
    return ratio;
}

}  // namespace opdyn::test
