#include "opdyn/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "opdyn/errors.hpp"
#include "opdyn/linalg.hpp"

namespace opdyn {

namespace {

// Entries that land just outside [0,1] from rounding are snapped back;
// anything further out is a real violation and is left for validation.
double clamp_unit(double v, double slack = 1e-12) {
    if (v < 0.0 && v >= -slack) return 0.0;
    if (v > 1.0 && v <= 1.0 + slack) return 1.0;
    return v;
}

void require_supported(const SocialGraph& g, const Matrix& m, const char* name) {
    const int n = g.node_count();
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) != 0.0 &&
                !g.has_edge({i, j}))
                fail(errc::validation_error, std::string(name) + "(" + std::to_string(i + 1) + ", " +
                                                 std::to_string(j + 1) +
                                                 ") is nonzero but the edge is not in the graph");
}

void require_row_stochastic(const Matrix& m, const char* name, double tol) {
    const StochasticityClass cls = classify_stochasticity(m, tol);
    if (cls.kind != StochasticityKind::RowStochastic) {
        for (std::size_t i = 0; i < m.rows(); ++i) {
            for (std::size_t j = 0; j < m.cols(); ++j)
                if (m(i, j) < -tol)
                    fail(errc::validation_error, std::string(name) + "(" + std::to_string(i + 1) +
                                                     ", " + std::to_string(j + 1) + ") is negative");
            const double s = m.row_sum(i);
            if (std::abs(s - 1.0) > tol)
                fail(errc::validation_error, "row " + std::to_string(i + 1) + " of " + name +
                                                 " sums to " + std::to_string(s) +
                                                 ", expected 1 (row-stochasticity)");
        }
        fail(errc::validation_error, std::string(name) + " is not row-stochastic");
    }
}

}  // namespace

FJModel FJModel::create(SocialGraph graph, Matrix influence, std::vector<double> prejudice,
                        double tol) {
    const auto n = static_cast<std::size_t>(graph.node_count());
    if (influence.rows() != n || influence.cols() != n)
        fail(errc::dimension_mismatch, "W must be " + std::to_string(n) + "x" + std::to_string(n));
    if (prejudice.size() != n)
        fail(errc::dimension_mismatch, "u must have length " + std::to_string(n));
    for (double v : prejudice)
        if (!std::isfinite(v)) fail(errc::validation_error, "u contains a non-finite entry");
    if (!influence.all_finite()) fail(errc::validation_error, "W contains a non-finite entry");

    require_supported(graph, influence, "W");
    require_row_stochastic(influence, "W", tol);

    FJModel m;
    m.graph_ = std::move(graph);
    m.w_ = std::move(influence);
    m.u_ = std::move(prejudice);
    m.lambda_.resize(n);
    for (std::size_t i = 0; i < n; ++i) m.lambda_[i] = clamp_unit(1.0 - m.w_(i, i));
    return m;
}

bool operator==(const FJModel& a, const FJModel& b) {
    return a.graph_.node_count() == b.graph_.node_count() &&
           a.graph_.edge_list() == b.graph_.edge_list() && a.w_ == b.w_ && a.u_ == b.u_;
}

GossipModel GossipModel::create(SocialGraph graph, std::vector<double> openness, Matrix mixing,
                                std::vector<double> prejudice,
                                std::optional<std::vector<double>> edge_weights, double tol) {
    const auto n = static_cast<std::size_t>(graph.node_count());
    if (openness.size() != n) fail(errc::dimension_mismatch, "H diagonal must have length " + std::to_string(n));
    if (mixing.rows() != n || mixing.cols() != n)
        fail(errc::dimension_mismatch, "Gamma must be " + std::to_string(n) + "x" + std::to_string(n));
    if (prejudice.size() != n) fail(errc::dimension_mismatch, "u must have length " + std::to_string(n));
    for (double v : prejudice)
        if (!std::isfinite(v)) fail(errc::validation_error, "u contains a non-finite entry");
    if (!mixing.all_finite()) fail(errc::validation_error, "Gamma contains a non-finite entry");

    for (std::size_t i = 0; i < n; ++i) {
        openness[i] = clamp_unit(openness[i]);
        if (!(openness[i] >= 0.0 && openness[i] <= 1.0))
            fail(errc::validation_error,
                 "h_" + std::to_string(i + 1) + " = " + std::to_string(openness[i]) + " is outside [0, 1]");
    }
    require_supported(graph, mixing, "Gamma");
    require_row_stochastic(mixing, "Gamma", tol);

    GossipModel m;
    m.graph_ = std::move(graph);
    m.h_ = std::move(openness);
    m.gamma_ = std::move(mixing);
    m.u_ = std::move(prejudice);

    if (edge_weights.has_value()) {
        const auto e = static_cast<std::size_t>(m.graph_.edge_count());
        if (edge_weights->size() != e)
            fail(errc::dimension_mismatch, "edge_weights must have one entry per edge (" + std::to_string(e) + ")");
        double sum = 0.0;
        for (std::size_t k = 0; k < e; ++k) {
            const double w = (*edge_weights)[k];
            if (!(w > 0.0))
                fail(errc::validation_error, "edge_weights[" + std::to_string(k + 1) + "] must be positive");
            sum += w;
        }
        if (std::abs(sum - 1.0) > tol)
            fail(errc::validation_error, "edge_weights sum to " + std::to_string(sum) + ", expected 1");
        m.cumulative_.resize(e);
        double acc = 0.0;
        for (std::size_t k = 0; k < e; ++k) {
            acc += (*edge_weights)[k];
            m.cumulative_[k] = acc;
        }
        m.cumulative_.back() = 1.0;  // guard the inverse CDF against roundoff
        m.weights_ = std::move(edge_weights);
    }
    return m;
}

double GossipModel::edge_weight(int index) const {
    if (index < 0 || index >= graph_.edge_count())
        fail(errc::edge_not_in_graph, "edge index " + std::to_string(index) + " out of range");
    if (!weights_) return 1.0 / static_cast<double>(graph_.edge_count());
    return (*weights_)[static_cast<std::size_t>(index)];
}

bool operator==(const GossipModel& a, const GossipModel& b) {
    return a.graph_.node_count() == b.graph_.node_count() &&
           a.graph_.edge_list() == b.graph_.edge_list() && a.h_ == b.h_ && a.gamma_ == b.gamma_ &&
           a.u_ == b.u_ && a.weights_ == b.weights_;
}

std::vector<double> fj_step(const FJModel& m, const std::vector<double>& x) {
    const auto n = static_cast<std::size_t>(m.agent_count());
    if (x.size() != n) fail(errc::dimension_mismatch, "state length does not match the model");
    const Matrix& w = m.influence();
    const std::vector<double>& lambda = m.susceptibility();
    const std::vector<double>& u = m.prejudice();
    std::vector<double> next(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += w(i, j) * x[j];
        next[i] = lambda[i] * s + (1.0 - lambda[i]) * u[i];
    }
    return next;
}

bool validate_fj_assumption(const FJModel& m) {
    // Restrict to positive-W edges and ask for a path to a positively
    // self-weighted node.
    const int n = m.agent_count();
    std::vector<Edge> support;
    for (const Edge& e : m.graph().edge_list())
        if (m.influence()(static_cast<std::size_t>(e.from), static_cast<std::size_t>(e.to)) > 0.0)
            support.push_back(e);
    std::vector<int> targets;
    for (int i = 0; i < n; ++i)
        if (m.influence()(static_cast<std::size_t>(i), static_cast<std::size_t>(i)) > 0.0)
            targets.push_back(i);
    if (targets.empty()) return false;
    // The restricted edge set may lose self-loops; rebuilding would re-add
    // them, so run the BFS directly here.
    std::vector<std::vector<int>> in(static_cast<std::size_t>(n));
    for (const Edge& e : support) in[static_cast<std::size_t>(e.to)].push_back(e.from);
    std::vector<char> reached(static_cast<std::size_t>(n), 0);
    std::vector<int> queue = targets;
    for (int t : queue) reached[static_cast<std::size_t>(t)] = 1;
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

FJLimit fj_limit(const FJModel& m) {
    if (!validate_fj_assumption(m))
        fail(errc::assumption_violated,
             "some agent has no path (along positive weights) to a positively self-weighted agent");

    const auto n = static_cast<std::size_t>(m.agent_count());
    const std::vector<double>& lambda = m.susceptibility();
    const Matrix& w = m.influence();

    Matrix coeff(n, n);  // I - Lambda W
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            coeff(i, j) = (i == j ? 1.0 : 0.0) - lambda[i] * w(i, j);

    FJLimit out;
    out.total_effects = Matrix(n, n);
    std::vector<double> rhs(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        rhs.assign(n, 0.0);
        rhs[j] = 1.0 - lambda[j];  // column j of I - Lambda
        const std::vector<double> col = solve_linear(coeff, rhs);
        for (std::size_t i = 0; i < n; ++i) out.total_effects(i, j) = col[i];
    }

    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = (1.0 - lambda[i]) * m.prejudice()[i];
    out.x_limit = solve_linear(coeff, b);
    return out;
}

std::vector<double> gossip_step(const GossipModel& m, const std::vector<double>& x, Edge edge) {
    std::vector<double> next = x;
    gossip_step_inplace(m, next, edge);
    return next;
}

void gossip_step_inplace(const GossipModel& m, std::vector<double>& x, Edge edge) {
    if (x.size() != static_cast<std::size_t>(m.agent_count()))
        fail(errc::dimension_mismatch, "state length does not match the model");
    if (!m.graph().has_edge(edge))
        fail(errc::edge_not_in_graph, "edge (" + std::to_string(edge.from + 1) + ", " +
                                          std::to_string(edge.to + 1) + ") is not in the graph");
    const auto i = static_cast<std::size_t>(edge.from);
    const auto j = static_cast<std::size_t>(edge.to);
    const double h = m.openness()[i];
    const double g = m.mixing()(i, j);
    const double ui = m.prejudice()[i];
    double v = h * ((1.0 - g) * x[i] + g * x[j]) + (1.0 - h) * ui;
    // The update is a convex combination of x_i, x_j and u_i; clamp to their
    // hull so the boundedness invariant survives floating-point rounding.
    const double lo = std::min({x[i], x[j], ui});
    const double hi = std::max({x[i], x[j], ui});
    x[i] = std::clamp(v, lo, hi);
}

AffinePair affine_pair(const GossipModel& m, Edge edge) {
    if (!m.graph().has_edge(edge))
        fail(errc::edge_not_in_graph, "edge (" + std::to_string(edge.from + 1) + ", " +
                                          std::to_string(edge.to + 1) + ") is not in the graph");
    const auto n = static_cast<std::size_t>(m.agent_count());
    const auto i = static_cast<std::size_t>(edge.from);
    const auto j = static_cast<std::size_t>(edge.to);
    const double h = m.openness()[i];
    const double g = m.mixing()(i, j);

    AffinePair p{Matrix::identity(n), Matrix(n, n), edge};
    for (std::size_t c = 0; c < n; ++c) p.a(i, c) = 0.0;
    p.a(i, i) = h * (1.0 - g);
    p.a(i, j) += h * g;  // += so a self-loop collapses to a single h_i entry
    p.b(i, i) = 1.0 - h;
    return p;
}

bool validate_gossip_assumption(const GossipModel& m) {
    std::vector<int> targets;
    for (int i = 0; i < m.agent_count(); ++i)
        if (m.openness()[static_cast<std::size_t>(i)] < 1.0 - 1e-12) targets.push_back(i);
    if (targets.empty()) return false;
    return reaches_target_set(m.graph(), targets);
}

ExpectedDynamics expected_dynamics(const GossipModel& m) {
    const auto n = static_cast<std::size_t>(m.agent_count());
    ExpectedDynamics out;
    out.abar = Matrix(n, n);
    out.bbar_u.assign(n, 0.0);

    const auto& edges = m.graph().edge_list();
    for (int k = 0; k < static_cast<int>(edges.size()); ++k) {
        const AffinePair p = affine_pair(m, edges[static_cast<std::size_t>(k)]);
        const double w = m.edge_weight(k);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) out.abar(i, j) += w * p.a(i, j);
        const auto i = static_cast<std::size_t>(edges[static_cast<std::size_t>(k)].from);
        out.bbar_u[i] += w * p.b(i, i) * m.prejudice()[i];
    }

    if (validate_gossip_assumption(m)) {
        out.x_star = gossip_fixed_point(m);
        out.rho = spectral_radius(out.abar);
    }
    return out;
}

std::vector<double> gossip_fixed_point(const GossipModel& m) {
    if (!validate_gossip_assumption(m))
        fail(errc::assumption_violated, "some agent has no path to an agent with openness below one");

    const auto n = static_cast<std::size_t>(m.agent_count());
    const DegreeMatrix deg = degree_matrix(m.graph());
    const std::vector<double>& h = m.openness();
    const Matrix& gamma = m.mixing();

    Matrix coeff(n, n);  // D(I-H) + H(I-Gamma)
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(deg.diagonal[i]);
        for (std::size_t j = 0; j < n; ++j) {
            const double id = (i == j) ? 1.0 : 0.0;
            coeff(i, j) = d * (1.0 - h[i]) * id + h[i] * (id - gamma(i, j));
        }
        rhs[i] = d * (1.0 - h[i]) * m.prejudice()[i];
    }
    return solve_linear(coeff, rhs);
}

GossipModel fj_to_gossip(const FJModel& m) {
    const auto n = static_cast<std::size_t>(m.agent_count());
    const std::vector<double>& lambda = m.susceptibility();
    const Matrix& w = m.influence();
    const DegreeMatrix deg = degree_matrix(m.graph());

    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(deg.diagonal[i]);
        h[i] = (deg.diagonal[i] == 1) ? 0.0 : (d - (1.0 - lambda[i])) / d;
        h[i] = clamp_unit(h[i]);
        if (h[i] < 0.0 || h[i] > 1.0)
            fail(errc::mapping_degenerate,
                 "mapped openness h_" + std::to_string(i + 1) + " = " + std::to_string(h[i]) +
                     " is outside [0, 1]");
        if (deg.diagonal[i] != 1 && h[i] == 0.0)
            fail(errc::mapping_degenerate, "agent " + std::to_string(i + 1) +
                                               " has degree > 1 but mapped openness 0; the mixing "
                                               "formula would divide by zero");
    }

    Matrix gamma(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(deg.diagonal[i]);
        if (deg.diagonal[i] == 1) {
            gamma(i, i) = 1.0;
            continue;
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j)
                gamma(i, i) = (d * (1.0 - h[i]) + h[i] - (1.0 - lambda[i] * w(i, i))) / h[i];
            else
                gamma(i, j) = lambda[i] * w(i, j) / h[i];
            gamma(i, j) = clamp_unit(gamma(i, j));
        }
    }

    GossipModel mapped = GossipModel::create(m.graph(), std::move(h), std::move(gamma), m.prejudice());

    // The mapping must reproduce the synchronous coefficients exactly:
    // D(I-H) = I - Lambda and D(I-H) + H(I-Gamma) = I - Lambda W.
    constexpr double kIdentityTol = 1e-12;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(deg.diagonal[i]);
        const double hi = mapped.openness()[i];
        if (std::abs(d * (1.0 - hi) - (1.0 - lambda[i])) > kIdentityTol)
            fail(errc::mapping_degenerate, "degree identity failed for agent " + std::to_string(i + 1));
        for (std::size_t j = 0; j < n; ++j) {
            const double id = (i == j) ? 1.0 : 0.0;
            const double lhs = d * (1.0 - hi) * id + hi * (id - mapped.mixing()(i, j));
            const double rhs = id - lambda[i] * w(i, j);
            if (std::abs(lhs - rhs) > kIdentityTol)
                fail(errc::mapping_degenerate, "coefficient identity failed at (" +
                                                   std::to_string(i + 1) + ", " + std::to_string(j + 1) + ")");
        }
    }
    return mapped;
}

}  // namespace opdyn
