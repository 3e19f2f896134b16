#pragma once

#include <optional>
#include <vector>

#include "opdyn/graph.hpp"
#include "opdyn/matrix.hpp"

namespace opdyn {

/// Synchronous opinion model: x(k+1) = Lambda W x(k) + (I - Lambda) u,
/// with x(0) = u. W holds the interpersonal influence weights, the diagonal
/// Lambda = I - diag(W) the susceptibilities, and u the prejudices that are
/// re-injected as a constant input at every step.
class FJModel {
public:
    /// A default-constructed model is empty; create() is the way to obtain
    /// a valid one.
    FJModel() = default;

    /// Validates: W row-stochastic (within tol), supported on the graph's
    /// edges, and dimensionally consistent with u. Lambda is derived from W.
    static FJModel create(SocialGraph graph, Matrix influence, std::vector<double> prejudice,
                          double tol = 1e-9);

    const SocialGraph& graph() const noexcept { return graph_; }
    const Matrix& influence() const noexcept { return w_; }                       // W
    const std::vector<double>& susceptibility() const noexcept { return lambda_; } // diag(Lambda)
    const std::vector<double>& prejudice() const noexcept { return u_; }           // u
    int agent_count() const noexcept { return graph_.node_count(); }

    friend bool operator==(const FJModel& a, const FJModel& b);

private:
    SocialGraph graph_;
    Matrix w_;
    std::vector<double> lambda_;
    std::vector<double> u_;
};

/// Randomized pairwise model: at each step one directed edge (i, j) is
/// sampled and agent i moves to a convex combination of its own belief,
/// agent j's belief, and its prejudice:
///   x_i <- h_i ((1 - gamma_ij) x_i + gamma_ij x_j) + (1 - h_i) u_i.
/// h_i = 0 makes agent i totally stubborn, h_i = 1 totally open-minded.
class GossipModel {
public:
    /// A default-constructed model is empty; create() is the way to obtain
    /// a valid one.
    GossipModel() = default;

    /// Validates: h in [0,1], Gamma row-stochastic (within tol) and supported
    /// on the graph, and edge_weights (when given) positive summing to 1.
    /// Absent edge_weights means the uniform law over the edge list.
    static GossipModel create(SocialGraph graph, std::vector<double> openness, Matrix mixing,
                              std::vector<double> prejudice,
                              std::optional<std::vector<double>> edge_weights = {},
                              double tol = 1e-9);

    const SocialGraph& graph() const noexcept { return graph_; }
    const std::vector<double>& openness() const noexcept { return h_; }  // diag(H)
    const Matrix& mixing() const noexcept { return gamma_; }             // Gamma
    const std::vector<double>& prejudice() const noexcept { return u_; } // u
    int agent_count() const noexcept { return graph_.node_count(); }

    bool uniform_edges() const noexcept { return !weights_.has_value(); }
    const std::optional<std::vector<double>>& edge_weights() const noexcept { return weights_; }
    /// Probability of edge_list()[index] under the sampling law.
    double edge_weight(int index) const;
    /// Cumulative weights for inverse-CDF sampling; empty in the uniform case.
    const std::vector<double>& cumulative_weights() const noexcept { return cumulative_; }

    friend bool operator==(const GossipModel& a, const GossipModel& b);

private:
    GossipModel() = default;
    SocialGraph graph_;
    std::vector<double> h_;
    Matrix gamma_;
    std::vector<double> u_;
    std::optional<std::vector<double>> weights_;
    std::vector<double> cumulative_;
};

/// One-edge update written as x(k+1) = A x(k) + B u. A differs from the
/// identity only in row i; B is zero except B_ii = 1 - h_i, and row i of A
/// and row i of B together sum to one.
struct AffinePair {
    Matrix a;
    Matrix b;
    Edge edge;
};

/// Deterministic recursion followed by E[x(k)]: Abar and Bbar averaged over
/// the edge law. The fixed point and spectral radius are present only when
/// the reachability assumption holds (otherwise the expected dynamics need
/// not converge and the fixed point may not exist).
struct ExpectedDynamics {
    Matrix abar;
    std::vector<double> bbar_u;  // Bbar applied to the prejudice vector
    std::optional<std::vector<double>> x_star;
    std::optional<double> rho;
};

struct FJLimit {
    std::vector<double> x_limit;  // x'
    Matrix total_effects;         // V = (I - Lambda W)^-1 (I - Lambda), row-stochastic
};

/// One synchronous step: Lambda W x + (I - Lambda) u.
std::vector<double> fj_step(const FJModel& m, const std::vector<double>& x);

/// True iff every node has a path, along positive-W edges, to a node m with
/// W_mm > 0. This is the hypothesis under which the synchronous dynamics
/// converges.
bool validate_fj_assumption(const FJModel& m);

/// Limit opinions x' and total-effects matrix V. V is computed column by
/// column via n linear solves; x' by one more direct solve. Throws
/// AssumptionViolated when validate_fj_assumption fails.
FJLimit fj_limit(const FJModel& m);

/// Applies the one-edge update; coordinates other than edge.from are
/// unchanged. Throws EdgeNotInGraph for edges outside the edge list.
std::vector<double> gossip_step(const GossipModel& m, const std::vector<double>& x, Edge edge);

/// In-place variant for a trajectory loop that owns its state vector.
void gossip_step_inplace(const GossipModel& m, std::vector<double>& x, Edge edge);

/// The (A, B) pair of one edge; gossip_step(m, x, e) == A x + B u for all x.
AffinePair affine_pair(const GossipModel& m, Edge edge);

/// True iff every node has a path in the graph to a node m with h_m < 1.
bool validate_gossip_assumption(const GossipModel& m);

/// Edge-weighted average of the affine pairs (enumeration over the edge
/// list, which under uniform weights equals the closed form
/// I - (D(I-H) + H(I-Gamma)) / |E|). Fixed point and rho are filled only
/// when validate_gossip_assumption holds.
ExpectedDynamics expected_dynamics(const GossipModel& m);

/// Solves (D(I-H) + H(I-Gamma)) x* = D(I-H) u, the limit of the expected
/// opinions. Throws AssumptionViolated when the reachability assumption
/// fails, SingularMatrix if the solve breaks down.
std::vector<double> gossip_fixed_point(const GossipModel& m);

/// Parameter mapping from the synchronous model onto the gossip model:
///   h_i = (d_i - (1 - lambda_ii)) / d_i       (0 when d_i = 1)
///   gamma_ii = (d_i(1-h_i) + h_i - (1 - lambda_ii W_ii)) / h_i
///   gamma_ij = lambda_ii W_ij / h_i           (i != j)
/// with the degenerate d_i = 1 rows pinned to gamma_ii = 1. The result
/// satisfies D(I-H) = I - Lambda and D(I-H) + H(I-Gamma) = I - Lambda W
/// (both verified to 1e-12 at construction), hence its expected dynamics is
/// a lazy version of the synchronous iteration and shares its limit.
GossipModel fj_to_gossip(const FJModel& m);

}  // namespace opdyn
