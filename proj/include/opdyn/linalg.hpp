#pragma once

#include <vector>

#include "opdyn/matrix.hpp"

namespace opdyn {

/// Solves A x = b by Gaussian elimination with partial pivoting.
/// Throws SingularMatrix when a pivot falls below 1e-12 times the largest
/// initial magnitude of its column.
std::vector<double> solve_linear(const Matrix& a, const std::vector<double>& b);

struct SpectralOptions {
    /// Upper bound on estimator iterations (matrix squarings here; each
    /// squaring doubles the implicit power count, so the default is far
    /// beyond what any finite matrix needs).
    int max_iterations = 10'000;
    /// Relative stabilization threshold between successive estimates.
    double tolerance = 1e-9;
};

/// Spectral radius estimate.
///
/// Estimator: repeated squaring with per-step rescaling. Starting from
/// Q_0 = M with log-scale accumulator a_0 = 0, each step computes
/// R = Q_t * Q_t, s = inf-norm(R), Q_{t+1} = R / s, a_{t+1} = 2 a_t + log s,
/// giving the norm-root estimate rho_t = exp(a_t / 2^t), which converges to
/// rho(M) by the spectral-radius formula rho = lim_k ||M^k||^(1/k).
/// Convergence criterion: two successive estimates within
/// tolerance * max(1, rho_t) of each other. Throws NonConvergence if the
/// estimate has not stabilized when the iteration budget runs out.
double spectral_radius(const Matrix& m, const SpectralOptions& opts = {});

enum class StochasticityKind {
    RowStochastic,       // nonnegative, every row sums to 1 within tol
    SubstochasticStrict, // nonnegative, row sums <= 1, at least one deficient row
    NotSubstochastic,    // a negative entry or a row sum above 1 + tol
};

const char* to_string(StochasticityKind kind);

struct StochasticityClass {
    StochasticityKind kind;
    /// Rows (0-based) whose sum is below 1 - tol. Empty for row-stochastic.
    std::vector<std::size_t> deficiency_nodes;
};

StochasticityClass classify_stochasticity(const Matrix& m, double tol = 1e-9);

/// Reachability test for Schur stability of a substochastic matrix: true iff
/// every node of the graph associated to M (edge (i,j) iff M_ij > 0) has a
/// directed path to a deficiency node. This is a graph test, not an
/// eigenvalue test; when it holds, rho(M) < 1.
/// Throws NotSubstochastic if M has a negative entry or a row sum above one.
bool substochastic_schur_stable(const Matrix& m, double tol = 1e-9);

}  // namespace opdyn
