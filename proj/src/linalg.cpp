#include "opdyn/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>

#include "opdyn/errors.hpp"

namespace opdyn {

namespace {

void require_square(const Matrix& m, const char* who) {
    if (!m.square()) fail(errc::dimension_mismatch, std::string(who) + " requires a square matrix");
}

}  // namespace

std::vector<double> solve_linear(const Matrix& a, const std::vector<double>& b) {
    require_square(a, "solve_linear");
    const std::size_t n = a.rows();
    if (b.size() != n) fail(errc::dimension_mismatch, "right-hand side length does not match matrix");

    // Pivot breakdown is judged against the largest initial magnitude of
    // each column, so an all-tiny column is flagged rather than scaled away.
    std::vector<double> col_scale(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            col_scale[j] = std::max(col_scale[j], std::abs(a(i, j)));

    Matrix u = a;
    std::vector<double> x = b;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pivot_row = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(u(i, k)) > std::abs(u(pivot_row, k))) pivot_row = i;
        if (std::abs(u(pivot_row, k)) <= 1e-12 * col_scale[k])
            fail(errc::singular_matrix,
                 "pivot in column " + std::to_string(k + 1) + " fell below 1e-12 of its column scale");
        if (pivot_row != k) {
            for (std::size_t j = k; j < n; ++j) std::swap(u(k, j), u(pivot_row, j));
            std::swap(x[k], x[pivot_row]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = u(i, k) / u(k, k);
            if (f == 0.0) continue;
            u(i, k) = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) u(i, j) -= f * u(k, j);
            x[i] -= f * x[k];
        }
    }

    for (std::size_t ii = n; ii-- > 0;) {
        double s = x[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= u(ii, j) * x[j];
        x[ii] = s / u(ii, ii);
    }
    return x;
}

double spectral_radius(const Matrix& m, const SpectralOptions& opts) {
    require_square(m, "spectral_radius");
    const std::size_t n = m.rows();
    if (n == 0) return 0.0;
    if (!m.all_finite()) fail(errc::validation_error, "spectral_radius: non-finite entry");

    // Repeated squaring with rescaling; see the header for the estimator
    // and its convergence criterion. Squaring t times evaluates the norm
    // root at k = 2^t, so 64 squarings already exceed any sensible budget.
    const int max_squarings = std::min(opts.max_iterations, 64);

    double s0 = m.inf_norm();
    if (s0 == 0.0) return 0.0;
    Matrix q = (1.0 / s0) * m;
    double log_scale = std::log(s0);  // a_t / 2^t, kept in averaged form
    double estimate = std::exp(log_scale);
    double prev = -1.0;

    for (int t = 1; t <= max_squarings; ++t) {
        Matrix r = q * q;
        const double s = r.inf_norm();
        if (s == 0.0) return 0.0;  // nilpotent: M^(2^t) vanished exactly
        q = (1.0 / s) * r;
        log_scale += std::ldexp(std::log(s), -t);
        prev = estimate;
        estimate = std::exp(log_scale);
        if (std::abs(estimate - prev) <= opts.tolerance * std::max(1.0, estimate)) return estimate;
    }
    fail(errc::non_convergence,
         "spectral radius estimate did not stabilize within " + std::to_string(max_squarings) +
             " squarings");
}

StochasticityClass classify_stochasticity(const Matrix& m, double tol) {
    require_square(m, "classify_stochasticity");
    const std::size_t n = m.rows();

    bool negative = false;
    bool row_above_one = false;
    bool all_rows_one = true;
    std::vector<std::size_t> deficient;

    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double v = m(i, j);
            if (v < -tol) negative = true;
            s += v;
        }
        if (s > 1.0 + tol) row_above_one = true;
        if (std::abs(s - 1.0) > tol) all_rows_one = false;
        if (s < 1.0 - tol) deficient.push_back(i);
    }

    if (negative || row_above_one) return {StochasticityKind::NotSubstochastic, std::move(deficient)};
    if (all_rows_one) return {StochasticityKind::RowStochastic, {}};
    return {StochasticityKind::SubstochasticStrict, std::move(deficient)};
}

bool substochastic_schur_stable(const Matrix& m, double tol) {
    const StochasticityClass cls = classify_stochasticity(m, tol);
    if (cls.kind == StochasticityKind::NotSubstochastic)
        fail(errc::not_substochastic, "Schur-stability test requires a substochastic matrix");
    const std::size_t n = m.rows();
    if (cls.deficiency_nodes.empty()) return n == 0;

    // Reverse BFS from the deficiency set over the positive-entry graph:
    // node l reaches a deficiency node m iff m reaches l along reversed edges.
    std::vector<char> reached(n, 0);
    std::vector<std::size_t> queue = cls.deficiency_nodes;
    for (std::size_t v : queue) reached[v] = 1;
    while (!queue.empty()) {
        const std::size_t j = queue.back();
        queue.pop_back();
        for (std::size_t i = 0; i < n; ++i)
            if (!reached[i] && m(i, j) > 0.0) {
                reached[i] = 1;
                queue.push_back(i);
            }
    }
    return std::all_of(reached.begin(), reached.end(), [](char c) { return c != 0; });
}

const char* to_string(StochasticityKind kind) {
    switch (kind) {
        case StochasticityKind::RowStochastic: return "row-stochastic";
        case StochasticityKind::SubstochasticStrict: return "substochastic-strict";
        case StochasticityKind::NotSubstochastic: return "not-substochastic";
    }
    return "unknown";
}

}  // namespace opdyn
