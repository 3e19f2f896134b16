#include "opdyn/matrix.hpp"

#include <cmath>
#include <utility>

#include "opdyn/errors.hpp"

namespace opdyn {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), v_(rows * cols, fill) {}

Matrix Matrix::from_rows(std::size_t rows, std::size_t cols, std::vector<double> entries) {
    if (entries.size() != rows * cols)
        fail(errc::dimension_mismatch, "entry count " + std::to_string(entries.size()) +
                                           " does not match " + std::to_string(rows) + "x" +
                                           std::to_string(cols));
    Matrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.v_ = std::move(entries);
    if (!m.all_finite())
        fail(errc::validation_error, "matrix contains a non-finite entry");
    return m;
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(const std::vector<double>& diag) {
    Matrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

double Matrix::row_sum(std::size_t i) const {
    double s = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j);
    return s;
}

double Matrix::inf_norm() const {
    double best = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) s += std::abs((*this)(i, j));
        best = std::max(best, s);
    }
    return best;
}

double Matrix::max_abs() const {
    double best = 0.0;
    for (double x : v_) best = std::max(best, std::abs(x));
    return best;
}

bool Matrix::all_finite() const {
    for (double x : v_)
        if (!std::isfinite(x)) return false;
    return true;
}

namespace {

void require_same_shape(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        fail(errc::dimension_mismatch, "matrix shapes differ");
}

}  // namespace

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) fail(errc::dimension_mismatch, "inner matrix dimensions differ");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b);
    Matrix c = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) += b(i, j);
    return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b);
    Matrix c = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) -= b(i, j);
    return c;
}

Matrix operator*(double s, const Matrix& m) {
    Matrix c = m;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) c(i, j) *= s;
    return c;
}

std::vector<double> operator*(const Matrix& m, const std::vector<double>& x) {
    if (m.cols() != x.size()) fail(errc::dimension_mismatch, "matrix-vector dimensions differ");
    std::vector<double> y(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
    require_same_shape(a, b);
    double best = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            best = std::max(best, std::abs(a(i, j) - b(i, j)));
    return best;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) fail(errc::dimension_mismatch, "vector lengths differ");
    double best = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) best = std::max(best, std::abs(a[i] - b[i]));
    return best;
}

double inf_norm(const std::vector<double>& x) {
    double best = 0.0;
    for (double v : x) best = std::max(best, std::abs(v));
    return best;
}

const char* to_string(errc code) {
    switch (code) {
        case errc::singular_matrix: return "SingularMatrix";
        case errc::non_convergence: return "NonConvergence";
        case errc::not_substochastic: return "NotSubstochastic";
        case errc::too_few_nodes: return "TooFewNodes";
        case errc::endpoint_out_of_range: return "EndpointOutOfRange";
        case errc::dimension_mismatch: return "DimensionMismatch";
        case errc::assumption_violated: return "AssumptionViolated";
        case errc::mapping_degenerate: return "MappingDegenerate";
        case errc::edge_not_in_graph: return "EdgeNotInGraph";
        case errc::validation_error: return "ValidationError";
        case errc::parse_error: return "ParseError";
        case errc::io_error: return "IoError";
        case errc::internal_error: return "InternalError";
    }
    return "UnknownError";
}

}  // namespace opdyn
