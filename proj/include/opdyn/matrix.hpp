#pragma once

#include <cstddef>
#include <vector>

namespace opdyn {

/// Dense real matrix, row-major. All models in this library are small
/// (tens of agents), so dense storage is used throughout.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    /// Builds from row-major entries; validates length and finiteness.
    static Matrix from_rows(std::size_t rows, std::size_t cols, std::vector<double> entries);
    static Matrix identity(std::size_t n);
    static Matrix diagonal(const std::vector<double>& diag);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return v_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return v_[i * cols_ + j]; }

    const std::vector<double>& entries() const noexcept { return v_; }

    double row_sum(std::size_t i) const;
    /// max_i sum_j |M_ij|
    double inf_norm() const;
    double max_abs() const;
    bool all_finite() const;

    friend bool operator==(const Matrix& a, const Matrix& b) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> v_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& m);
std::vector<double> operator*(const Matrix& m, const std::vector<double>& x);

/// Largest entrywise |a - b|; matrices must have equal shape.
double max_abs_diff(const Matrix& a, const Matrix& b);
double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b);
double inf_norm(const std::vector<double>& x);

}  // namespace opdyn
