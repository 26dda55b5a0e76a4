#pragma once

#include <cstddef>
#include <vector>

namespace svh {

using Vec = std::vector<double>;

// Row-major dense matrix. Sized for the problems this project handles
// (archives of a few hundred points, MLP layers up to 256 wide).
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* row(std::size_t i) { return data_.data() + i * cols_; }
    const double* row(std::size_t i) const { return data_.data() + i * cols_; }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }

    Vec& storage() noexcept { return data_; }
    const Vec& storage() const noexcept { return data_; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Vec data_;
};

namespace linalg {

// In-place lower Cholesky of a symmetric positive definite matrix (only the
// lower triangle of `a` is read). Returns false if a pivot is not positive.
bool cholesky(Matrix& a);

// Solve L y = b (L lower triangular, from cholesky).
Vec solve_lower(const Matrix& l, const Vec& b);

// Solve L^T x = y.
Vec solve_lower_transposed(const Matrix& l, const Vec& y);

// Solve (L L^T) x = b.
Vec solve_cholesky(const Matrix& l, const Vec& b);

// Full inverse of L L^T via per-column solves.
Matrix cholesky_inverse(const Matrix& l);

// Sum of log of the diagonal.
double log_diag_sum(const Matrix& l);

} // namespace linalg
} // namespace svh
