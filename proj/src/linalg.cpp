#include "svh/linalg.hpp"

#include <cmath>

#include "svh/kernels.hpp"

namespace svh::linalg {

bool cholesky(Matrix& a) {
    const std::size_t n = a.rows();
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j) - kernels::dot(a.row(j), a.row(j), j);
        if (!(d > 0.0) || !std::isfinite(d)) return false;
        const double ljj = std::sqrt(d);
        a(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            a(i, j) = (a(i, j) - kernels::dot(a.row(i), a.row(j), j)) / ljj;
        }
        // Zero the strict upper triangle so L can be used as a plain matrix.
        for (std::size_t k = j + 1; k < n; ++k) a(j, k) = 0.0;
    }
    return true;
}

Vec solve_lower(const Matrix& l, const Vec& b) {
    const std::size_t n = l.rows();
    Vec y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = (b[i] - kernels::dot(l.row(i), y.data(), i)) / l(i, i);
    }
    return y;
}

Vec solve_lower_transposed(const Matrix& l, const Vec& y) {
    const std::size_t n = l.rows();
    Vec x = y;
    for (std::size_t ii = n; ii-- > 0;) {
        x[ii] /= l(ii, ii);
        // Propagate the solved component to the remaining prefix (column ii
        // of L is row ii of L^T).
        const double xi = x[ii];
        for (std::size_t k = 0; k < ii; ++k) x[k] -= l(ii, k) * xi;
    }
    return x;
}

Vec solve_cholesky(const Matrix& l, const Vec& b) {
    return solve_lower_transposed(l, solve_lower(l, b));
}

Matrix cholesky_inverse(const Matrix& l) {
    const std::size_t n = l.rows();
    Matrix inv(n, n);
    Vec e(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        e[j] = 1.0;
        Vec col = solve_cholesky(l, e);
        e[j] = 0.0;
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    return inv;
}

double log_diag_sum(const Matrix& l) {
    double s = 0.0;
    for (std::size_t i = 0; i < l.rows(); ++i) s += std::log(l(i, i));
    return s;
}

} // namespace svh::linalg
