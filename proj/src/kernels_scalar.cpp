// Scalar reference backend. Plain sequential loops; the SIMD backends are
// equivalence-tested against these.

#include "svh/kernels.hpp"

#include <cmath>

namespace svh::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_scalar(double* y, double alpha, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sum_scalar(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i];
    return acc;
}

double sqdist_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

void exp_scale_scalar(double* out, const double* x, double coeff, double scale, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = scale * std::exp(coeff * x[i]);
}

void tanh_scalar(double* out, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::tanh(x[i]);
}

void sigmoid_scalar(double* out, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const double v = x[i];
        if (v >= 0.0) {
            out[i] = 1.0 / (1.0 + std::exp(-v));
        } else {
            const double e = std::exp(v);
            out[i] = e / (1.0 + e);
        }
    }
}

} // namespace

const Ops& scalar_ops() {
    static const Ops table{
        dot_scalar, axpy_scalar, sum_scalar, sqdist_scalar,
        exp_scale_scalar, tanh_scalar, sigmoid_scalar, "scalar",
    };
    return table;
}

} // namespace svh::kernels
