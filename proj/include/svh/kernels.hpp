#pragma once

#include <cstddef>
#include <string>

// Data-parallel f64 primitives behind the numerical stack. A scalar reference
// backend always exists; SIMD backends are selected at runtime (CPU probe,
// overridable via the SVH_KERNELS environment variable) and are equivalence-
// tested against the scalar path.

namespace svh::kernels {

enum class Backend {
    scalar,
    avx2,
};

// Function table for one backend. matvec/ger-style ops are composed from
// these in the dispatch layer, so a backend only supplies the primitives.
struct Ops {
    double (*dot)(const double* a, const double* b, std::size_t n);
    void (*axpy)(double* y, double alpha, const double* x, std::size_t n);
    double (*sum)(const double* a, std::size_t n);
    double (*sqdist)(const double* a, const double* b, std::size_t n);
    // out[i] = scale * exp(coeff * x[i])
    void (*exp_scale)(double* out, const double* x, double coeff, double scale, std::size_t n);
    void (*tanh_eval)(double* out, const double* x, std::size_t n);
    void (*sigmoid_eval)(double* out, const double* x, std::size_t n);
    const char* name;
};

const Ops& ops(Backend b);             // throws ArgumentError if not compiled in / unsupported
bool backend_available(Backend b);
Backend active_backend();              // resolved once on first use
void force_backend(Backend b);         // test hook; throws if unavailable
std::string backend_name();

// Dispatched entry points (use the active backend).
double dot(const double* a, const double* b, std::size_t n);
void axpy(double* y, double alpha, const double* x, std::size_t n);
double sum(const double* a, std::size_t n);
double sqdist(const double* a, const double* b, std::size_t n);
void exp_scale(double* out, const double* x, double coeff, double scale, std::size_t n);
void tanh_eval(double* out, const double* x, std::size_t n);
void sigmoid_eval(double* out, const double* x, std::size_t n);

// Composite helpers (backend-agnostic loops over the primitives above).
// Row-major A is rows x cols.
void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);          // y = A x
void matvec_t_add(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);    // y += A^T x
void ger_add(double* a, std::size_t rows, std::size_t cols, const double* u, const double* v);         // A += u v^T

} // namespace svh::kernels
