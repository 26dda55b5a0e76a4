// Backend registry and runtime dispatch.

#include "svh/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "svh/error.hpp"

namespace svh::kernels {

const Ops& scalar_ops();
#if defined(SVH_KERNELS_AVX2)
const Ops& avx2_ops();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(SVH_KERNELS_AVX2) && defined(__GNUC__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend resolve_default() {
    if (const char* env = std::getenv("SVH_KERNELS")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0) {
            if (!backend_available(Backend::avx2))
                throw ArgumentError("SVH_KERNELS=avx2 but AVX2 backend is unavailable on this host");
            return Backend::avx2;
        }
        throw ArgumentError(std::string("unknown SVH_KERNELS value: ") + env);
    }
    return backend_available(Backend::avx2) ? Backend::avx2 : Backend::scalar;
}

std::atomic<const Ops*>& active_slot() {
    static std::atomic<const Ops*> slot{nullptr};
    return slot;
}

const Ops& active() {
    const Ops* p = active_slot().load(std::memory_order_acquire);
    if (!p) {
        p = &ops(resolve_default());
        active_slot().store(p, std::memory_order_release);
    }
    return *p;
}

} // namespace

bool backend_available(Backend b) {
    switch (b) {
        case Backend::scalar: return true;
        case Backend::avx2: return cpu_has_avx2();
    }
    return false;
}

const Ops& ops(Backend b) {
    switch (b) {
        case Backend::scalar:
            return scalar_ops();
        case Backend::avx2:
#if defined(SVH_KERNELS_AVX2)
            if (cpu_has_avx2()) return avx2_ops();
#endif
            throw ArgumentError("AVX2 kernel backend unavailable");
    }
    throw ArgumentError("unknown kernel backend");
}

Backend active_backend() {
    return std::strcmp(active().name, "avx2") == 0 ? Backend::avx2 : Backend::scalar;
}

void force_backend(Backend b) {
    active_slot().store(&ops(b), std::memory_order_release);
}

std::string backend_name() { return active().name; }

double dot(const double* a, const double* b, std::size_t n) { return active().dot(a, b, n); }
void axpy(double* y, double alpha, const double* x, std::size_t n) { active().axpy(y, alpha, x, n); }
double sum(const double* a, std::size_t n) { return active().sum(a, n); }
double sqdist(const double* a, const double* b, std::size_t n) { return active().sqdist(a, b, n); }
void exp_scale(double* out, const double* x, double coeff, double scale, std::size_t n) {
    active().exp_scale(out, x, coeff, scale, n);
}
void tanh_eval(double* out, const double* x, std::size_t n) { active().tanh_eval(out, x, n); }
void sigmoid_eval(double* out, const double* x, std::size_t n) { active().sigmoid_eval(out, x, n); }

void matvec(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
    const Ops& k = active();
    for (std::size_t i = 0; i < rows; ++i) y[i] = k.dot(a + i * cols, x, cols);
}

void matvec_t_add(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y) {
    const Ops& k = active();
    for (std::size_t i = 0; i < rows; ++i) k.axpy(y, x[i], a + i * cols, cols);
}

void ger_add(double* a, std::size_t rows, std::size_t cols, const double* u, const double* v) {
    const Ops& k = active();
    for (std::size_t i = 0; i < rows; ++i) k.axpy(a + i * cols, u[i], v, cols);
}

} // namespace svh::kernels
