// AVX2+FMA backend. Compiled with -mavx2 -mfma on x86-64 only; selected at
// runtime after a CPU probe. exp is a Cephes-style rational approximation
// (range reduction against split ln2, 2^n rebuilt via the exponent field).

#include "svh/kernels.hpp"

#if defined(SVH_KERNELS_AVX2)

#include <immintrin.h>

#include <cmath>
#include <cstdint>
#include <limits>

namespace svh::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    if (i + 4 <= n) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        i += 4;
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_avx2(double* y, double alpha, const double* x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

double sum_avx2(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
    double s = hsum(acc);
    for (; i < n; ++i) s += a[i];
    return s;
}

double sqdist_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

// 2^k for integral k held in a double vector, |k| <= ~1075 after the split
// in exp_pd. Built directly in the exponent field.
inline __m256d pow2_from_i64(__m256i k) {
    const __m256i bias = _mm256_set1_epi64x(1023);
    __m256i e = _mm256_slli_epi64(_mm256_add_epi64(k, bias), 52);
    return _mm256_castsi256_pd(e);
}

__m256d exp_pd(__m256d x) {
    const __m256d hi_cut = _mm256_set1_pd(709.782712893384);
    const __m256d lo_cut = _mm256_set1_pd(-708.396418532264);
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
    const __m256d c1 = _mm256_set1_pd(6.93145751953125e-1);
    const __m256d c2 = _mm256_set1_pd(1.42860682030941723212e-6);
    const __m256d p0 = _mm256_set1_pd(1.26177193074810590878e-4);
    const __m256d p1 = _mm256_set1_pd(3.02994407707441961300e-2);
    const __m256d p2 = _mm256_set1_pd(9.99999999999999999910e-1);
    const __m256d q0 = _mm256_set1_pd(3.00198505138664455042e-6);
    const __m256d q1 = _mm256_set1_pd(2.52448340349684104192e-3);
    const __m256d q2 = _mm256_set1_pd(2.27265548208155028766e-1);
    const __m256d q3 = _mm256_set1_pd(2.00000000000000000005e0);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d half = _mm256_set1_pd(0.5);

    __m256d xc = _mm256_max_pd(_mm256_min_pd(x, hi_cut), lo_cut);

    __m256d n = _mm256_round_pd(_mm256_mul_pd(xc, log2e),
                                _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, c1, xc);
    r = _mm256_fnmadd_pd(n, c2, r);
    __m256d r2 = _mm256_mul_pd(r, r);

    __m256d px = _mm256_fmadd_pd(p0, r2, p1);
    px = _mm256_fmadd_pd(px, r2, p2);
    px = _mm256_mul_pd(px, r);
    __m256d qx = _mm256_fmadd_pd(q0, r2, q1);
    qx = _mm256_fmadd_pd(qx, r2, q2);
    qx = _mm256_fmadd_pd(qx, r2, q3);
    // exp(r) = 1 + 2 px / (qx - px)
    __m256d er = _mm256_add_pd(one, _mm256_div_pd(_mm256_add_pd(px, px), _mm256_sub_pd(qx, px)));

    // Scale by 2^n in two halves so every factor stays a normal double.
    __m256d n_half = _mm256_round_pd(_mm256_mul_pd(n, half),
                                     _MM_FROUND_TO_ZERO | _MM_FROUND_NO_EXC);
    __m256i k1 = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(n_half));
    __m256i k2 = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(_mm256_sub_pd(n, n_half)));
    er = _mm256_mul_pd(_mm256_mul_pd(er, pow2_from_i64(k1)), pow2_from_i64(k2));

    // Out-of-range fixups, NaN passthrough.
    const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    __m256d big = _mm256_cmp_pd(x, hi_cut, _CMP_GT_OQ);
    __m256d small = _mm256_cmp_pd(x, lo_cut, _CMP_LT_OQ);
    __m256d nan = _mm256_cmp_pd(x, x, _CMP_UNORD_Q);
    er = _mm256_blendv_pd(er, inf, big);
    er = _mm256_blendv_pd(er, _mm256_setzero_pd(), small);
    er = _mm256_blendv_pd(er, x, nan);
    return er;
}

void exp_scale_avx2(double* out, const double* x, double coeff, double scale, std::size_t n) {
    const __m256d vc = _mm256_set1_pd(coeff);
    const __m256d vs = _mm256_set1_pd(scale);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d e = exp_pd(_mm256_mul_pd(vc, _mm256_loadu_pd(x + i)));
        _mm256_storeu_pd(out + i, _mm256_mul_pd(vs, e));
    }
    for (; i < n; ++i) out[i] = scale * std::exp(coeff * x[i]);
}

void tanh_avx2(double* out, const double* x, std::size_t n) {
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256d cap = _mm256_set1_pd(20.0);  // tanh(20) == 1 in f64
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        __m256d sign = _mm256_and_pd(v, sign_mask);
        __m256d av = _mm256_min_pd(_mm256_andnot_pd(sign_mask, v), cap);
        __m256d t = exp_pd(_mm256_mul_pd(two, av));
        // tanh(|x|) = (t - 1) / (t + 1)
        __m256d th = _mm256_div_pd(_mm256_sub_pd(t, one), _mm256_add_pd(t, one));
        _mm256_storeu_pd(out + i, _mm256_or_pd(th, sign));
    }
    for (; i < n; ++i) out[i] = std::tanh(x[i]);
}

void sigmoid_avx2(double* out, const double* x, std::size_t n) {
    const __m256d sign_mask = _mm256_set1_pd(-0.0);
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        __m256d av = _mm256_andnot_pd(sign_mask, v);
        __m256d t = exp_pd(_mm256_sub_pd(_mm256_setzero_pd(), av));  // e^{-|x|}
        __m256d denom = _mm256_add_pd(one, t);
        __m256d pos = _mm256_div_pd(one, denom);
        __m256d neg = _mm256_div_pd(t, denom);
        __m256d neg_mask = _mm256_cmp_pd(v, _mm256_setzero_pd(), _CMP_LT_OQ);
        _mm256_storeu_pd(out + i, _mm256_blendv_pd(pos, neg, neg_mask));
    }
    for (; i < n; ++i) {
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

const Ops& avx2_ops() {
    static const Ops table{
        dot_avx2, axpy_avx2, sum_avx2, sqdist_avx2,
        exp_scale_avx2, tanh_avx2, sigmoid_avx2, "avx2",
    };
    return table;
}

} // namespace svh::kernels

#endif // SVH_KERNELS_AVX2
