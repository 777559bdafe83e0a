// AVX2 kernel variants. Compiled with -mavx2 -mfma; selected at runtime
// only when the CPU reports both features.
//
// Algebraic kernels use mul/add/sub intrinsics only (no fma) so their
// results are bit-identical to the scalar reference. exp_affine uses a
// range-reduced Taylor evaluation; it may differ from std::exp by a few
// ulp, bounded by the equivalence tests.

#if defined(TRANSOBS_HAVE_AVX2)

#include <immintrin.h>

#include <cstddef>
#include <cstring>

#include "transobs/simd.hpp"

namespace transobs::simd {

namespace {

inline __m256d exp_core(__m256d x) {
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
    const __m256d ln2_hi = _mm256_set1_pd(6.93145751953125e-1);
    const __m256d ln2_lo = _mm256_set1_pd(1.42860682030941723212e-6);
    const __m256d lo_cut = _mm256_set1_pd(-708.0);
    const __m256d hi_cut = _mm256_set1_pd(709.0);

    __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, ln2_hi, x);
    r = _mm256_fnmadd_pd(n, ln2_lo, r);

    // exp(r) on |r| <= ln2/2 by a degree-13 Taylor polynomial (Horner).
    const double inv_fact[14] = {
        1.0,
        1.0,
        1.0 / 2,
        1.0 / 6,
        1.0 / 24,
        1.0 / 120,
        1.0 / 720,
        1.0 / 5040,
        1.0 / 40320,
        1.0 / 362880,
        1.0 / 3628800,
        1.0 / 39916800,
        1.0 / 479001600,
        1.0 / 6227020800.0,
    };
    __m256d p = _mm256_set1_pd(inv_fact[13]);
    for (int k = 12; k >= 0; --k) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(inv_fact[k]));

    // scale by 2^n through the exponent bits (n in [-1022, 1024] here)
    __m128i n32 = _mm256_cvtpd_epi32(n);
    __m256i n64 = _mm256_cvtepi32_epi64(n32);
    __m256i bits = _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
    __m256d pow2 = _mm256_castsi256_pd(bits);
    __m256d y = _mm256_mul_pd(p, pow2);

    __m256d too_small = _mm256_cmp_pd(x, lo_cut, _CMP_LT_OQ);
    __m256d too_big = _mm256_cmp_pd(x, hi_cut, _CMP_GT_OQ);
    y = _mm256_andnot_pd(too_small, y);
    y = _mm256_blendv_pd(y, _mm256_set1_pd(__builtin_inf()), too_big);
    return y;
}

void exp_affine_v(const double* x, double a, double b, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    const __m256d vb = _mm256_set1_pd(b);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d t = _mm256_add_pd(_mm256_mul_pd(va, _mm256_loadu_pd(x + i)), vb);
        _mm256_storeu_pd(y + i, exp_core(t));
    }
    if (i < n) {
        // run the tail through the same vector path so every element sees
        // identical arithmetic
        double xin[4] = {0, 0, 0, 0}, yout[4];
        std::memcpy(xin, x + i, (n - i) * sizeof(double));
        __m256d t = _mm256_add_pd(_mm256_mul_pd(va, _mm256_loadu_pd(xin)), vb);
        _mm256_storeu_pd(yout, exp_core(t));
        std::memcpy(y + i, yout, (n - i) * sizeof(double));
    }
}

void affine_v(const double* x, double a, double b, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    const __m256d vb = _mm256_set1_pd(b);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_mul_pd(va, _mm256_loadu_pd(x + i)), vb));
    for (; i < n; ++i) y[i] = a * x[i] + b;
}

void sq_dist1_v(const double* x, double cx, double* y, std::size_t n) {
    const __m256d vc = _mm256_set1_pd(cx);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), vc);
        _mm256_storeu_pd(y + i, _mm256_mul_pd(d, d));
    }
    for (; i < n; ++i) {
        double d = x[i] - cx;
        y[i] = d * d;
    }
}

void sq_dist2_v(const double* x1, const double* x2, double cx, double cy, double* y, std::size_t n) {
    const __m256d vcx = _mm256_set1_pd(cx);
    const __m256d vcy = _mm256_set1_pd(cy);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(x1 + i), vcx);
        __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(x2 + i), vcy);
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)));
    }
    for (; i < n; ++i) {
        double dx = x1[i] - cx;
        double dy = x2[i] - cy;
        y[i] = dx * dx + dy * dy;
    }
}

void dot_shift1_v(const double* x, double hx, double cx, double* y, std::size_t n) {
    const __m256d vh = _mm256_set1_pd(hx);
    const __m256d vc = _mm256_set1_pd(cx);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_mul_pd(vh, _mm256_sub_pd(_mm256_loadu_pd(x + i), vc)));
    for (; i < n; ++i) y[i] = hx * (x[i] - cx);
}

void dot_shift2_v(const double* x1, const double* x2, double hx, double hy, double cx, double cy,
                  double* y, std::size_t n) {
    const __m256d vhx = _mm256_set1_pd(hx);
    const __m256d vhy = _mm256_set1_pd(hy);
    const __m256d vcx = _mm256_set1_pd(cx);
    const __m256d vcy = _mm256_set1_pd(cy);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d a = _mm256_mul_pd(vhx, _mm256_sub_pd(_mm256_loadu_pd(x1 + i), vcx));
        __m256d b = _mm256_mul_pd(vhy, _mm256_sub_pd(_mm256_loadu_pd(x2 + i), vcy));
        _mm256_storeu_pd(y + i, _mm256_add_pd(a, b));
    }
    for (; i < n; ++i) y[i] = hx * (x1[i] - cx) + hy * (x2[i] - cy);
}

void mul_v(const double* a, const double* b, double* y, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) y[i] = a[i] * b[i];
}

void mul3_v(const double* a, const double* b, const double* c, double* y, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d ab = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        _mm256_storeu_pd(y + i, _mm256_mul_pd(ab, _mm256_loadu_pd(c + i)));
    }
    for (; i < n; ++i) y[i] = a[i] * b[i] * c[i];
}

void mul_sq_v(const double* a, const double* b, double* y, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vb = _mm256_loadu_pd(b + i);
        __m256d ab = _mm256_mul_pd(_mm256_loadu_pd(a + i), vb);
        _mm256_storeu_pd(y + i, _mm256_mul_pd(ab, vb));
    }
    for (; i < n; ++i) y[i] = a[i] * b[i] * b[i];
}

}  // namespace

const Kernels avx2_kernels = {
    affine_v, exp_affine_v, sq_dist1_v, sq_dist2_v, dot_shift1_v, dot_shift2_v, mul_v, mul3_v, mul_sq_v,
};

}  // namespace transobs::simd

#endif  // TRANSOBS_HAVE_AVX2
