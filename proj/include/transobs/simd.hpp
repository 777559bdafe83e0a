#ifndef TRANSOBS_SIMD_HPP
#define TRANSOBS_SIMD_HPP

#include <cstddef>
#include <string>

namespace transobs::simd {

/// Elementwise kernels used by the quadrature inner loops. Every kernel
/// exists as a scalar reference implementation and, on x86-64, an AVX2
/// variant; the active one is chosen at runtime. The purely algebraic
/// kernels are bit-identical across backends (IEEE mul/add per element,
/// no reassociation); exp_affine is allowed to differ from the reference
/// by a few ulp, which equivalence tests pin down. Arguments must be
/// finite; exp_affine flushes results below exp(-708) to zero and
/// saturates above exp(709) to +inf.
struct Kernels {
    // y[i] = a*x[i] + b
    void (*affine)(const double* x, double a, double b, double* y, std::size_t n);
    // y[i] = exp(a*x[i] + b)
    void (*exp_affine)(const double* x, double a, double b, double* y, std::size_t n);
    // y[i] = (x[i]-cx)^2
    void (*sq_dist1)(const double* x, double cx, double* y, std::size_t n);
    // y[i] = (x1[i]-cx)^2 + (x2[i]-cy)^2
    void (*sq_dist2)(const double* x1, const double* x2, double cx, double cy, double* y, std::size_t n);
    // y[i] = hx*(x[i]-cx)
    void (*dot_shift1)(const double* x, double hx, double cx, double* y, std::size_t n);
    // y[i] = hx*(x1[i]-cx) + hy*(x2[i]-cy)
    void (*dot_shift2)(const double* x1, const double* x2, double hx, double hy, double cx, double cy,
                       double* y, std::size_t n);
    // y[i] = a[i]*b[i]
    void (*mul)(const double* a, const double* b, double* y, std::size_t n);
    // y[i] = a[i]*b[i]*c[i]
    void (*mul3)(const double* a, const double* b, const double* c, double* y, std::size_t n);
    // y[i] = a[i]*b[i]*b[i]
    void (*mul_sq)(const double* a, const double* b, double* y, std::size_t n);
};

enum class Backend { scalar, avx2 };

bool avx2_supported();
Backend active();
/// Force a backend (throws if unavailable). Honors TRANSOBS_SIMD=scalar|avx2
/// from the environment at first use.
void force(Backend b);
std::string backend_name(Backend b);

const Kernels& kernels();
const Kernels& kernels_for(Backend b);

extern const Kernels scalar_kernels;
#if defined(TRANSOBS_HAVE_AVX2)
extern const Kernels avx2_kernels;
#endif

}  // namespace transobs::simd

#endif
