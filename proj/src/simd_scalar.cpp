#include <cmath>

#include "transobs/simd.hpp"

// Reference kernels. These define the semantics the vector variants must
// reproduce: one IEEE multiply/add chain per element, no reassociation.
// The project is built with -ffp-contract=off so the compiler cannot fuse
// these into fma and break cross-backend comparisons.

namespace transobs::simd {

namespace {

void affine_s(const double* x, double a, double b, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i] + b;
}

void exp_affine_s(const double* x, double a, double b, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = std::exp(a * x[i] + b);
}

void sq_dist1_s(const double* x, double cx, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double d = x[i] - cx;
        y[i] = d * d;
    }
}

void sq_dist2_s(const double* x1, const double* x2, double cx, double cy, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double dx = x1[i] - cx;
        double dy = x2[i] - cy;
        y[i] = dx * dx + dy * dy;
    }
}

void dot_shift1_s(const double* x, double hx, double cx, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = hx * (x[i] - cx);
}

void dot_shift2_s(const double* x1, const double* x2, double hx, double hy, double cx, double cy,
                  double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = hx * (x1[i] - cx) + hy * (x2[i] - cy);
}

void mul_s(const double* a, const double* b, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = a[i] * b[i];
}

void mul3_s(const double* a, const double* b, const double* c, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = a[i] * b[i] * c[i];
}

void mul_sq_s(const double* a, const double* b, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = a[i] * b[i] * b[i];
}

}  // namespace

const Kernels scalar_kernels = {
    affine_s, exp_affine_s, sq_dist1_s, sq_dist2_s, dot_shift1_s, dot_shift2_s, mul_s, mul3_s, mul_sq_s,
};

}  // namespace transobs::simd
