#pragma once

// Data-parallel inner loops used by the grid, low-rank and stencil layers.
// Each kernel has a scalar reference implementation and an AVX2 variant;
// the dispatched entry points select the best available one at startup.
// The *_scalar / *_avx2 symbols stay visible so the variants can be
// equivalence-tested against each other.

#include <cstddef>

namespace lrvp::kernels {

bool have_avx2();

// sum_i a[i]*b[i]
double dot_scalar(const double* a, const double* b, std::size_t n);
double dot_avx2(const double* a, const double* b, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);

// sum_i a[i]*b[i]*w[i]
double wdot_scalar(const double* a, const double* b, const double* w, std::size_t n);
double wdot_avx2(const double* a, const double* b, const double* w, std::size_t n);
double wdot(const double* a, const double* b, const double* w, std::size_t n);

// dst[i] = a[i]*b[i]
void hadamard_scalar(double* dst, const double* a, const double* b, std::size_t n);
void hadamard_avx2(double* dst, const double* a, const double* b, std::size_t n);
void hadamard(double* dst, const double* a, const double* b, std::size_t n);

// y[i] += alpha*x[i]
void axpy_scalar(double* y, double alpha, const double* x, std::size_t n);
void axpy_avx2(double* y, double alpha, const double* x, std::size_t n);
void axpy(double* y, double alpha, const double* x, std::size_t n);

// 6-point stencil on a padded source: dst[i] = sum_{k=0..5} c[k]*src[i+k].
// src must be valid on [0, n+5).
void stencil6_scalar(double* dst, const double* src, std::size_t n, const double c[6]);
void stencil6_avx2(double* dst, const double* src, std::size_t n, const double c[6]);
void stencil6(double* dst, const double* src, std::size_t n, const double c[6]);

}  // namespace lrvp::kernels
