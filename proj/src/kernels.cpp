#include "lrvp/kernels.hpp"

#include <cmath>

namespace lrvp::kernels {

bool have_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

// Neumaier compensation step.
inline void comp_add(double& s, double& c, double x) {
  const double t = s + x;
  c += (std::abs(s) >= std::abs(x)) ? (s - t) + x : (x - t) + s;
  s = t;
}

}  // namespace

// Reductions use error-free product transforms plus Neumaier-compensated
// accumulation: the weighted moment algebra cancels near-equal terms, and
// a plain sum leaves a biased O(eps) residue that accumulates linearly
// over long time integrations.
double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = a[i] * b[i];
    c += std::fma(a[i], b[i], -p);  // exact product remainder
    comp_add(s, c, p);
  }
  return s + c;
}

double wdot_scalar(const double* a, const double* b, const double* w, std::size_t n) {
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = a[i] * b[i];
    const double e1 = std::fma(a[i], b[i], -p);
    const double q = p * w[i];
    c += std::fma(p, w[i], -q) + e1 * w[i];
    comp_add(s, c, q);
  }
  return s + c;
}

void hadamard_scalar(double* dst, const double* a, const double* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dst[i] = a[i] * b[i];
}

void axpy_scalar(double* y, double alpha, const double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void stencil6_scalar(double* dst, const double* src, std::size_t n, const double c[6]) {
  for (std::size_t i = 0; i < n; ++i) {
    dst[i] = c[0] * src[i] + c[1] * src[i + 1] + c[2] * src[i + 2] +
             c[3] * src[i + 3] + c[4] * src[i + 4] + c[5] * src[i + 5];
  }
}

namespace {

using dot_fn = double (*)(const double*, const double*, std::size_t);
using wdot_fn = double (*)(const double*, const double*, const double*, std::size_t);
using had_fn = void (*)(double*, const double*, const double*, std::size_t);
using axpy_fn = void (*)(double*, double, const double*, std::size_t);
using sten_fn = void (*)(double*, const double*, std::size_t, const double[6]);

dot_fn pick_dot() { return have_avx2() ? dot_avx2 : dot_scalar; }
wdot_fn pick_wdot() { return have_avx2() ? wdot_avx2 : wdot_scalar; }
had_fn pick_hadamard() { return have_avx2() ? hadamard_avx2 : hadamard_scalar; }
axpy_fn pick_axpy() { return have_avx2() ? axpy_avx2 : axpy_scalar; }
sten_fn pick_stencil6() { return have_avx2() ? stencil6_avx2 : stencil6_scalar; }

const dot_fn g_dot = pick_dot();
const wdot_fn g_wdot = pick_wdot();
const had_fn g_hadamard = pick_hadamard();
const axpy_fn g_axpy = pick_axpy();
const sten_fn g_stencil6 = pick_stencil6();

}  // namespace

double dot(const double* a, const double* b, std::size_t n) { return g_dot(a, b, n); }

double wdot(const double* a, const double* b, const double* w, std::size_t n) {
  return g_wdot(a, b, w, n);
}

void hadamard(double* dst, const double* a, const double* b, std::size_t n) {
  g_hadamard(dst, a, b, n);
}

void axpy(double* y, double alpha, const double* x, std::size_t n) { g_axpy(y, alpha, x, n); }

void stencil6(double* dst, const double* src, std::size_t n, const double c[6]) {
  g_stencil6(dst, src, n, c);
}

}  // namespace lrvp::kernels
