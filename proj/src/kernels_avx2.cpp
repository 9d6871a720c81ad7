// AVX2/FMA variants. This translation unit is compiled with -mavx2 -mfma;
// the functions are only reached after a runtime cpuid check.

#include "lrvp/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>

#include <cmath>

namespace lrvp::kernels {

namespace {

// Lane-wise Neumaier accumulator matching the compensated scalar kernels.
struct CompAcc {
  __m256d s = _mm256_setzero_pd();
  __m256d c = _mm256_setzero_pd();

  inline void add(__m256d x) {
    const __m256d sign = _mm256_set1_pd(-0.0);
    const __m256d t = _mm256_add_pd(s, x);
    const __m256d abs_s = _mm256_andnot_pd(sign, s);
    const __m256d abs_x = _mm256_andnot_pd(sign, x);
    const __m256d big_s = _mm256_add_pd(_mm256_sub_pd(s, t), x);
    const __m256d big_x = _mm256_add_pd(_mm256_sub_pd(x, t), s);
    const __m256d mask = _mm256_cmp_pd(abs_s, abs_x, _CMP_GE_OQ);
    c = _mm256_add_pd(c, _mm256_blendv_pd(big_x, big_s, mask));
    s = t;
  }

  // Compensated combination of the eight lane partials.
  inline double total() const {
    alignas(32) double parts[8];
    _mm256_store_pd(parts, s);
    _mm256_store_pd(parts + 4, c);
    double sum = 0.0, comp = 0.0;
    for (double x : parts) {
      const double t = sum + x;
      comp += (std::abs(sum) >= std::abs(x)) ? (sum - t) + x : (x - t) + sum;
      sum = t;
    }
    return sum + comp;
  }
};

inline double finish(CompAcc acc, double tail_sum, double tail_comp) {
  double sum = acc.total();
  const double t = sum + tail_sum;
  tail_comp += (std::abs(sum) >= std::abs(tail_sum)) ? (sum - t) + tail_sum
                                                     : (tail_sum - t) + sum;
  return t + tail_comp;
}

}  // namespace

double dot_avx2(const double* a, const double* b, std::size_t n) {
  CompAcc acc;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(a + i);
    const __m256d vb = _mm256_loadu_pd(b + i);
    const __m256d p = _mm256_mul_pd(va, vb);
    acc.add(p);
    acc.add(_mm256_fmsub_pd(va, vb, p));  // exact product remainder
  }
  double s = 0.0, c = 0.0;
  for (; i < n; ++i) {
    const double p = a[i] * b[i];
    c += std::fma(a[i], b[i], -p);
    const double t = s + p;
    c += (std::abs(s) >= std::abs(p)) ? (s - t) + p : (p - t) + s;
    s = t;
  }
  return finish(acc, s, c);
}

double wdot_avx2(const double* a, const double* b, const double* w, std::size_t n) {
  CompAcc acc;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d va = _mm256_loadu_pd(a + i);
    const __m256d vb = _mm256_loadu_pd(b + i);
    const __m256d vw = _mm256_loadu_pd(w + i);
    const __m256d p = _mm256_mul_pd(va, vb);
    const __m256d e1 = _mm256_fmsub_pd(va, vb, p);
    const __m256d q = _mm256_mul_pd(p, vw);
    acc.add(q);
    acc.add(_mm256_add_pd(_mm256_fmsub_pd(p, vw, q), _mm256_mul_pd(e1, vw)));
  }
  double s = 0.0, c = 0.0;
  for (; i < n; ++i) {
    const double p = a[i] * b[i];
    const double e1 = std::fma(a[i], b[i], -p);
    const double q = p * w[i];
    c += std::fma(p, w[i], -q) + e1 * w[i];
    const double t = s + q;
    c += (std::abs(s) >= std::abs(q)) ? (s - t) + q : (q - t) + s;
    s = t;
  }
  return finish(acc, s, c);
}

void hadamard_avx2(double* dst, const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(dst + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  for (; i < n; ++i) dst[i] = a[i] * b[i];
}

void axpy_avx2(double* y, double alpha, const double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void stencil6_avx2(double* dst, const double* src, std::size_t n, const double c[6]) {
  const __m256d c0 = _mm256_set1_pd(c[0]);
  const __m256d c1 = _mm256_set1_pd(c[1]);
  const __m256d c2 = _mm256_set1_pd(c[2]);
  const __m256d c3 = _mm256_set1_pd(c[3]);
  const __m256d c4 = _mm256_set1_pd(c[4]);
  const __m256d c5 = _mm256_set1_pd(c[5]);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_mul_pd(c0, _mm256_loadu_pd(src + i));
    acc = _mm256_fmadd_pd(c1, _mm256_loadu_pd(src + i + 1), acc);
    acc = _mm256_fmadd_pd(c2, _mm256_loadu_pd(src + i + 2), acc);
    acc = _mm256_fmadd_pd(c3, _mm256_loadu_pd(src + i + 3), acc);
    acc = _mm256_fmadd_pd(c4, _mm256_loadu_pd(src + i + 4), acc);
    acc = _mm256_fmadd_pd(c5, _mm256_loadu_pd(src + i + 5), acc);
    _mm256_storeu_pd(dst + i, acc);
  }
  for (; i < n; ++i) {
    dst[i] = c[0] * src[i] + c[1] * src[i + 1] + c[2] * src[i + 2] + c[3] * src[i + 3] +
             c[4] * src[i + 4] + c[5] * src[i + 5];
  }
}

}  // namespace lrvp::kernels

#else

namespace lrvp::kernels {

double dot_avx2(const double* a, const double* b, std::size_t n) { return dot_scalar(a, b, n); }
double wdot_avx2(const double* a, const double* b, const double* w, std::size_t n) {
  return wdot_scalar(a, b, w, n);
}
void hadamard_avx2(double* dst, const double* a, const double* b, std::size_t n) {
  hadamard_scalar(dst, a, b, n);
}
void axpy_avx2(double* y, double alpha, const double* x, std::size_t n) {
  axpy_scalar(y, alpha, x, n);
}
void stencil6_avx2(double* dst, const double* src, std::size_t n, const double c[6]) {
  stencil6_scalar(dst, src, n, c);
}

}  // namespace lrvp::kernels

#endif
