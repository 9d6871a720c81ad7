#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "lrvp/kernels.hpp"
#include "test_helpers.hpp"

using namespace lrvp;
using namespace lrvp::testing;

namespace {

std::vector<double> random_buf(std::mt19937& rng, std::size_t n, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

long double dot_ld(const double* a, const double* b, std::size_t n) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < n; ++i) s += static_cast<long double>(a[i]) * b[i];
  return s;
}

long double wdot_ld(const double* a, const double* b, const double* w, std::size_t n) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < n; ++i)
    s += static_cast<long double>(a[i]) * b[i] * w[i];
  return s;
}

}  // namespace

TEST_CASE("dot: scalar matches extended-precision reference") {
  std::mt19937 rng(1);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 64u, 1000u}) {
    auto a = random_buf(rng, n), b = random_buf(rng, n);
    const long double want = dot_ld(a.data(), b.data(), n);
    const double got = kernels::dot_scalar(a.data(), b.data(), n);
    CHECK(std::abs(static_cast<long double>(got) - want) <=
          1e-14L * (std::abs(want) + 1.0L));
  }
}

TEST_CASE("dot: compensation survives catastrophic cancellation") {
  // pairs (x, -x) plus a tiny residual: a naive sum loses the residual.
  std::vector<double> a = {1e16, 1.0, -1e16, 1.0};
  std::vector<double> b = {1.0, 1.0, 1.0, 1e-3};
  const double got = kernels::dot_scalar(a.data(), b.data(), a.size());
  CHECK(got == doctest::Approx(1.0 + 1e-3).epsilon(1e-15));
}

TEST_CASE("scalar vs avx2 variants agree") {
  std::mt19937 rng(2);
  const bool native = kernels::have_avx2();
  INFO("runtime dispatch uses " << (native ? "avx2" : "scalar"));
  for (std::size_t n : {1u, 5u, 8u, 33u, 256u, 1021u}) {
    auto a = random_buf(rng, n), b = random_buf(rng, n), w = random_buf(rng, n);
    // Compensated reductions may differ between variants only at the level
    // of the final double rounding.
    const double ds = kernels::dot_scalar(a.data(), b.data(), n);
    const double da = kernels::dot_avx2(a.data(), b.data(), n);
    CHECK(rel_err(da, ds) <= 1e-15);
    const double ws = kernels::wdot_scalar(a.data(), b.data(), w.data(), n);
    const double wa = kernels::wdot_avx2(a.data(), b.data(), w.data(), n);
    CHECK(rel_err(wa, ws) <= 1e-15);

    std::vector<double> hs(n), ha(n);
    kernels::hadamard_scalar(hs.data(), a.data(), b.data(), n);
    kernels::hadamard_avx2(ha.data(), a.data(), b.data(), n);
    CHECK(hs == ha);  // products are elementwise-exact in both variants

    auto ys = b, ya = b;
    kernels::axpy_scalar(ys.data(), 0.37, a.data(), n);
    kernels::axpy_avx2(ya.data(), 0.37, a.data(), n);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(std::abs(ys[i] - ya[i]) <= 1e-15 * (std::abs(ys[i]) + 1.0));

    auto src = random_buf(rng, n + 5);
    const double c[6] = {-2, 15, -60, 20, 30, -3};
    std::vector<double> ss(n), sa(n);
    kernels::stencil6_scalar(ss.data(), src.data(), n, c);
    kernels::stencil6_avx2(sa.data(), src.data(), n, c);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(std::abs(ss[i] - sa[i]) <= 1e-13 * (std::abs(ss[i]) + 1.0));
  }
}

TEST_CASE("dispatched entry points match a direct variant") {
  std::mt19937 rng(3);
  const std::size_t n = 257;
  auto a = random_buf(rng, n), b = random_buf(rng, n), w = random_buf(rng, n);
  const double want_dot = kernels::have_avx2() ? kernels::dot_avx2(a.data(), b.data(), n)
                                               : kernels::dot_scalar(a.data(), b.data(), n);
  CHECK(kernels::dot(a.data(), b.data(), n) == want_dot);
  const double want_wdot = kernels::have_avx2()
                               ? kernels::wdot_avx2(a.data(), b.data(), w.data(), n)
                               : kernels::wdot_scalar(a.data(), b.data(), w.data(), n);
  CHECK(kernels::wdot(a.data(), b.data(), w.data(), n) == want_wdot);
}

TEST_CASE("wdot equals dot of pre-weighted operand") {
  std::mt19937 rng(4);
  const std::size_t n = 128;
  auto a = random_buf(rng, n), b = random_buf(rng, n), w = random_buf(rng, n);
  const long double want = wdot_ld(a.data(), b.data(), w.data(), n);
  const double got = kernels::wdot(a.data(), b.data(), w.data(), n);
  CHECK(std::abs(static_cast<long double>(got) - want) <=
        1e-13L * (std::abs(want) + 1.0L));
}
