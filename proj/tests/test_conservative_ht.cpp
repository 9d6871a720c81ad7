#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "lrvp/conservative_ht.hpp"
#include "test_helpers.hpp"

using namespace lrvp;
using namespace lrvp::testing;

namespace {

struct Setup {
  AxisGrid vg = build_axis(16, -6.0, 6.0, false);
  VelocityWeights w = build_gaussian_weights(vg, 1.0);
  VBasis2D basis = build_vbasis2d(w, w);
};

// Spatial moment fields of a 2D2V HT state as dense matrices.
struct M4 {
  MatrixXd rho, J1, J2, kappa;
};

M4 moments_dense(const HTensor& f, const AxisGrid& vg) {
  const HTMoments m = ht_moments(f, vg, vg);
  return {m.rho.dense(), m.J1.dense(), m.J2.dense(), m.kappa.dense()};
}

}  // namespace

TEST_CASE("combined conservation basis has an orthonormal Gram matrix") {
  Setup s;
  // Columns of U3/U4 orthonormal in <.,.>_w and B34f columns orthonormal,
  // so the 4 combined elements have Gram = I under the weighted 2D product.
  const int nv = s.vg.n;
  MatrixXd G = MatrixXd::Zero(4, 4);
  for (int a = 0; a < 4; ++a) {
    Eigen::Map<const MatrixXd> Sa(s.basis.B34f.col(a).data(), 3, 3);
    const MatrixXd Va = s.basis.U3 * Sa * s.basis.U4.transpose();  // nv x nv values
    for (int b = 0; b < 4; ++b) {
      Eigen::Map<const MatrixXd> Sb(s.basis.B34f.col(b).data(), 3, 3);
      const MatrixXd Vb = s.basis.U3 * Sb * s.basis.U4.transpose();
      double acc = 0.0;
      for (int j = 0; j < nv; ++j)
        for (int i = 0; i < nv; ++i)
          acc += Va(i, j) * Vb(i, j) * s.w.w[i] * s.w.w[j];
      G(a, b) = acc;
    }
  }
  CHECK((G - MatrixXd::Identity(4, 4)).norm() <= 1e-12);
}

TEST_CASE("project_f1 preserves all four moment fields") {
  Setup s;
  std::mt19937 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    const HTensor f = random_state_2d(rng, 12, 12, s.vg.n, s.vg.n, 4, 4, &s.vg);
    const HTensor f1 = project_f1(f, s.basis);
    const M4 a = moments_dense(f, s.vg), b = moments_dense(f1, s.vg);
    CHECK(rel_err(b.rho, a.rho) <= 1e-11);
    CHECK(rel_err(b.J1, a.J1) <= 1e-11);
    CHECK(rel_err(b.J2, a.J2) <= 1e-11);
    CHECK(rel_err(b.kappa, a.kappa) <= 1e-11);
  }
}

TEST_CASE("project_f1 is idempotent") {
  Setup s;
  std::mt19937 rng(42);
  const HTensor f = random_state_2d(rng, 10, 10, s.vg.n, s.vg.n, 3, 3, &s.vg);
  const HTensor p1 = project_f1(f, s.basis);
  const HTensor p2 = project_f1(p1, s.basis);
  CHECK(rel_err(p2.dense_matrix(), p1.dense_matrix()) <= 1e-11);
}

TEST_CASE("cleanup_f1_node12 compresses without changing the value") {
  Setup s;
  std::mt19937 rng(43);
  const HTensor f = random_state_2d(rng, 12, 12, s.vg.n, s.vg.n, 5, 5, &s.vg);
  const HTensor f1 = project_f1(f, s.basis);
  const HTensor c = cleanup_f1_node12(f1);
  CHECK(rel_err(c.dense_matrix(), f1.dense_matrix()) <= 1e-11);
  CHECK(c.storage_count() <= f1.storage_count());
}

TEST_CASE("conservative truncation preserves moments on random states") {
  Setup s;
  std::mt19937 rng(44);
  for (double eps : {1e-2, 1e-5}) {
    for (int trial = 0; trial < 5; ++trial) {
      const HTensor f = random_state_2d(rng, 12, 12, s.vg.n, s.vg.n, 5, 5, &s.vg);
      const HTensor t = conservative_truncate_2d2v(f, eps, s.basis);
      const M4 a = moments_dense(f, s.vg), b = moments_dense(t, s.vg);
      CHECK(rel_err(b.rho, a.rho) <= 1e-11);
      CHECK(rel_err(b.J1, a.J1) <= 1e-11);
      CHECK(rel_err(b.J2, a.J2) <= 1e-11);
      CHECK(rel_err(b.kappa, a.kappa) <= 1e-11);
    }
  }
}

TEST_CASE("skipping the repair projection loses the moments") {
  Setup s;
  std::mt19937 rng(45);
  double worst = 0.0;
  // eps large enough that the weighted truncation actively discards
  // directions; otherwise there is nothing for the repair to repair.
  for (int trial = 0; trial < 5; ++trial) {
    const HTensor f = random_state_2d(rng, 12, 12, s.vg.n, s.vg.n, 5, 5, &s.vg);
    const HTensor t = conservative_truncate_2d2v(f, 1e-1, s.basis, /*skip_repair=*/true);
    const M4 a = moments_dense(f, s.vg), b = moments_dense(t, s.vg);
    worst = std::max({worst, rel_err(b.rho, a.rho), rel_err(b.J1, a.J1),
                      rel_err(b.J2, a.J2), rel_err(b.kappa, a.kappa)});
  }
  CHECK(worst > 1e-8);
}
