#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lrvp/diagnostics.hpp"
#include "lrvp/stepper.hpp"
#include "test_helpers.hpp"

using namespace lrvp;
using namespace lrvp::testing;

namespace {

SimulationConfig small_1d_config() {
  SimulationConfig cfg = preset_config("weak_landau_1d");
  cfg.nx = 32;
  cfg.nv = 32;
  cfg.alpha = 0.1;  // visible field so the E-terms are exercised
  return cfg;
}

// Same construction as the stepper: Gaussian-shaped profile with plain
// moments (mass, momentum, energy) = (1, 0, 0).
VectorXd neutral_bump(const VelocityWeights& wts) {
  const VectorXd& v = wts.axis.points;
  const double h = wts.axis.h;
  MatrixXd cols(v.size(), 3);
  cols.col(0) = wts.w;
  cols.col(1) = wts.w.cwiseProduct(v);
  cols.col(2) = wts.w.cwiseProduct(v.array().square().matrix());
  Eigen::Matrix3d M;
  for (int k = 0; k < 3; ++k) {
    M(0, k) = h * cols.col(k).sum();
    M(1, k) = h * cols.col(k).dot(v);
    M(2, k) = h * 0.5 * cols.col(k).dot(v.array().square().matrix());
  }
  return cols * M.fullPivLu().solve(Eigen::Vector3d(1.0, 0.0, 0.0));
}

// Dense oracle of the 1D1V right-hand side, including the mass-free
// correction applied to the velocity-derivative columns.
MatrixXd dense_rhs_1d(const Stepper1D1V& st, const MatrixXd& F, const Field1D& field) {
  const AxisGrid& xg = st.xgrid();
  const AxisGrid& vg = st.vgrid();
  const UpwindOperator dxp(Wind::plus, xg), dxm(Wind::minus, xg);
  const UpwindOperator dvp(Wind::plus, vg), dvm(Wind::minus, vg);
  const VectorXd vp = vg.points.cwiseMax(0.0), vm = vg.points.cwiseMin(0.0);
  const VectorXd mb = neutral_bump(st.weights());

  auto ddx = [&](const MatrixXd& G, const UpwindOperator& d) {
    MatrixXd out(G.rows(), G.cols());
    for (int j = 0; j < G.cols(); ++j) out.col(j) = d.apply(G.col(j));
    return out;
  };
  auto ddv_massfree = [&](const MatrixXd& G, const UpwindOperator& d) {
    MatrixXd out(G.rows(), G.cols());
    for (int i = 0; i < G.rows(); ++i) out.row(i) = d.apply(G.row(i).transpose()).transpose();
    const VectorXd defect = vg.h * out.rowwise().sum();
    out -= defect * mb.transpose();
    return out;
  };

  MatrixXd rhs = ddx(F * vp.asDiagonal(), dxp) + ddx(F * vm.asDiagonal(), dxm);
  rhs += ddv_massfree(field.Eplus.asDiagonal() * F, dvp);
  rhs += ddv_massfree(field.Eminus.asDiagonal() * F, dvm);
  return -rhs;
}

}  // namespace

TEST_CASE("1D rhs matches the dense oracle") {
  Stepper1D1V st(small_1d_config());
  const LowRankMatrix& f = st.solution();
  const MatrixXd want = dense_rhs_1d(st, f.dense(), st.field());
  const MatrixXd got = st.rhs(f, st.field()).dense();
  CHECK(rel_err(got, want) <= 1e-11);
}

TEST_CASE("1D rhs columns carry zero plain mass") {
  Stepper1D1V st(small_1d_config());
  const LowRankMatrix r = st.rhs(st.solution(), st.field());
  // total mass of the rhs: h_x h_v sum = 0 (periodic transport + corrected E terms)
  const double m = st.xgrid().h * st.vgrid().h * r.dense().sum();
  CHECK(std::abs(m) <= 1e-15);
}

TEST_CASE("time-step constants satisfy the second-order conditions") {
  // u^{n+1} = a u^n + b u^{n-2} + c dt u'(t_n); expanding u(t_n - 2dt):
  //   order 0: a + b = 1
  //   order 1: -2b + c = 1
  //   order 2: (4/2) b = 1/2
  CHECK(kSspml2WeightN + kSspml2WeightNm2 == doctest::Approx(1.0));
  CHECK(-2.0 * kSspml2WeightNm2 + kSspml2RhsWeight == doctest::Approx(1.0));
  CHECK(2.0 * kSspml2WeightNm2 == doctest::Approx(0.5));
  // and the third-order condition (-8/6) b = 1/6 fails, so the order is
  // exactly 2
  CHECK(std::abs(-(8.0 / 6.0) * kSspml2WeightNm2 - 1.0 / 6.0) > 1e-2);
}

TEST_CASE("time integrator is second order on a linear system") {
  // y' = A y with A the fifth-order upwind advection matrix; temporal order
  // is isolated by comparing against a tiny-dt reference on the same A.
  const AxisGrid g = build_axis(32, 0.0, 2.0 * std::numbers::pi, true);
  const UpwindOperator d(Wind::plus, g);
  MatrixXd A(g.n, g.n);
  {
    MatrixXd I = MatrixXd::Identity(g.n, g.n);
    for (int j = 0; j < g.n; ++j) A.col(j) = -d.apply(I.col(j));
  }
  const VectorXd y0 = g.points.array().sin().matrix();
  const double T = 1.0;

  auto integrate = [&](int nsteps) {
    const double dt = T / nsteps;
    VectorXd y = y0, ym1 = y0, ym2 = y0;
    for (int s = 0; s < nsteps; ++s) {
      const VectorXd r = A * y;
      VectorXd yn = (s < 2) ? VectorXd(y + dt * r)
                            : VectorXd(kSspml2WeightN * y + kSspml2WeightNm2 * ym2 +
                                       kSspml2RhsWeight * dt * r);
      ym2 = ym1;
      ym1 = y;
      y = yn;
    }
    return y;
  };

  const VectorXd ref = integrate(6400);
  std::vector<double> errs;
  for (int n : {50, 100, 200}) errs.push_back((integrate(n) - ref).norm());
  for (std::size_t i = 1; i < errs.size(); ++i) {
    const double order = std::log2(errs[i - 1] / errs[i]);
    CHECK(order == doctest::Approx(2.0).epsilon(0.1));
  }
}

TEST_CASE("one step preserves mass and momentum to machine precision") {
  Stepper1D1V st(small_1d_config());
  const auto before = invariants(st.solution(), st.field(), st.xgrid(), st.vgrid());
  for (int s = 0; s < 5; ++s) st.advance();
  const auto after = invariants(st.solution(), st.field(), st.xgrid(), st.vgrid());
  CHECK(rel_err(after.total_mass, before.total_mass) <= 1e-13);
  CHECK(std::abs(after.momentum[0]) <= 1e-13);
}

TEST_CASE("set_solution resets history and time") {
  Stepper1D1V st(small_1d_config());
  for (int s = 0; s < 3; ++s) st.advance();
  const LowRankMatrix f = st.solution();
  st.set_solution(f, 0.0);
  CHECK(st.time() == 0.0);
  CHECK(st.step_index() == 0);
}

TEST_CASE("rank ceiling aborts the step") {
  SimulationConfig cfg = small_1d_config();
  cfg.rank_ceiling = 1;
  cfg.eps = 1e-14;
  Stepper1D1V st(cfg);
  CHECK_THROWS_AS(
      [&] {
        for (int s = 0; s < 10; ++s) st.advance();
      }(),
      std::runtime_error);
}

TEST_CASE("2D rhs matches a dense oracle on a small grid") {
  SimulationConfig cfg = preset_config("weak_landau_2d");
  cfg.nx = 8;
  cfg.nv = 12;
  cfg.alpha = 0.1;
  Stepper2D2V st(cfg);
  const AxisGrid& xg = st.xgrid();
  const AxisGrid& vg = st.vgrid();
  const int nx = xg.n, nv = vg.n;
  const HTensor& f = st.solution();
  const Field2D& field = st.field();
  const MatrixXd F = f.dense_matrix();  // (x1 + nx*x2) rows, (v1 + nv*v2) cols
  const UpwindOperator dxp(Wind::plus, xg), dxm(Wind::minus, xg);
  const UpwindOperator dvp(Wind::plus, vg), dvm(Wind::minus, vg);
  const VectorXd vp = vg.points.cwiseMax(0.0), vm = vg.points.cwiseMin(0.0);
  const VectorXd mb = neutral_bump(st.vbasis().weights1);

  // dense helpers acting on one phase-space direction at a time
  auto ddx1 = [&](const MatrixXd& G, const UpwindOperator& d) {
    MatrixXd out(G.rows(), G.cols());
    for (int c = 0; c < G.cols(); ++c)
      for (int i2 = 0; i2 < nx; ++i2) {
        VectorXd col(nx);
        for (int i1 = 0; i1 < nx; ++i1) col[i1] = G(i1 + nx * i2, c);
        const VectorXd dcol = d.apply(col);
        for (int i1 = 0; i1 < nx; ++i1) out(i1 + nx * i2, c) = dcol[i1];
      }
    return out;
  };
  auto ddx2 = [&](const MatrixXd& G, const UpwindOperator& d) {
    MatrixXd out(G.rows(), G.cols());
    for (int c = 0; c < G.cols(); ++c)
      for (int i1 = 0; i1 < nx; ++i1) {
        VectorXd col(nx);
        for (int i2 = 0; i2 < nx; ++i2) col[i2] = G(i1 + nx * i2, c);
        const VectorXd dcol = d.apply(col);
        for (int i2 = 0; i2 < nx; ++i2) out(i1 + nx * i2, c) = dcol[i2];
      }
    return out;
  };
  auto ddv = [&](const MatrixXd& G, const UpwindOperator& d, int vdim) {
    MatrixXd out(G.rows(), G.cols());
    for (int r = 0; r < G.rows(); ++r)
      for (int jo = 0; jo < nv; ++jo) {
        VectorXd line(nv);
        for (int ji = 0; ji < nv; ++ji)
          line[ji] = (vdim == 1) ? G(r, ji + nv * jo) : G(r, jo + nv * ji);
        VectorXd dl = d.apply(line);
        dl -= (vg.h * dl.sum()) * mb;  // mass-free correction per line
        for (int ji = 0; ji < nv; ++ji) {
          if (vdim == 1)
            out(r, ji + nv * jo) = dl[ji];
          else
            out(r, jo + nv * ji) = dl[ji];
        }
      }
    return out;
  };
  auto scale_vdim = [&](MatrixXd G, const VectorXd& s, int vdim) {
    for (int j2 = 0; j2 < nv; ++j2)
      for (int j1 = 0; j1 < nv; ++j1)
        G.col(j1 + nv * j2) *= (vdim == 1) ? s[j1] : s[j2];
    return G;
  };
  auto scale_xdim = [&](MatrixXd G, const MatrixXd& E) {
    for (int i2 = 0; i2 < nx; ++i2)
      for (int i1 = 0; i1 < nx; ++i1) G.row(i1 + nx * i2) *= E(i1, i2);
    return G;
  };

  MatrixXd want = ddx1(scale_vdim(F, vp, 1), dxp) + ddx1(scale_vdim(F, vm, 1), dxm) +
                  ddx2(scale_vdim(F, vp, 2), dxp) + ddx2(scale_vdim(F, vm, 2), dxm);
  want += ddv(scale_xdim(F, field.E1p.dense()), dvp, 1);
  want += ddv(scale_xdim(F, field.E1m.dense()), dvm, 1);
  want += ddv(scale_xdim(F, field.E2p.dense()), dvp, 2);
  want += ddv(scale_xdim(F, field.E2m.dense()), dvm, 2);
  want = -want;

  const MatrixXd got = st.rhs(f, field).dense_matrix();
  CHECK(rel_err(got, want) <= 1e-11);
}

TEST_CASE("2D step preserves mass") {
  SimulationConfig cfg = preset_config("weak_landau_2d");
  cfg.nx = 8;
  cfg.nv = 16;
  cfg.alpha = 0.05;
  Stepper2D2V st(cfg);
  const auto before = invariants(st.solution(), st.field(), st.xgrid(), st.vgrid());
  for (int s = 0; s < 3; ++s) st.advance();
  const auto after = invariants(st.solution(), st.field(), st.xgrid(), st.vgrid());
  CHECK(rel_err(after.total_mass, before.total_mass) <= 1e-12);
  CHECK(std::abs(after.momentum[0]) <= 1e-12);
  CHECK(std::abs(after.momentum[1]) <= 1e-12);
}
