#include "lrvp/stepper.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace lrvp {

namespace {

using Eigen::Index;
using Eigen::Map;

void thin_qr(const MatrixXd& M, MatrixXd& Q, MatrixXd& R) {
  const Index k = std::min(M.rows(), M.cols());
  if (M.cols() == 0) {
    Q = MatrixXd(M.rows(), 0);
    R = MatrixXd(0, 0);
    return;
  }
  Eigen::HouseholderQR<MatrixXd> qr(M);
  R = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  Q = qr.householderQ() * MatrixXd::Identity(M.rows(), k);
}

double stable_dt(const SimulationConfig& cfg, double hx, double hv) {
  return cfg.cfl * std::min(hx / cfg.lv, hv / cfg.e_bound);
}

[[noreturn]] void rank_abort(int rank, int ceiling) {
  throw std::runtime_error("rank ceiling exceeded: rank " + std::to_string(rank) + " > " +
                           std::to_string(ceiling) + " after truncation");
}

// Gaussian-shaped profile p with plain moments (mass, momentum, energy)
// = (1, 0, 0): subtracting defect*p from a velocity profile removes a mass
// defect without perturbing the momentum and kinetic-energy balances.
VectorXd moment_neutral_bump(const VelocityWeights& wts) {
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
  const Eigen::Vector3d beta = M.fullPivLu().solve(Eigen::Vector3d(1.0, 0.0, 0.0));
  return cols * beta;
}

}  // namespace

Stepper1D1V::Stepper1D1V(const SimulationConfig& cfg)
    : cfg_(cfg),
      policy_{cfg.mode, cfg.eps, cfg.level},
      xgrid_(build_axis(cfg.nx, 0.0, cfg.x_length(), true)),
      weights_(build_gaussian_weights(build_axis(cfg.nv, -cfg.lv, cfg.lv, false), cfg.sigma,
                                      cfg.min_weight)),
      vbasis_(build_vbasis(weights_, cfg.level)),
      dxp_(Wind::plus, xgrid_),
      dxm_(Wind::minus, xgrid_),
      dvp_(Wind::plus, weights_.axis),
      dvm_(Wind::minus, weights_.axis),
      v_plus_(weights_.axis.points.cwiseMax(0.0)),
      v_minus_(weights_.axis.points.cwiseMin(0.0)),
      mass_bump_(moment_neutral_bump(weights_)),
      dt_(stable_dt(cfg, xgrid_.h, weights_.axis.h)),
      f_(initial_condition_1d(cfg, xgrid_, weights_.axis)) {
  field_ = solve_field(f_);
}

void Stepper1D1V::set_solution(LowRankMatrix f, double time) {
  f_ = std::move(f);
  fm1_ = LowRankMatrix();
  fm2_ = LowRankMatrix();
  time_ = time;
  step_ = 0;
  field_ = solve_field(f_);
}

Field1D Stepper1D1V::solve_field(const LowRankMatrix& f) const {
  return solve_poisson_1d(f.moments(weights_.axis).rho, xgrid_);
}

LowRankMatrix Stepper1D1V::rhs(const LowRankMatrix& f, const Field1D& field) const {
  const double hv = weights_.axis.h;
  // (E f)_v with each derivative column projected to zero plain mass.
  auto e_term = [&](const VectorXd& e_sign, const UpwindOperator& dv) {
    MatrixXd U2 = dv.apply_cols(f.U2());
    for (Eigen::Index l = 0; l < U2.cols(); ++l)
      U2.col(l) -= (hv * U2.col(l).sum()) * mass_bump_;
    return LowRankMatrix(f.C(), e_sign.asDiagonal() * f.U1(), U2);
  };
  LowRankMatrix t = f.scale_v(v_plus_).apply_x(dxp_);
  t = t.add(f.scale_v(v_minus_).apply_x(dxm_));
  t = t.add(e_term(field.Eplus, dvp_));
  t = t.add(e_term(field.Eminus, dvm_));
  return t.scale_const(-1.0);
}

LowRankMatrix Stepper1D1V::truncate(const LowRankMatrix& f) const {
  if (policy_.mode == TruncationMode::conservative)
    return f.conservative_truncate(policy_.eps, vbasis_);
  // plain mode: standard non-conservative SVD truncation of f itself,
  // with the customary norm-relative tolerance
  return f.truncate_svd(policy_.eps * f.frobenius_norm());
}

void Stepper1D1V::advance() {
  const LowRankMatrix r = rhs(f_, field_);
  LowRankMatrix fnew =
      (step_ < 2) ? f_.add(r.scale_const(dt_))
                  : f_.scale_const(kSspml2WeightN)
                        .add(fm2_.scale_const(kSspml2WeightNm2))
                        .add(r.scale_const(kSspml2RhsWeight * dt_));
  fnew = truncate(fnew);
  if (fnew.rank() > cfg_.rank_ceiling) rank_abort(fnew.rank(), cfg_.rank_ceiling);
  fm2_ = std::move(fm1_);
  fm1_ = std::move(f_);
  f_ = std::move(fnew);
  time_ += dt_;
  ++step_;
  field_ = solve_field(f_);
}

Stepper2D2V::Stepper2D2V(const SimulationConfig& cfg)
    : cfg_(cfg),
      policy_{cfg.mode, cfg.eps, cfg.level},
      xgrid_(build_axis(cfg.nx, 0.0, cfg.x_length(), true)),
      vbasis_([&cfg] {
        const VelocityWeights w = build_gaussian_weights(
            build_axis(cfg.nv, -cfg.lv, cfg.lv, false), cfg.sigma, cfg.min_weight);
        return build_vbasis2d(w, w);
      }()),
      dxp_(Wind::plus, xgrid_),
      dxm_(Wind::minus, xgrid_),
      dvp_(Wind::plus, vbasis_.weights1.axis),
      dvm_(Wind::minus, vbasis_.weights1.axis),
      v_plus_(vbasis_.weights1.axis.points.cwiseMax(0.0)),
      v_minus_(vbasis_.weights1.axis.points.cwiseMin(0.0)),
      mass_bump_(moment_neutral_bump(vbasis_.weights1)),
      dt_(stable_dt(cfg, xgrid_.h, vbasis_.weights1.axis.h)),
      f_(initial_condition_2d(cfg, xgrid_, vbasis_.weights1.axis)) {
  field_ = solve_field(f_);
}

void Stepper2D2V::set_solution(HTensor f, double time) {
  f_ = std::move(f);
  fm1_ = HTensor();
  fm2_ = HTensor();
  time_ = time;
  step_ = 0;
  field_ = solve_field(f_);
}

Field2D Stepper2D2V::solve_field(const HTensor& f) const {
  const AxisGrid& vg = vbasis_.weights1.axis;
  return solve_poisson_2d(ht_moments(f, vg, vg).rho, xgrid_, xgrid_);
}

HTensor Stepper2D2V::field_term(const HTensor& f, const LowRankMatrix& e, int vleaf,
                                const UpwindOperator& dv) const {
  const RankTuple r = f.ranks();
  const int L = e.rank();
  const Index n1 = f.U(1).rows(), n2 = f.U(2).rows();
  MatrixXd A(n1, static_cast<Index>(r.r1) * L), B(n2, static_cast<Index>(r.r2) * L);
  for (int l = 0; l < L; ++l) {
    A.middleCols(static_cast<Index>(l) * r.r1, r.r1) = e.U1().col(l).asDiagonal() * f.U(1);
    B.middleCols(static_cast<Index>(l) * r.r2, r.r2) = e.U2().col(l).asDiagonal() * f.U(2);
  }
  MatrixXd QA, RA, QB, RB;
  thin_qr(A, QA, RA);
  thin_qr(B, QB, RB);
  const Index kA = QA.cols(), kB = QB.cols();
  MatrixXd B12(kA * kB, r.r12);
  for (int l12 = 0; l12 < r.r12; ++l12) {
    Map<const MatrixXd> slice(f.B12().col(l12).data(), r.r1, r.r2);
    MatrixXd s = MatrixXd::Zero(kA, kB);
    for (int l = 0; l < L; ++l) {
      s += e.C()[l] *
           (RA.middleCols(static_cast<Index>(l) * r.r1, r.r1) * slice *
            RB.middleCols(static_cast<Index>(l) * r.r2, r.r2).transpose());
    }
    B12.col(l12) = Map<const VectorXd>(s.data(), s.size());
  }
  const double hv = vbasis_.weights1.axis.h;
  auto massfree_dv = [&](const MatrixXd& U) {
    MatrixXd out = dv.apply_cols(U);
    for (Eigen::Index l = 0; l < out.cols(); ++l)
      out.col(l) -= (hv * out.col(l).sum()) * mass_bump_;
    return out;
  };
  MatrixXd U3 = (vleaf == 3) ? massfree_dv(f.U(3)) : f.U(3);
  MatrixXd U4 = (vleaf == 4) ? massfree_dv(f.U(4)) : f.U(4);
  return HTensor(std::move(QA), std::move(QB), std::move(U3), std::move(U4), std::move(B12),
                 f.B34(), f.Broot(), false);
}

HTensor Stepper2D2V::rhs(const HTensor& f, const Field2D& field) const {
  HTensor t = f.leaf_scale(3, v_plus_).leaf_apply(1, dxp_);
  t = t.add(f.leaf_scale(3, v_minus_).leaf_apply(1, dxm_));
  t = t.add(f.leaf_scale(4, v_plus_).leaf_apply(2, dxp_));
  t = t.add(f.leaf_scale(4, v_minus_).leaf_apply(2, dxm_));
  if (field.E1p.rank() > 0) t = t.add(field_term(f, field.E1p, 3, dvp_));
  if (field.E1m.rank() > 0) t = t.add(field_term(f, field.E1m, 3, dvm_));
  if (field.E2p.rank() > 0) t = t.add(field_term(f, field.E2p, 4, dvp_));
  if (field.E2m.rank() > 0) t = t.add(field_term(f, field.E2m, 4, dvm_));
  return t.scale_const(-1.0);
}

HTensor Stepper2D2V::truncate(const HTensor& f) const {
  if (policy_.mode == TruncationMode::conservative)
    return conservative_truncate_2d2v(f, policy_.eps, vbasis_);
  // plain mode: standard non-conservative HOSVD truncation of f itself,
  // with the customary norm-relative tolerance
  return f.truncate(policy_.eps * f.frobenius_norm());
}

void Stepper2D2V::advance() {
  const HTensor r = rhs(f_, field_);
  HTensor fnew = (step_ < 2) ? f_.add(r.scale_const(dt_))
                             : f_.scale_const(kSspml2WeightN)
                                   .add(fm2_.scale_const(kSspml2WeightNm2))
                                   .add(r.scale_const(kSspml2RhsWeight * dt_));
  fnew = truncate(fnew);
  const int rmax = fnew.ranks().max();
  if (rmax > cfg_.rank_ceiling) rank_abort(rmax, cfg_.rank_ceiling);
  fm2_ = std::move(fm1_);
  fm1_ = std::move(f_);
  f_ = std::move(fnew);
  time_ += dt_;
  ++step_;
  field_ = solve_field(f_);
}

}  // namespace lrvp
