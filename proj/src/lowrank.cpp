#include "lrvp/lowrank.hpp"

#include <cmath>
#include <stdexcept>

namespace lrvp {

namespace {

// Smallest retained rank r' such that the discarded tail satisfies
// sqrt(sum_{k>r'} sigma_k^2) <= eps.
int tail_rank(const VectorXd& sigma, double eps) {
  const int n = static_cast<int>(sigma.size());
  double tail = 0.0;
  int keep = n;
  const double budget = eps * eps;
  for (int k = n - 1; k >= 0; --k) {
    tail += sigma[k] * sigma[k];
    if (tail <= budget)
      keep = k;
    else
      break;
  }
  return keep;
}

}  // namespace

VBasis1D build_vbasis(const VelocityWeights& weights, int level) {
  if (level < 1 || level > 3) throw std::invalid_argument("build_vbasis: level must be 1..3");
  VBasis1D b;
  b.weights = weights;
  b.level = level;
  const VectorXd& v = weights.axis.points;
  const int n = weights.axis.n;
  const VectorXd ones = VectorXd::Ones(n);
  const VectorXd v2 = v.array().square().matrix();
  b.c = inner_w(ones, v2, weights) / inner_w(ones, ones, weights);
  const VectorXd v3 = v2 - b.c * ones;
  b.c1 = std::sqrt(inner_w(ones, ones, weights));
  b.c2 = std::sqrt(inner_w(v, v, weights));
  b.c3 = std::sqrt(inner_w(v3, v3, weights));
  b.V.resize(n, level);
  b.V.col(0) = ones;
  if (level >= 2) b.V.col(1) = v;
  if (level >= 3) b.V.col(2) = v3;
  return b;
}

LowRankMatrix::LowRankMatrix(VectorXd C, MatrixXd U1, MatrixXd U2, bool orthonormal)
    : C_(std::move(C)), U1_(std::move(U1)), U2_(std::move(U2)), orthonormal_(orthonormal) {
  if (C_.size() != U1_.cols() || C_.size() != U2_.cols())
    throw std::invalid_argument("LowRankMatrix: inconsistent rank");
}

LowRankMatrix LowRankMatrix::from_separable_terms(
    const std::vector<std::tuple<VectorXd, VectorXd, double>>& terms) {
  if (terms.empty()) throw std::invalid_argument("from_separable_terms: empty term list");
  const auto nx = std::get<0>(terms.front()).size();
  const auto nv = std::get<1>(terms.front()).size();
  const int r = static_cast<int>(terms.size());
  VectorXd C(r);
  MatrixXd U1(nx, r), U2(nv, r);
  for (int l = 0; l < r; ++l) {
    const auto& [x, v, a] = terms[l];
    if (x.size() != nx || v.size() != nv)
      throw std::invalid_argument("from_separable_terms: inconsistent lengths");
    U1.col(l) = x;
    U2.col(l) = v;
    C[l] = a;
  }
  return LowRankMatrix(std::move(C), std::move(U1), std::move(U2), false);
}

LowRankMatrix LowRankMatrix::zero(int n_x, int n_v) {
  return LowRankMatrix(VectorXd(0), MatrixXd(n_x, 0), MatrixXd(n_v, 0), true);
}

LowRankMatrix LowRankMatrix::from_core(const MatrixXd& U1, const MatrixXd& core,
                                       const MatrixXd& U2) {
  if (U1.cols() != core.rows() || U2.cols() != core.cols())
    throw std::invalid_argument("from_core: shape mismatch");
  Eigen::JacobiSVD<MatrixXd> svd(core, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return LowRankMatrix(svd.singularValues(), U1 * svd.matrixU(), U2 * svd.matrixV(), false);
}

MatrixXd LowRankMatrix::dense() const {
  if (rank() == 0) return MatrixXd::Zero(rows(), cols());
  return U1_ * C_.asDiagonal() * U2_.transpose();
}

double LowRankMatrix::frobenius_norm() const {
  if (rank() == 0) return 0.0;
  // ||f||_F^2 = tr(diag(C) U1^T U1 diag(C) U2^T U2)
  const MatrixXd G1 = U1_.transpose() * U1_;
  const MatrixXd G2 = U2_.transpose() * U2_;
  const MatrixXd M = C_.asDiagonal() * G1 * C_.asDiagonal() * G2;
  return std::sqrt(std::max(0.0, M.trace()));
}

LowRankMatrix LowRankMatrix::add(const LowRankMatrix& other) const {
  if (rows() != other.rows() || cols() != other.cols())
    throw std::invalid_argument("LowRankMatrix::add: size mismatch");
  const int r = rank(), s = other.rank();
  VectorXd C(r + s);
  MatrixXd U1(rows(), r + s), U2(cols(), r + s);
  C.head(r) = C_;
  C.tail(s) = other.C_;
  U1.leftCols(r) = U1_;
  U1.rightCols(s) = other.U1_;
  U2.leftCols(r) = U2_;
  U2.rightCols(s) = other.U2_;
  return LowRankMatrix(std::move(C), std::move(U1), std::move(U2), false);
}

LowRankMatrix LowRankMatrix::scale_const(double a) const {
  return LowRankMatrix(a * C_, U1_, U2_, false);
}

LowRankMatrix LowRankMatrix::scale_x(const VectorXd& a) const {
  if (a.size() != rows()) throw std::invalid_argument("scale_x: length mismatch");
  return LowRankMatrix(C_, a.asDiagonal() * U1_, U2_, false);
}

LowRankMatrix LowRankMatrix::scale_v(const VectorXd& b) const {
  if (b.size() != cols()) throw std::invalid_argument("scale_v: length mismatch");
  return LowRankMatrix(C_, U1_, b.asDiagonal() * U2_, false);
}

LowRankMatrix LowRankMatrix::apply_x(const UpwindOperator& op) const {
  return LowRankMatrix(C_, op.apply_cols(U1_), U2_, false);
}

LowRankMatrix LowRankMatrix::apply_v(const UpwindOperator& op) const {
  return LowRankMatrix(C_, U1_, op.apply_cols(U2_), false);
}

LowRankMatrix LowRankMatrix::truncate_svd(double eps) const {
  if (rank() == 0) return *this;
  Eigen::HouseholderQR<MatrixXd> qr1(U1_ * C_.asDiagonal());
  Eigen::HouseholderQR<MatrixXd> qr2(U2_);
  const int r = rank();
  const int k1 = static_cast<int>(std::min<Eigen::Index>(U1_.rows(), r));
  const int k2 = static_cast<int>(std::min<Eigen::Index>(U2_.rows(), r));
  MatrixXd R1 = qr1.matrixQR().topRows(k1).triangularView<Eigen::Upper>();
  MatrixXd R2 = qr2.matrixQR().topRows(k2).triangularView<Eigen::Upper>();
  MatrixXd Q1 = qr1.householderQ() * MatrixXd::Identity(U1_.rows(), k1);
  MatrixXd Q2 = qr2.householderQ() * MatrixXd::Identity(U2_.rows(), k2);
  Eigen::JacobiSVD<MatrixXd> svd(R1 * R2.transpose(),
                                 Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd& sigma = svd.singularValues();
  const int keep = tail_rank(sigma, eps);
  return LowRankMatrix(sigma.head(keep), Q1 * svd.matrixU().leftCols(keep),
                       Q2 * svd.matrixV().leftCols(keep), true);
}

Moments1D LowRankMatrix::moments(const AxisGrid& vgrid) const {
  Moments1D m;
  const int nx = rows();
  m.rho = VectorXd::Zero(nx);
  m.J = VectorXd::Zero(nx);
  m.kappa = VectorXd::Zero(nx);
  if (rank() == 0) return m;
  const VectorXd ones = VectorXd::Ones(vgrid.n);
  const VectorXd& v = vgrid.points;
  const VectorXd half_v2 = 0.5 * v.array().square().matrix();
  for (int l = 0; l < rank(); ++l) {
    const VectorXd u2 = U2_.col(l);
    m.rho += C_[l] * inner(u2, ones, vgrid) * U1_.col(l);
    m.J += C_[l] * inner(u2, v, vgrid) * U1_.col(l);
    m.kappa += C_[l] * inner(u2, half_v2, vgrid) * U1_.col(l);
  }
  return m;
}

LowRankMatrix LowRankMatrix::conservative_truncate(double eps, const VBasis1D& vbasis) const {
  const VelocityWeights& wts = vbasis.weights;
  const AxisGrid& vgrid = wts.axis;
  if (cols() != vgrid.n)
    throw std::invalid_argument("conservative_truncate: basis grid mismatch");

  // Moment carrier f1 = sum_k M_k (x) (w * V_k) with M_k chosen so that
  // <f1(i,:), V_k> matches <f(i,:), V_k> in the plain inner product.
  const int lv = vbasis.level;
  MatrixXd WV(vgrid.n, lv);
  VectorXd Mcoef_norm(lv);
  for (int k = 0; k < lv; ++k) {
    WV.col(k) = wts.w.asDiagonal() * vbasis.V.col(k);
    Mcoef_norm[k] = inner(vbasis.V.col(k), WV.col(k), vgrid);  // h_v ||V_k||_w^2
  }
  // Accumulated in extended precision: the rank terms carry large
  // cancelling contributions, and double-rounding here leaks a biased
  // O(eps) mass error into the carrier every step.
  using MatrixXld = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  auto carrier_coeffs = [&](const LowRankMatrix& g, double sign, MatrixXld& acc) {
    for (int l = 0; l < g.rank(); ++l) {
      for (int k = 0; k < lv; ++k) {
        const double p = inner(g.U2().col(l), vbasis.V.col(k), vgrid);
        const long double coef =
            sign * static_cast<long double>(g.C()[l]) * p / Mcoef_norm[k];
        acc.col(k) += coef * g.U1().col(l).cast<long double>();
      }
    }
  };
  MatrixXld Mxl = MatrixXld::Zero(rows(), lv);
  carrier_coeffs(*this, 1.0, Mxl);
  LowRankMatrix f1(VectorXd::Ones(lv), Mxl.cast<double>(), WV, false);

  // Zero-moment remainder, truncated in the weighted norm:
  // w * T^w(f2~) = sqrt(w) * T_eps( (1/sqrt(w)) * f2 ).
  LowRankMatrix f2 = add(f1.scale_const(-1.0));
  LowRankMatrix f2t = f2.scale_v(wts.inv_sqrt_w).truncate_svd(eps).scale_v(wts.sqrt_w);

  // Repair: the ill-conditioned 1/sqrt(w) rescaling lets the truncation
  // re-acquire O(eps_machine * max(1/sqrt(w))) moment content; fold the
  // carrier part of f2t back out of f1 so the moments stay exact. The
  // correction shares the WV frame, so the rank is unchanged.
  carrier_coeffs(f2t, -1.0, Mxl);
  LowRankMatrix f1r(VectorXd::Ones(lv), Mxl.cast<double>(), WV, false);
  return f1r.add(f2t);
}

}  // namespace lrvp
