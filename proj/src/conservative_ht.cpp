#include "lrvp/conservative_ht.hpp"

#include <cmath>
#include <stdexcept>

namespace lrvp {

namespace {

using Eigen::Index;
using Eigen::Map;

}  // namespace

VBasis2D build_vbasis2d(const VelocityWeights& weights1, const VelocityWeights& weights2) {
  const AxisGrid& g1 = weights1.axis;
  const AxisGrid& g2 = weights2.axis;
  const bool same_domain = g1.n == g2.n && g1.lo == g2.lo && g1.hi == g2.hi;
  if (!same_domain || !weights1.w.isApprox(weights2.w, 1e-14))
    throw std::invalid_argument(
        "build_vbasis2d: v1 and v2 must share the same grid and weight function");

  VBasis2D b;
  b.weights1 = weights1;
  b.weights2 = weights2;
  const VBasis1D b1 = build_vbasis(weights1, 3);
  b.c = b1.c;
  b.c1 = b1.c1;
  b.c2 = b1.c2;
  b.c3 = b1.c3;
  b.U3.resize(g1.n, 3);
  b.U3.col(0) = b1.V.col(0) / b.c1;
  b.U3.col(1) = b1.V.col(1) / b.c2;
  b.U3.col(2) = b1.V.col(2) / b.c3;
  b.U4 = b.U3;  // identical setup on both axes

  // V1 = u1(x)u1, V2 = u2(x)u1, V3 = u1(x)u2,
  // V4 = (u3(x)u1 + u1(x)u3)/sqrt(2)
  b.B34f = MatrixXd::Zero(9, 4);
  auto at = [&](int l3, int l4) { return l3 + 3 * l4; };
  b.B34f(at(0, 0), 0) = 1.0;
  b.B34f(at(1, 0), 1) = 1.0;
  b.B34f(at(0, 1), 2) = 1.0;
  b.B34f(at(2, 0), 3) = 1.0 / std::sqrt(2.0);
  b.B34f(at(0, 2), 3) = 1.0 / std::sqrt(2.0);

  b.w1_pts = weights1.w / g1.h;
  b.w2_pts = weights2.w / g2.h;
  return b;
}

HTensor project_f1(const HTensor& f, const VBasis2D& basis) {
  const RankTuple r = f.ranks();
  const AxisGrid& g1 = basis.weights1.axis;
  const AxisGrid& g2 = basis.weights2.axis;
  if (f.dim_size(3) != g1.n || f.dim_size(4) != g2.n)
    throw std::invalid_argument("project_f1: velocity grid mismatch");

  // S(k, l34) = <U34_l34, V_k> in the plain 2D inner product, evaluated
  // dimension by dimension through the leaf contractions.
  const MatrixXd A3 = f.U(3).transpose() * basis.U3;  // r3 x 3
  const MatrixXd A4 = f.U(4).transpose() * basis.U4;  // r4 x 3
  const double hh = g1.h * g2.h;
  MatrixXd S(4, r.r34);
  for (int l = 0; l < r.r34; ++l) {
    Map<const MatrixXd> Bs(f.B34().col(l).data(), r.r3, r.r4);
    const MatrixXd M = A3.transpose() * Bs * A4;  // 3 x 3
    for (int k = 0; k < 4; ++k) {
      Map<const MatrixXd> Bf(basis.B34f.col(k).data(), 3, 3);
      S(k, l) = hh * (Bf.array() * M.array()).sum();
    }
  }

  // B1_12 = B12 x (Broot S^T), matricized.
  MatrixXd B1_12 = f.B12() * (f.Broot() * S.transpose());  // (r1*r2) x 4

  MatrixXd U3f = basis.w1_pts.asDiagonal() * basis.U3;
  MatrixXd U4f = basis.w2_pts.asDiagonal() * basis.U4;
  return HTensor(f.U(1), f.U(2), std::move(U3f), std::move(U4f), std::move(B1_12), basis.B34f,
                 MatrixXd::Identity(4, 4), false);
}

HTensor cleanup_f1_node12(const HTensor& f1, double threshold) {
  const RankTuple r = f1.ranks();
  // Orthonormalize the x-leaves, absorb into the node, then cut the
  // near-null directions of the (l1,l2) x k matricization.
  Eigen::HouseholderQR<MatrixXd> qr1(f1.U(1)), qr2(f1.U(2));
  const Index k1 = std::min<Index>(f1.U(1).rows(), r.r1);
  const Index k2 = std::min<Index>(f1.U(2).rows(), r.r2);
  MatrixXd R1 = qr1.matrixQR().topRows(k1).triangularView<Eigen::Upper>();
  MatrixXd R2 = qr2.matrixQR().topRows(k2).triangularView<Eigen::Upper>();
  MatrixXd Q1 = qr1.householderQ() * MatrixXd::Identity(f1.U(1).rows(), k1);
  MatrixXd Q2 = qr2.householderQ() * MatrixXd::Identity(f1.U(2).rows(), k2);
  MatrixXd B(k1 * k2, r.r12);
  for (int l = 0; l < r.r12; ++l) {
    MatrixXd s = R1 * Map<const MatrixXd>(f1.B12().col(l).data(), r.r1, r.r2) * R2.transpose();
    B.col(l) = Map<const VectorXd>(s.data(), s.size());
  }
  Eigen::JacobiSVD<MatrixXd> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd& sig = svd.singularValues();
  int keep = static_cast<int>(sig.size());
  double tail = 0.0;
  const double budget = threshold * threshold;
  for (int k = static_cast<int>(sig.size()) - 1; k >= 1; --k) {
    tail += sig[k] * sig[k];
    if (tail <= budget)
      keep = k;
    else
      break;
  }
  MatrixXd B12 = svd.matrixU().leftCols(keep);
  MatrixXd Broot =
      sig.head(keep).asDiagonal() * svd.matrixV().leftCols(keep).transpose() * f1.Broot();
  return HTensor(std::move(Q1), std::move(Q2), f1.U(3), f1.U(4), std::move(B12), f1.B34(),
                 std::move(Broot), false);
}

HTensor conservative_truncate_2d2v(const HTensor& f, double eps, const VBasis2D& basis,
                                   bool skip_repair) {
  HTensor f1 = cleanup_f1_node12(project_f1(f, basis));
  HTensor f2 = f.add(f1.scale_const(-1.0));

  const VectorXd inv_sqrt_w1 = basis.w1_pts.array().rsqrt().matrix();
  const VectorXd inv_sqrt_w2 = basis.w2_pts.array().rsqrt().matrix();
  const VectorXd sqrt_w1 = basis.w1_pts.array().sqrt().matrix();
  const VectorXd sqrt_w2 = basis.w2_pts.array().sqrt().matrix();

  HTensor g = f2.scale_v(true, true, inv_sqrt_w1, inv_sqrt_w2).truncate(eps).scale_v(
      true, true, sqrt_w1, sqrt_w2);
  if (!skip_repair) {
    // truncation at leaves 3,4 broke orthogonality to the moment basis
    g = g.add(project_f1(g, basis).scale_const(-1.0));
  }
  return f1.add(g);
}

}  // namespace lrvp
