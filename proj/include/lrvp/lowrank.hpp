#pragma once

// Rank-r matrix representation of the 1D1V distribution function,
// f = sum_l C_l U1(:,l) (x) U2(:,l), together with the moment extraction
// and the moment-preserving truncation built on the weighted projection
// onto span{1, v, v^2 - c}.

#include <Eigen/Dense>
#include <tuple>
#include <vector>

#include "lrvp/grid.hpp"
#include "lrvp/stencil.hpp"

namespace lrvp {

using Eigen::MatrixXd;

struct Moments1D {
  VectorXd rho;
  VectorXd J;
  VectorXd kappa;
};

// Orthogonal (in <.,.>_w) conservation basis on a velocity grid.
// level selects how many invariants the projector carries:
//   1 -> {1}, 2 -> {1, v}, 3 -> {1, v, v^2 - c}.
struct VBasis1D {
  VelocityWeights weights;
  int level = 3;
  double c = 0.0;        // <1, v^2>_w / ||1||_w^2
  double c1 = 0.0;       // ||1||_w
  double c2 = 0.0;       // ||v||_w
  double c3 = 0.0;       // ||v^2 - c||_w
  MatrixXd V;            // N_v x level, columns {1, v, v^2 - c}
};

VBasis1D build_vbasis(const VelocityWeights& weights, int level = 3);

class LowRankMatrix {
 public:
  LowRankMatrix() = default;
  LowRankMatrix(VectorXd C, MatrixXd U1, MatrixXd U2, bool orthonormal = false);

  // Exact representation of sum_k coeff_k * x_k (x) v_k, rank = #terms.
  static LowRankMatrix from_separable_terms(
      const std::vector<std::tuple<VectorXd, VectorXd, double>>& terms);

  // Rank-0 zero matrix of the given shape.
  static LowRankMatrix zero(int n_x, int n_v);

  // From a small core: U1 * M * U2^T (SVD of M folded into the factors).
  static LowRankMatrix from_core(const MatrixXd& U1, const MatrixXd& core, const MatrixXd& U2);

  int rank() const { return static_cast<int>(C_.size()); }
  int rows() const { return static_cast<int>(U1_.rows()); }
  int cols() const { return static_cast<int>(U2_.rows()); }
  bool orthonormal() const { return orthonormal_; }

  const VectorXd& C() const { return C_; }
  const MatrixXd& U1() const { return U1_; }
  const MatrixXd& U2() const { return U2_; }

  MatrixXd dense() const;  // U1 diag(C) U2^T
  double frobenius_norm() const;

  LowRankMatrix add(const LowRankMatrix& other) const;       // rank concatenation
  LowRankMatrix scale_const(double a) const;                 // C <- a*C
  LowRankMatrix scale_x(const VectorXd& a) const;            // element-wise on U1 columns
  LowRankMatrix scale_v(const VectorXd& b) const;            // element-wise on U2 columns
  LowRankMatrix apply_x(const UpwindOperator& op) const;     // op on U1 columns
  LowRankMatrix apply_v(const UpwindOperator& op) const;     // op on U2 columns

  // SVD truncation: drops the smallest tail of singular values with
  // sqrt(sum sigma_k^2) <= eps (absolute tail energy). Result is
  // orthonormal; rank 0 is allowed.
  LowRankMatrix truncate_svd(double eps) const;

  Moments1D moments(const AxisGrid& vgrid) const;

  // Algorithm: split off the moment carrier f1 = sum_k M_k (x) (w * V_k),
  // truncate the zero-moment remainder in the weighted norm, recombine.
  // Preserves the discrete moments covered by the basis level.
  LowRankMatrix conservative_truncate(double eps, const VBasis1D& vbasis) const;

 private:
  VectorXd C_;
  MatrixXd U1_;
  MatrixXd U2_;
  bool orthonormal_ = false;
};

}  // namespace lrvp
