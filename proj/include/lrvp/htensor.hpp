#pragma once

// Fourth-order hierarchical Tucker tensor on the fixed dimension tree
// {{1,2},{3,4}}. Leaves hold frames U1..U4, the pair nodes hold transfer
// tensors B12 (r1 x r2 x r12) and B34 (r3 x r4 x r34) stored in matricized
// form ((r_left*r_right) x r_parent, column-major slices), and the root
// holds the r12 x r34 coefficient matrix.

#include <Eigen/Dense>
#include <string>
#include <tuple>
#include <vector>

#include "lrvp/grid.hpp"
#include "lrvp/lowrank.hpp"
#include "lrvp/stencil.hpp"

namespace lrvp {

struct RankTuple {
  int r1 = 0, r2 = 0, r3 = 0, r4 = 0, r12 = 0, r34 = 0;
  int max() const;
};

class HTensor {
 public:
  HTensor() = default;
  HTensor(MatrixXd U1, MatrixXd U2, MatrixXd U3, MatrixXd U4, MatrixXd B12mat, MatrixXd B34mat,
          MatrixXd Broot, bool orthogonal = false);

  static HTensor from_separable(
      const std::vector<std::tuple<VectorXd, VectorXd, VectorXd, VectorXd, double>>& terms);

  RankTuple ranks() const;
  int dim_size(int leaf) const;  // leaf in 1..4
  bool orthogonal() const { return orthogonal_; }

  const MatrixXd& U(int leaf) const;
  const MatrixXd& B12() const { return B12_; }
  const MatrixXd& B34() const { return B34_; }
  const MatrixXd& Broot() const { return Broot_; }

  // Dense evaluation as an (N1*N2) x (N3*N4) matrix, column-major pair
  // indices (i1 + N1*i2, i3 + N3*i4). Guarded to <= 2^24 total entries.
  MatrixXd dense_matrix() const;

  HTensor add(const HTensor& other) const;  // node-wise rank concatenation
  HTensor scale_const(double a) const;

  // Replace leaf frame by op*frame (matrix) or vec .* frame (element-wise).
  HTensor leaf_apply(int leaf, const MatrixXd& op) const;
  HTensor leaf_scale(int leaf, const VectorXd& vec) const;
  HTensor leaf_apply(int leaf, const UpwindOperator& op) const;

  // QR sweep leaves-to-root; dense value unchanged.
  HTensor orthogonalize() const;

  double frobenius_norm() const;

  // Root-to-leaf HOSVD truncation; each of the 5 truncated nodes gets
  // tail-energy budget eps^2, so ||f - T(f)||_F <= sqrt(5)*eps.
  HTensor truncate(double eps) const;

  // Element-wise scaling of velocity leaves 3 and/or 4.
  HTensor scale_v(bool leaf3, bool leaf4, const VectorXd& w3, const VectorXd& w4) const;

  // Total stored doubles (rank accounting).
  std::size_t storage_count() const;

 private:
  MatrixXd U1_, U2_, U3_, U4_;
  MatrixXd B12_;   // (r1*r2) x r12
  MatrixXd B34_;   // (r3*r4) x r34
  MatrixXd Broot_; // r12 x r34
  bool orthogonal_ = false;
};

struct HTMoments {
  LowRankMatrix rho;
  LowRankMatrix J1;
  LowRankMatrix J2;
  LowRankMatrix kappa;
};

// Velocity-moment contraction over leaves 3,4 evaluated dimension-by-dimension.
HTMoments ht_moments(const HTensor& f, const AxisGrid& vgrid1, const AxisGrid& vgrid2);

// Debug serialization (self-describing binary container, see docs/ht_format.md).
void write_htensor(const HTensor& f, const std::string& path);
HTensor read_htensor(const std::string& path);

}  // namespace lrvp
