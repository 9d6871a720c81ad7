#pragma once

// Moment-preserving truncation for 2D2V HT tensors: explicit construction
// of the moment carrier f1, weighted HOSVD of the remainder, and the
// (I - P~) repair projection that restores zero moments after truncation.

#include <Eigen/Dense>

#include "lrvp/grid.hpp"
#include "lrvp/htensor.hpp"

namespace lrvp {

// Orthonormal conservation basis on the (v1, v2) pair node. The four
// combined elements {V1..V4} span {1, v1, v2, v1^2 + v2^2} and are
// orthonormal under the weighted 2D inner product.
struct VBasis2D {
  VelocityWeights weights1;
  VelocityWeights weights2;
  double c = 0.0;   // <1, v^2>_w / ||1||_w^2 (shared by both axes)
  double c1 = 0.0;  // ||1||_w
  double c2 = 0.0;  // ||v||_w
  double c3 = 0.0;  // ||v^2 - c||_w
  MatrixXd U3;      // N_v1 x 3 normalized leaf basis {1/c1, v/c2, (v^2-c)/c3}
  MatrixXd U4;      // N_v2 x 3, same functions on the v2 grid
  MatrixXd B34f;    // 9 x 4 matricized transfer tensor of the combined basis
  VectorXd w1_pts;  // weight point values w(v_j) (no mesh factor)
  VectorXd w2_pts;
};

// Requires identical velocity setup on both axes (same grid and weights).
VBasis2D build_vbasis2d(const VelocityWeights& weights1, const VelocityWeights& weights2);

// Scaled orthogonal projection P~: the moment carrier of f in HT form with
// ranks (r1, r2, 3, 3, 4, 4). Preserves rho, J1, J2, kappa of f.
HTensor project_f1(const HTensor& f, const VBasis2D& basis);

// SVD cleanup of the redundant node-(1,2) frame of an f1-form tensor.
HTensor cleanup_f1_node12(const HTensor& f1, double threshold = 1e-15);

// Full conservative truncation: f1 split, weighted HOSVD of the remainder
// at eps, (I - P~) repair, recombination. skip_repair exists only for the
// ablation study demonstrating why the repair projection is needed.
HTensor conservative_truncate_2d2v(const HTensor& f, double eps, const VBasis2D& basis,
                                   bool skip_repair = false);

}  // namespace lrvp
