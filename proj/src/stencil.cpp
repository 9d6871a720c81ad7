#include "lrvp/stencil.hpp"

#include <stdexcept>
#include <vector>

#include "lrvp/kernels.hpp"

namespace lrvp {

UpwindOperator::UpwindOperator(Wind direction, const AxisGrid& axis)
    : dir_(direction), axis_(axis) {
  const double s = 1.0 / (60.0 * axis.h);
  if (direction == Wind::plus) {
    // offsets -3..+2
    off_min_ = -3;
    const double c[6] = {-2, 15, -60, 20, 30, -3};
    for (int k = 0; k < 6; ++k) coeff_[k] = s * c[k];
  } else {
    // mirrored, offsets -2..+3
    off_min_ = -2;
    const double c[6] = {3, -30, -20, 60, -15, 2};
    for (int k = 0; k < 6; ++k) coeff_[k] = s * c[k];
  }
}

VectorXd UpwindOperator::apply(const VectorXd& u) const {
  if (u.size() != axis_.n) throw std::invalid_argument("UpwindOperator: length mismatch");
  const int n = axis_.n;
  const int pad = 3;
  std::vector<double> src(static_cast<std::size_t>(n) + 2 * pad, 0.0);
  for (int i = 0; i < n; ++i) src[pad + i] = u[i];
  if (axis_.periodic) {
    for (int g = 0; g < pad; ++g) {
      src[g] = u[n - pad + g];
      src[pad + n + g] = u[g];
    }
  }
  VectorXd out(n);
  // dst[i] = sum_k coeff_[k] * src[pad + i + off_min_ + k]
  kernels::stencil6(out.data(), src.data() + pad + off_min_, static_cast<std::size_t>(n),
                    coeff_);
  // A periodic derivative has exactly zero mean; removing the discrete
  // mean cancels the constant roundoff bias of the coefficient sum so
  // that h*sum(D u) telescopes to zero instead of drifting.
  if (axis_.periodic) out.array() -= out.mean();
  return out;
}

Eigen::MatrixXd UpwindOperator::apply_cols(const Eigen::MatrixXd& frames) const {
  Eigen::MatrixXd out(frames.rows(), frames.cols());
  for (Eigen::Index c = 0; c < frames.cols(); ++c) out.col(c) = apply(frames.col(c));
  return out;
}

}  // namespace lrvp
