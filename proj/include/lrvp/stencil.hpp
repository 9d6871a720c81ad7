#pragma once

// Fifth-order upwind finite-difference operators. Plus-wind uses the
// biased stencil on offsets -3..+2, minus-wind its mirror on -2..+3.
// Periodic axes wrap; bounded (velocity) axes use zero ghost values.

#include <Eigen/Dense>

#include "lrvp/grid.hpp"

namespace lrvp {

enum class Wind { plus, minus };

class UpwindOperator {
 public:
  UpwindOperator(Wind direction, const AxisGrid& axis);

  // Applies the operator to a single grid function.
  VectorXd apply(const VectorXd& u) const;

  // Applies the operator to every column of a frame.
  Eigen::MatrixXd apply_cols(const Eigen::MatrixXd& frames) const;

  Wind direction() const { return dir_; }
  const AxisGrid& axis() const { return axis_; }

 private:
  Wind dir_;
  AxisGrid axis_;
  double coeff_[6];  // offsets off_min_..off_min_+5, premultiplied by 1/(60h)
  int off_min_;
};

}  // namespace lrvp
