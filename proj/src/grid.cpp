#include "lrvp/grid.hpp"

#include <cmath>
#include <stdexcept>

#include "lrvp/kernels.hpp"

namespace lrvp {

AxisGrid build_axis(int n, double lo, double hi, bool periodic) {
  if (n < 8) throw std::invalid_argument("build_axis: need n >= 8");
  if (!(lo < hi)) throw std::invalid_argument("build_axis: need lo < hi");
  AxisGrid g;
  g.n = n;
  g.lo = lo;
  g.hi = hi;
  g.periodic = periodic;
  g.h = periodic ? (hi - lo) / n : (hi - lo) / (n - 1);
  g.points.resize(n);
  for (int i = 0; i < n; ++i) g.points[i] = lo + i * g.h;
  return g;
}

VelocityWeights build_weights(const AxisGrid& axis, const std::function<double(double)>& form,
                              double sigma, double min_weight) {
  if (axis.periodic)
    throw std::invalid_argument("build_weights: weights are for non-periodic velocity axes");
  VelocityWeights vw;
  vw.axis = axis;
  vw.sigma = sigma;
  const int n = axis.n;
  vw.w.resize(n);
  vw.sqrt_w.resize(n);
  vw.inv_w.resize(n);
  vw.inv_sqrt_w.resize(n);
  for (int j = 0; j < n; ++j) {
    double wv = form(axis.points[j]);
    if (min_weight > 0.0 && wv < min_weight) wv = min_weight;
    if (!(wv > 0.0))
      throw std::domain_error("build_weights: weight underflow/non-positive at a grid node");
    const double wj = wv * axis.h;
    vw.w[j] = wj;
    vw.sqrt_w[j] = std::sqrt(wj);
    vw.inv_w[j] = 1.0 / wj;
    vw.inv_sqrt_w[j] = 1.0 / vw.sqrt_w[j];
  }
  return vw;
}

VelocityWeights build_gaussian_weights(const AxisGrid& axis, double sigma, double min_weight) {
  const double s2 = 2.0 * sigma * sigma;
  return build_weights(
      axis, [s2](double v) { return std::exp(-v * v / s2); }, sigma, min_weight);
}

double inner(const VectorXd& f, const VectorXd& g, const AxisGrid& axis) {
  if (f.size() != g.size() || f.size() != axis.n)
    throw std::invalid_argument("inner: length mismatch");
  return axis.h * kernels::dot(f.data(), g.data(), static_cast<std::size_t>(f.size()));
}

double inner_w(const VectorXd& f, const VectorXd& g, const VelocityWeights& weights) {
  if (f.size() != g.size() || f.size() != weights.w.size())
    throw std::invalid_argument("inner_w: length mismatch");
  return kernels::wdot(f.data(), g.data(), weights.w.data(),
                       static_cast<std::size_t>(f.size()));
}

}  // namespace lrvp
