#pragma once

// Uniform phase-space grids and the discrete inner products the whole
// solver is built on.
//
// Conventions:
//  - periodic (spatial) axes store n points on [lo, hi) with h = (hi-lo)/n;
//    the right endpoint is dropped to avoid duplication.
//  - bounded (velocity) axes include both endpoints, h = (hi-lo)/(n-1).
//  - plain inner product: <f,g> = h * sum_j f_j g_j.
//  - weighted inner product: <f,g>_w = sum_j f_j g_j w_j with
//    w_j = w(v_j) * h, so the mesh factor lives inside the weights.

#include <Eigen/Dense>
#include <functional>

namespace lrvp {

using Eigen::VectorXd;

struct AxisGrid {
  int n = 0;
  double lo = 0.0;
  double hi = 0.0;
  double h = 0.0;
  VectorXd points;
  bool periodic = false;
};

// n >= 8, lo < hi; throws std::invalid_argument otherwise.
AxisGrid build_axis(int n, double lo, double hi, bool periodic);

struct VelocityWeights {
  AxisGrid axis;
  VectorXd w;         // w(v_j) * h_v
  VectorXd sqrt_w;
  VectorXd inv_w;
  VectorXd inv_sqrt_w;
  double sigma = 0.0;  // decay parameter of the generating weight function
};

// Builds quadrature weights w_j = form(v_j) * h_v on a non-periodic axis.
// Throws if the axis is periodic or if the weight underflows to 0 anywhere.
// min_weight, when positive, floors form(v_j) before the h_v factor.
VelocityWeights build_weights(const AxisGrid& axis, const std::function<double(double)>& form,
                              double sigma, double min_weight = 0.0);

// Gaussian weight exp(-v^2 / (2 sigma^2)).
VelocityWeights build_gaussian_weights(const AxisGrid& axis, double sigma,
                                       double min_weight = 0.0);

// <f,g> = h * sum f_j g_j
double inner(const VectorXd& f, const VectorXd& g, const AxisGrid& axis);

// <f,g>_w = sum f_j g_j w_j
double inner_w(const VectorXd& f, const VectorXd& g, const VelocityWeights& weights);

}  // namespace lrvp
