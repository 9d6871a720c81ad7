#include "lrvp/problems.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lrvp {

namespace {

VectorXd map_pts(const VectorXd& pts, const std::function<double(double)>& f) {
  VectorXd out(pts.size());
  for (Eigen::Index i = 0; i < pts.size(); ++i) out[i] = f(pts[i]);
  return out;
}

VectorXd ones(const AxisGrid& g) { return VectorXd::Ones(g.n); }

VectorXd cos_kx(const AxisGrid& g, double k) {
  return map_pts(g.points, [k](double x) { return std::cos(k * x); });
}

VectorXd maxwellian(const AxisGrid& g, double center, double variance) {
  return map_pts(g.points, [center, variance](double v) {
    return std::exp(-(v - center) * (v - center) / (2.0 * variance));
  });
}

}  // namespace

LowRankMatrix initial_condition_1d(const SimulationConfig& cfg, const AxisGrid& xgrid,
                                   const AxisGrid& vgrid) {
  const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  std::vector<std::tuple<VectorXd, VectorXd, double>> terms;
  if (cfg.preset == "weak_landau_1d" || cfg.preset == "strong_landau_1d" ||
      cfg.preset == "custom") {
    // (1 + alpha cos kx) * (2 pi)^(-1/2) exp(-v^2/2)
    const VectorXd g = maxwellian(vgrid, 0.0, 1.0);
    terms.emplace_back(ones(xgrid), g, inv_sqrt_2pi);
    terms.emplace_back(cos_kx(xgrid, cfg.k), g, cfg.alpha * inv_sqrt_2pi);
  } else if (cfg.preset == "bump_on_tail") {
    // (1 + alpha cos kx) * (np exp(-v^2/2) + nb exp(-(v-u)^2/(2 vt)))
    const VectorXd bulk = maxwellian(vgrid, 0.0, 1.0);
    const VectorXd beam = maxwellian(vgrid, cfg.u, cfg.vt);
    const VectorXd xc = cos_kx(xgrid, cfg.k);
    terms.emplace_back(ones(xgrid), bulk, cfg.np);
    terms.emplace_back(xc, bulk, cfg.alpha * cfg.np);
    terms.emplace_back(ones(xgrid), beam, cfg.nb);
    terms.emplace_back(xc, beam, cfg.alpha * cfg.nb);
  } else {
    throw std::invalid_argument("initial_condition_1d: preset '" + cfg.preset +
                                "' is not a 1D1V problem");
  }
  return LowRankMatrix::from_separable_terms(terms);
}

HTensor initial_condition_2d(const SimulationConfig& cfg, const AxisGrid& xgrid,
                             const AxisGrid& vgrid) {
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<std::tuple<VectorXd, VectorXd, VectorXd, VectorXd, double>> terms;
  const VectorXd ex = ones(xgrid);
  const VectorXd xc = cos_kx(xgrid, cfg.k);
  if (cfg.preset == "weak_landau_2d" || cfg.preset == "custom") {
    // (1 + alpha (cos kx1 + cos kx2)) * (2 pi)^(-1) exp(-|v|^2/2)
    const VectorXd g = maxwellian(vgrid, 0.0, 1.0);
    const double a = 1.0 / two_pi;
    terms.emplace_back(ex, ex, g, g, a);
    terms.emplace_back(xc, ex, g, g, cfg.alpha * a);
    terms.emplace_back(ex, xc, g, g, cfg.alpha * a);
  } else if (cfg.preset == "two_stream_2d") {
    // (1 + alpha (cos kx1 + cos kx2)) / (4 * 2 pi)
    //   * prod_m (exp(-(v_m - v0)^2/2) + exp(-(v_m + v0)^2/2))
    const VectorXd pair =
        maxwellian(vgrid, cfg.v0, 1.0) + maxwellian(vgrid, -cfg.v0, 1.0);
    const double a = 1.0 / (4.0 * two_pi);
    terms.emplace_back(ex, ex, pair, pair, a);
    terms.emplace_back(xc, ex, pair, pair, cfg.alpha * a);
    terms.emplace_back(ex, xc, pair, pair, cfg.alpha * a);
  } else {
    throw std::invalid_argument("initial_condition_2d: preset '" + cfg.preset +
                                "' is not a 2D2V problem");
  }
  return HTensor::from_separable(terms);
}

}  // namespace lrvp
