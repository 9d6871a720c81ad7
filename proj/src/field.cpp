#include "lrvp/field.hpp"

#include <complex>
#include <numbers>
#include <stdexcept>

namespace lrvp {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using std::complex;

constexpr double kSplitCompressionEps = 1e-12;

// Forward DFT matrix, W(m, j) = exp(-2*pi*i*m*j/N).
MatrixXcd dft_matrix(int n) {
  MatrixXcd W(n, n);
  const double w0 = -2.0 * std::numbers::pi / n;
  for (int m = 0; m < n; ++m)
    for (int j = 0; j < n; ++j) W(m, j) = std::polar(1.0, w0 * m * j);
  return W;
}

// Signed wavenumber of DFT bin m on a length-L periodic domain.
// The Nyquist bin of even N is treated as unresolved and dropped.
double wavenumber(int m, int n, double L) {
  const int ms = (m <= n / 2) ? m : m - n;
  if (n % 2 == 0 && m == n / 2) return 0.0;
  return 2.0 * std::numbers::pi * ms / L;
}

}  // namespace

Field1D solve_poisson_1d(const VectorXd& rho, const AxisGrid& grid) {
  if (!grid.periodic) throw std::invalid_argument("solve_poisson_1d: grid must be periodic");
  if (rho.size() != grid.n) throw std::invalid_argument("solve_poisson_1d: length mismatch");
  const int n = grid.n;
  const double L = grid.hi - grid.lo;
  const MatrixXcd W = dft_matrix(n);
  const VectorXcd rho_hat = W * rho.cast<complex<double>>();

  VectorXcd phi_hat = VectorXcd::Zero(n);
  VectorXcd e_hat = VectorXcd::Zero(n);
  for (int m = 1; m < n; ++m) {
    const double k = wavenumber(m, n, L);
    if (k == 0.0) continue;  // Nyquist
    phi_hat[m] = rho_hat[m] / (k * k);
    e_hat[m] = complex<double>(0.0, -k) * phi_hat[m];  // -i k phi
  }
  Field1D f;
  f.phi = (W.adjoint() * phi_hat).real() / n;
  f.E = (W.adjoint() * e_hat).real() / n;
  f.Eplus = f.E.cwiseMax(0.0);
  f.Eminus = f.E.cwiseMin(0.0);
  return f;
}

Field2D solve_poisson_2d(const LowRankMatrix& rho, const AxisGrid& grid1,
                         const AxisGrid& grid2) {
  if (!grid1.periodic || !grid2.periodic)
    throw std::invalid_argument("solve_poisson_2d: grids must be periodic");
  const int n1 = grid1.n, n2 = grid2.n;
  if (rho.rows() != n1 || rho.cols() != n2)
    throw std::invalid_argument("solve_poisson_2d: size mismatch");
  const double L1 = grid1.hi - grid1.lo, L2 = grid2.hi - grid2.lo;
  const MatrixXcd W1 = dft_matrix(n1), W2 = dft_matrix(n2);
  const MatrixXcd rho_hat = W1 * rho.dense().cast<complex<double>>() * W2.transpose();

  MatrixXcd phi_hat = MatrixXcd::Zero(n1, n2);
  MatrixXcd e1_hat = MatrixXcd::Zero(n1, n2);
  MatrixXcd e2_hat = MatrixXcd::Zero(n1, n2);
  for (int m1 = 0; m1 < n1; ++m1) {
    for (int m2 = 0; m2 < n2; ++m2) {
      if (m1 == 0 && m2 == 0) continue;
      const double k1 = wavenumber(m1, n1, L1);
      const double k2 = wavenumber(m2, n2, L2);
      const double k_sq = k1 * k1 + k2 * k2;
      if (k_sq == 0.0) continue;
      phi_hat(m1, m2) = rho_hat(m1, m2) / k_sq;
      e1_hat(m1, m2) = complex<double>(0.0, -k1) * phi_hat(m1, m2);
      e2_hat(m1, m2) = complex<double>(0.0, -k2) * phi_hat(m1, m2);
    }
  }
  const double scale = 1.0 / (static_cast<double>(n1) * n2);
  Field2D f;
  f.phi = (W1.adjoint() * phi_hat * W2.conjugate()).real() * scale;
  f.E1 = (W1.adjoint() * e1_hat * W2.conjugate()).real() * scale;
  f.E2 = (W1.adjoint() * e2_hat * W2.conjugate()).real() * scale;

  auto compress = [](const MatrixXd& m) {
    Eigen::JacobiSVD<MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    LowRankMatrix full(svd.singularValues(), svd.matrixU(), svd.matrixV(), true);
    return full.truncate_svd(kSplitCompressionEps);
  };
  f.E1p = compress(f.E1.cwiseMax(0.0));
  f.E1m = compress(f.E1.cwiseMin(0.0));
  f.E2p = compress(f.E2.cwiseMax(0.0));
  f.E2m = compress(f.E2.cwiseMin(0.0));
  return f;
}

double electric_energy(const Field1D& field, const AxisGrid& grid) {
  return 0.5 * grid.h * field.E.squaredNorm();
}

double electric_energy(const Field2D& field, const AxisGrid& grid1, const AxisGrid& grid2) {
  return 0.5 * grid1.h * grid2.h * (field.E1.squaredNorm() + field.E2.squaredNorm());
}

}  // namespace lrvp
