#pragma once

// Periodic spectral Poisson solves and electric-field assembly.
// -phi'' = rho - rho0 with the zero mode nulled; E = -grad phi.

#include <Eigen/Dense>

#include "lrvp/grid.hpp"
#include "lrvp/lowrank.hpp"

namespace lrvp {

struct Field1D {
  VectorXd E;
  VectorXd Eplus;   // max(E, 0)
  VectorXd Eminus;  // min(E, 0)
  VectorXd phi;
};

struct Field2D {
  MatrixXd E1;
  MatrixXd E2;
  MatrixXd phi;
  // sign-split low-rank compressions (threshold 1e-12)
  LowRankMatrix E1p, E1m, E2p, E2m;
};

Field1D solve_poisson_1d(const VectorXd& rho, const AxisGrid& grid);

Field2D solve_poisson_2d(const LowRankMatrix& rho, const AxisGrid& grid1,
                         const AxisGrid& grid2);

double electric_energy(const Field1D& field, const AxisGrid& grid);
double electric_energy(const Field2D& field, const AxisGrid& grid1, const AxisGrid& grid2);

}  // namespace lrvp
