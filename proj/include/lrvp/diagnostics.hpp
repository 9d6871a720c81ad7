#pragma once

// Invariant computation, time-series and snapshot export, and the run
// orchestration behind the CLI.

#include <string>
#include <vector>

#include "lrvp/config.hpp"
#include "lrvp/field.hpp"
#include "lrvp/htensor.hpp"
#include "lrvp/lowrank.hpp"

namespace lrvp {

struct DiagnosticsRecord {
  double time = 0.0;
  int dim = 1;
  double total_mass = 0.0;
  double momentum[2] = {0.0, 0.0};
  double kinetic_energy = 0.0;
  double electric_energy = 0.0;
  double total_energy = 0.0;  // kinetic + electric, exactly as summed
  std::vector<int> ranks;     // 1D: {r}; 2D: {r1,r2,r3,r4,r12,r34}
};

DiagnosticsRecord invariants(const LowRankMatrix& f, const Field1D& field,
                             const AxisGrid& xgrid, const AxisGrid& vgrid);
DiagnosticsRecord invariants(const HTensor& f, const Field2D& field, const AxisGrid& xgrid,
                             const AxisGrid& vgrid);

// CSV with header time,mass_dev,momentum_1,[momentum_2,]energy_dev,
// electric_energy,rank_... Deviations are relative to the first record;
// momentum columns follow the report policy (absolute value or relative
// deviation). 17 significant digits throughout.
void write_timeseries(const std::vector<DiagnosticsRecord>& records, const std::string& path,
                      MomentumReport momentum_report);

// Dense phase-space export, axis coordinates in the first row/column.
void write_snapshot(const LowRankMatrix& f, const AxisGrid& xgrid, const AxisGrid& vgrid,
                    const std::string& path);

// 2D2V export: the spatial density rho(x1,x2) at `path` and the central
// (v1,v2) slice at `path` with a `_vslice` suffix before the extension.
void write_snapshot(const HTensor& f, const AxisGrid& xgrid, const AxisGrid& vgrid,
                    const std::string& path);

// Full dense 2D2V export; refuses oversize tensors (same guard as
// HTensor::dense_matrix).
void write_snapshot_full(const HTensor& f, const std::string& path);

// Runs the configured simulation, writing timeseries.csv, snapshots and
// manifest.txt into cfg.outdir. Returns the recorded diagnostics.
// With compare=true, conservative and plain twins run back-to-back into
// <outdir>/conservative and <outdir>/plain; the conservative records are
// returned.
std::vector<DiagnosticsRecord> run_simulation(const SimulationConfig& cfg,
                                              bool compare = false);

}  // namespace lrvp
