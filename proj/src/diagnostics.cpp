#include "lrvp/diagnostics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "lrvp/kernels.hpp"
#include "lrvp/stepper.hpp"

namespace lrvp {

namespace {

namespace fs = std::filesystem;

constexpr Eigen::Index kDenseGuard = Eigen::Index{1} << 24;

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open output file '" + path + "'");
  os.precision(17);
  return os;
}

void check_out(std::ofstream& os, const std::string& path) {
  if (!os) throw std::runtime_error("write failed for '" + path + "'");
}

double rel_dev(double q, double q0) {
  if (q0 == 0.0) return q - q0;
  return (q - q0) / std::abs(q0);
}

std::string format_time_tag(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", t);
  return buf;
}

std::string vslice_path(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return path + "_vslice";
  return path.substr(0, dot) + "_vslice" + path.substr(dot);
}

void write_grid_csv(const MatrixXd& values, const VectorXd& row_coords,
                    const VectorXd& col_coords, const char* corner, const std::string& path) {
  if (values.size() > kDenseGuard)
    throw std::length_error("snapshot export too large for '" + path + "'");
  std::ofstream os = open_out(path);
  os << corner;
  for (Eigen::Index j = 0; j < col_coords.size(); ++j) os << "," << col_coords[j];
  os << "\n";
  for (Eigen::Index i = 0; i < row_coords.size(); ++i) {
    os << row_coords[i];
    for (Eigen::Index j = 0; j < values.cols(); ++j) os << "," << values(i, j);
    os << "\n";
  }
  check_out(os, path);
}

// f(x1=i1, x2=i2, :, :) of an HT tensor.
MatrixXd central_vslice(const HTensor& f, Eigen::Index i1, Eigen::Index i2) {
  const RankTuple r = f.ranks();
  using Eigen::Map;
  VectorXd c12(r.r12);
  for (int l = 0; l < r.r12; ++l) {
    Map<const MatrixXd> s(f.B12().col(l).data(), r.r1, r.r2);
    c12[l] = (f.U(1).row(i1) * s * f.U(2).row(i2).transpose()).value();
  }
  const VectorXd c34 = f.Broot().transpose() * c12;  // r34
  MatrixXd out = MatrixXd::Zero(f.dim_size(3), f.dim_size(4));
  for (int l = 0; l < r.r34; ++l) {
    Map<const MatrixXd> s(f.B34().col(l).data(), r.r3, r.r4);
    out += c34[l] * (f.U(3) * s * f.U(4).transpose());
  }
  return out;
}

double total_of(const LowRankMatrix& m, double cell) { return cell * m.dense().sum(); }

struct RunFiles {
  std::vector<DiagnosticsRecord> records;
  int steps = 0;
  double dt = 0.0;
};

void write_manifest(const SimulationConfig& cfg, const RunFiles& run, const std::string& status,
                    double wall_seconds) {
  const std::string path = cfg.outdir + "/manifest.txt";
  std::ofstream os = open_out(path);
  os << "status = " << status << "\n";
  os << "solver = lrvp 1.0.0\n";
  os << "eigen = " << EIGEN_WORLD_VERSION << "." << EIGEN_MAJOR_VERSION << "."
     << EIGEN_MINOR_VERSION << "\n";
  os << "compiler = " << __VERSION__ << "\n";
  os << "simd = " << (kernels::have_avx2() ? "avx2" : "scalar") << "\n";
  os << "steps = " << run.steps << "\n";
  os << "dt = " << run.dt << "\n";
  os << "wall_seconds = " << wall_seconds << "\n";
  os << "\n[config]\n" << serialize_config(cfg);
  check_out(os, path);
}

// Shared time loop; Stepper is Stepper1D1V or Stepper2D2V.
template <class Stepper, class Record, class Snapshot>
RunFiles time_loop(const SimulationConfig& cfg, Stepper& st, Record record, Snapshot snapshot) {
  RunFiles run;
  run.dt = st.dt();
  const int n_steps =
      cfg.t_end > 0.0 ? static_cast<int>(std::ceil(cfg.t_end / st.dt() - 1e-12)) : 0;
  run.steps = n_steps;

  std::vector<double> snaps = cfg.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  std::size_t next_snap = 0;
  auto flush_snaps = [&](double t) {
    while (next_snap < snaps.size() && snaps[next_snap] <= t + 1e-12) {
      snapshot(snaps[next_snap]);
      ++next_snap;
    }
  };

  run.records.push_back(record());
  run.records.back().time = st.time();
  flush_snaps(0.0);
  const double mass0 = run.records.front().total_mass;
  const int log_every = std::max(1, n_steps / 20);
  for (int s = 1; s <= n_steps; ++s) {
    st.advance();
    const bool last = (s == n_steps);
    if (s % cfg.diag_every == 0 || last) {
      run.records.push_back(record());
      run.records.back().time = st.time();
      const DiagnosticsRecord& r = run.records.back();
      if (s % log_every == 0 || last) {
        int rmax = 0;
        for (int v : r.ranks) rmax = std::max(rmax, v);
        std::cerr << "step " << s << "/" << n_steps << " t=" << st.time() << " rank=" << rmax
                  << " mass_dev=" << rel_dev(r.total_mass, mass0) << "\n";
      }
    }
    flush_snaps(st.time());
  }
  return run;
}

RunFiles run_one(const SimulationConfig& cfg) {
  fs::create_directories(cfg.outdir);
  const auto t0 = std::chrono::steady_clock::now();
  auto wall = [&t0] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  RunFiles run;
  try {
    if (cfg.dim == 1) {
      Stepper1D1V st(cfg);
      run = time_loop(
          cfg, st,
          [&] { return invariants(st.solution(), st.field(), st.xgrid(), st.vgrid()); },
          [&](double ts) {
            write_snapshot(st.solution(), st.xgrid(), st.vgrid(),
                           cfg.outdir + "/snapshot_t" + format_time_tag(ts) + ".csv");
          });
    } else {
      Stepper2D2V st(cfg);
      run = time_loop(
          cfg, st,
          [&] { return invariants(st.solution(), st.field(), st.xgrid(), st.vgrid()); },
          [&](double ts) {
            write_snapshot(st.solution(), st.xgrid(), st.vgrid(),
                           cfg.outdir + "/snapshot_t" + format_time_tag(ts) + ".csv");
          });
    }
  } catch (const std::exception& e) {
    write_timeseries(run.records, cfg.outdir + "/timeseries.csv", cfg.momentum_report);
    write_manifest(cfg, run, std::string("failed: ") + e.what(), wall());
    throw;
  }
  write_timeseries(run.records, cfg.outdir + "/timeseries.csv", cfg.momentum_report);
  write_manifest(cfg, run, "ok", wall());
  return run;
}

}  // namespace

DiagnosticsRecord invariants(const LowRankMatrix& f, const Field1D& field,
                             const AxisGrid& xgrid, const AxisGrid& vgrid) {
  const Moments1D m = f.moments(vgrid);
  DiagnosticsRecord r;
  r.dim = 1;
  r.total_mass = xgrid.h * m.rho.sum();
  r.momentum[0] = xgrid.h * m.J.sum();
  r.kinetic_energy = xgrid.h * m.kappa.sum();
  r.electric_energy = electric_energy(field, xgrid);
  r.total_energy = r.kinetic_energy + r.electric_energy;
  r.ranks = {f.rank()};
  return r;
}

DiagnosticsRecord invariants(const HTensor& f, const Field2D& field, const AxisGrid& xgrid,
                             const AxisGrid& vgrid) {
  const HTMoments m = ht_moments(f, vgrid, vgrid);
  const double cell = xgrid.h * xgrid.h;
  DiagnosticsRecord r;
  r.dim = 2;
  r.total_mass = total_of(m.rho, cell);
  r.momentum[0] = total_of(m.J1, cell);
  r.momentum[1] = total_of(m.J2, cell);
  r.kinetic_energy = total_of(m.kappa, cell);
  r.electric_energy = electric_energy(field, xgrid, xgrid);
  r.total_energy = r.kinetic_energy + r.electric_energy;
  const RankTuple t = f.ranks();
  r.ranks = {t.r1, t.r2, t.r3, t.r4, t.r12, t.r34};
  return r;
}

void write_timeseries(const std::vector<DiagnosticsRecord>& records, const std::string& path,
                      MomentumReport momentum_report) {
  std::ofstream os = open_out(path);
  const int dim = records.empty() ? 1 : records.front().dim;
  os << "time,mass_dev,momentum_1";
  if (dim == 2) os << ",momentum_2";
  os << ",energy_dev,electric_energy";
  if (dim == 1)
    os << ",rank_r";
  else
    os << ",rank_r1,rank_r2,rank_r3,rank_r4,rank_r12,rank_r34";
  os << "\n";
  if (records.empty()) {
    check_out(os, path);
    return;
  }
  const DiagnosticsRecord& b = records.front();
  for (const DiagnosticsRecord& r : records) {
    os << r.time << "," << rel_dev(r.total_mass, b.total_mass);
    for (int c = 0; c < dim; ++c) {
      const double rep = momentum_report == MomentumReport::absolute
                             ? std::abs(r.momentum[c])
                             : rel_dev(r.momentum[c], b.momentum[c]);
      os << "," << rep;
    }
    os << "," << rel_dev(r.total_energy, b.total_energy) << "," << r.electric_energy;
    for (int v : r.ranks) os << "," << v;
    os << "\n";
  }
  check_out(os, path);
}

void write_snapshot(const LowRankMatrix& f, const AxisGrid& xgrid, const AxisGrid& vgrid,
                    const std::string& path) {
  write_grid_csv(f.dense(), xgrid.points, vgrid.points, "x\\v", path);
}

void write_snapshot(const HTensor& f, const AxisGrid& xgrid, const AxisGrid& vgrid,
                    const std::string& path) {
  const HTMoments m = ht_moments(f, vgrid, vgrid);
  write_grid_csv(m.rho.dense(), xgrid.points, xgrid.points, "x1\\x2", path);
  const MatrixXd slice = central_vslice(f, xgrid.n / 2, xgrid.n / 2);
  write_grid_csv(slice, vgrid.points, vgrid.points, "v1\\v2", vslice_path(path));
}

void write_snapshot_full(const HTensor& f, const std::string& path) {
  const MatrixXd dense = f.dense_matrix();  // throws on oversize tensors
  std::ofstream os = open_out(path);
  for (Eigen::Index i = 0; i < dense.rows(); ++i) {
    for (Eigen::Index j = 0; j < dense.cols(); ++j) os << (j ? "," : "") << dense(i, j);
    os << "\n";
  }
  check_out(os, path);
}

std::vector<DiagnosticsRecord> run_simulation(const SimulationConfig& cfg, bool compare) {
  validate_config(cfg);
  if (!compare) return run_one(cfg).records;
  SimulationConfig con = cfg;
  con.mode = TruncationMode::conservative;
  con.outdir = cfg.outdir + "/conservative";
  SimulationConfig pla = cfg;
  pla.mode = TruncationMode::plain;
  pla.outdir = cfg.outdir + "/plain";
  RunFiles res = run_one(con);
  run_one(pla);
  return res.records;
}

}  // namespace lrvp
