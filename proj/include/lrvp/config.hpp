#pragma once

#include <string>
#include <vector>

namespace lrvp {

enum class TruncationMode { conservative, plain };
enum class MomentumReport { absolute, relative };

struct SimulationConfig {
  std::string preset = "custom";
  int dim = 1;  // 1 -> 1D1V, 2 -> 2D2V

  // grid
  int nx = 64;
  int nv = 128;
  double lx = 0.0;    // x domain [0, lx], periodic; 0 means 2*pi/k
  double lv = 6.0;    // v domain [-lv, lv]

  // physics parameters
  double alpha = 0.01;
  double k = 0.5;
  double v0 = 2.4;       // two-stream drift
  double np = 0.0;       // bump-on-tail bulk density
  double nb = 0.0;       // bump-on-tail beam density
  double u = 4.5;        // bump-on-tail beam drift
  double vt = 0.5;       // bump-on-tail beam temperature

  // truncation
  double eps = 1e-5;
  TruncationMode mode = TruncationMode::conservative;
  int level = 3;
  double sigma = 1.0;        // weight w(v) = exp(-v^2/(2 sigma^2))
  double min_weight = 0.0;   // optional floor on w(v) before the h_v factor
  int rank_ceiling = 300;

  // time stepping
  double cfl = 0.3;
  double e_bound = 1.0;
  double t_end = 40.0;

  // output
  int diag_every = 1;  // record diagnostics every N steps
  std::string outdir = "out";
  std::vector<double> snapshot_times;
  MomentumReport momentum_report = MomentumReport::absolute;

  double x_length() const;  // lx, or 2*pi/k when lx == 0
};

// Fills paper defaults for a named preset; throws on unknown names.
SimulationConfig preset_config(const std::string& name);

// Flat key-value file (one `key = value` per line, '#' comments).
// Unknown keys, type mismatches and constraint violations throw with the
// offending key named.
SimulationConfig parse_config_file(const std::string& path);

// Applies a single "key=value" override.
void apply_override(SimulationConfig& cfg, const std::string& assignment);

// Normalized serialization (round-trips through parse).
std::string serialize_config(const SimulationConfig& cfg);

void validate_config(const SimulationConfig& cfg);

}  // namespace lrvp
