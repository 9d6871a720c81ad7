#include "lrvp/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace lrvp {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (...) {
    throw std::invalid_argument("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const int i = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (...) {
    throw std::invalid_argument("config key '" + key + "': expected an integer, got '" + v +
                                "'");
  }
}

}  // namespace

double SimulationConfig::x_length() const {
  return lx > 0.0 ? lx : 2.0 * std::numbers::pi / k;
}

SimulationConfig preset_config(const std::string& name) {
  SimulationConfig c;
  c.preset = name;
  if (name == "weak_landau_1d") {
    c.dim = 1;
    c.alpha = 0.01;
    c.k = 0.5;
    c.lv = 6.0;
    c.eps = 1e-5;
    c.nx = 64;
    c.nv = 128;
    c.sigma = 1.0;
    c.t_end = 40.0;
    c.momentum_report = MomentumReport::absolute;
  } else if (name == "strong_landau_1d") {
    c.dim = 1;
    c.alpha = 0.5;
    c.k = 0.5;
    c.lv = 6.0;
    c.eps = 1e-3;
    c.nx = 64;
    c.nv = 128;
    c.sigma = 1.0;
    c.t_end = 40.0;
    c.momentum_report = MomentumReport::absolute;
  } else if (name == "bump_on_tail") {
    c.dim = 1;
    c.alpha = 0.04;
    c.k = 0.3;
    c.lv = 8.0;
    c.eps = 1e-4;
    c.nx = 64;
    c.nv = 128;
    c.np = 9.0 / (10.0 * std::sqrt(2.0 * std::numbers::pi));
    c.nb = 2.0 / (10.0 * std::sqrt(2.0 * std::numbers::pi));
    c.u = 4.5;
    c.vt = 0.5;
    // weight w(v) = exp(-v^2/3) -> 2*sigma^2 = 3
    c.sigma = std::sqrt(1.5);
    c.t_end = 40.0;
    c.momentum_report = MomentumReport::relative;
  } else if (name == "weak_landau_2d") {
    c.dim = 2;
    c.alpha = 0.01;
    c.k = 0.5;
    c.lv = 6.0;
    c.eps = 1e-5;
    c.nx = 32;
    c.nv = 64;
    c.sigma = 1.0;
    c.t_end = 20.0;
    c.momentum_report = MomentumReport::absolute;
  } else if (name == "two_stream_2d") {
    c.dim = 2;
    c.alpha = 0.001;
    c.v0 = 2.4;
    c.k = 0.2;
    c.lv = 8.0;
    c.eps = 1e-5;
    c.nx = 32;
    c.nv = 64;
    c.sigma = 1.0;
    c.t_end = 30.0;
    c.momentum_report = MomentumReport::absolute;
  } else if (name == "custom") {
    // caller fills everything in
  } else {
    throw std::invalid_argument("unknown preset '" + name + "'");
  }
  return c;
}

void apply_override(SimulationConfig& c, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw std::invalid_argument("override '" + assignment + "': expected key=value");
  const std::string key = trim(assignment.substr(0, eq));
  const std::string val = trim(assignment.substr(eq + 1));

  if (key == "preset") {
    c = preset_config(val);
  } else if (key == "dim") {
    c.dim = to_int(key, val);
  } else if (key == "nx") {
    c.nx = to_int(key, val);
  } else if (key == "nv") {
    c.nv = to_int(key, val);
  } else if (key == "lx") {
    c.lx = to_double(key, val);
  } else if (key == "lv") {
    c.lv = to_double(key, val);
  } else if (key == "alpha") {
    c.alpha = to_double(key, val);
  } else if (key == "k") {
    c.k = to_double(key, val);
  } else if (key == "v0") {
    c.v0 = to_double(key, val);
  } else if (key == "np") {
    c.np = to_double(key, val);
  } else if (key == "nb") {
    c.nb = to_double(key, val);
  } else if (key == "u") {
    c.u = to_double(key, val);
  } else if (key == "vt") {
    c.vt = to_double(key, val);
  } else if (key == "eps") {
    c.eps = to_double(key, val);
  } else if (key == "mode") {
    if (val == "conservative")
      c.mode = TruncationMode::conservative;
    else if (val == "plain")
      c.mode = TruncationMode::plain;
    else
      throw std::invalid_argument("config key 'mode': expected conservative|plain, got '" +
                                  val + "'");
  } else if (key == "level") {
    c.level = to_int(key, val);
  } else if (key == "sigma") {
    c.sigma = to_double(key, val);
  } else if (key == "min_weight") {
    c.min_weight = to_double(key, val);
  } else if (key == "rank_ceiling") {
    c.rank_ceiling = to_int(key, val);
  } else if (key == "cfl") {
    c.cfl = to_double(key, val);
  } else if (key == "e_bound") {
    c.e_bound = to_double(key, val);
  } else if (key == "t_end") {
    c.t_end = to_double(key, val);
  } else if (key == "diag_every") {
    c.diag_every = to_int(key, val);
  } else if (key == "outdir") {
    c.outdir = val;
  } else if (key == "momentum_report") {
    if (val == "absolute")
      c.momentum_report = MomentumReport::absolute;
    else if (val == "relative")
      c.momentum_report = MomentumReport::relative;
    else
      throw std::invalid_argument(
          "config key 'momentum_report': expected absolute|relative, got '" + val + "'");
  } else if (key == "snapshot_times") {
    c.snapshot_times.clear();
    std::stringstream ss(val);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (!item.empty()) c.snapshot_times.push_back(to_double(key, item));
    }
  } else {
    throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

SimulationConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file '" + path + "'");
  SimulationConfig c;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line '" + line + "': expected key = value");
    const std::string key = trim(line.substr(0, eq));
    // preset must be applied first so later keys override its defaults
    if (first && key != "preset") c = preset_config("custom");
    if (key == "preset" && !first)
      throw std::invalid_argument("config key 'preset' must come first");
    apply_override(c, line);
    first = false;
  }
  validate_config(c);
  return c;
}

void validate_config(const SimulationConfig& c) {
  auto positive = [](const char* key, double v) {
    if (!(v > 0.0))
      throw std::invalid_argument(std::string("config key '") + key + "' must be positive");
  };
  if (c.dim != 1 && c.dim != 2)
    throw std::invalid_argument("config key 'dim' must be 1 or 2");
  if (c.nx < 8) throw std::invalid_argument("config key 'nx' must be >= 8");
  if (c.nv < 8) throw std::invalid_argument("config key 'nv' must be >= 8");
  positive("lv", c.lv);
  positive("k", c.k);
  positive("eps", c.eps);
  positive("sigma", c.sigma);
  positive("cfl", c.cfl);
  positive("e_bound", c.e_bound);
  if (c.t_end < 0.0) throw std::invalid_argument("config key 't_end' must be >= 0");
  if (c.level < 1 || c.level > 3)
    throw std::invalid_argument("config key 'level' must be 1..3");
  if (c.rank_ceiling < 1)
    throw std::invalid_argument("config key 'rank_ceiling' must be >= 1");
  if (c.diag_every < 1) throw std::invalid_argument("config key 'diag_every' must be >= 1");
}

std::string serialize_config(const SimulationConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "preset = " << c.preset << "\n";
  os << "dim = " << c.dim << "\n";
  os << "nx = " << c.nx << "\n";
  os << "nv = " << c.nv << "\n";
  os << "lx = " << c.lx << "\n";
  os << "lv = " << c.lv << "\n";
  os << "alpha = " << c.alpha << "\n";
  os << "k = " << c.k << "\n";
  os << "v0 = " << c.v0 << "\n";
  os << "np = " << c.np << "\n";
  os << "nb = " << c.nb << "\n";
  os << "u = " << c.u << "\n";
  os << "vt = " << c.vt << "\n";
  os << "eps = " << c.eps << "\n";
  os << "mode = " << (c.mode == TruncationMode::conservative ? "conservative" : "plain")
     << "\n";
  os << "level = " << c.level << "\n";
  os << "sigma = " << c.sigma << "\n";
  os << "min_weight = " << c.min_weight << "\n";
  os << "rank_ceiling = " << c.rank_ceiling << "\n";
  os << "cfl = " << c.cfl << "\n";
  os << "e_bound = " << c.e_bound << "\n";
  os << "t_end = " << c.t_end << "\n";
  os << "diag_every = " << c.diag_every << "\n";
  os << "outdir = " << c.outdir << "\n";
  os << "momentum_report = "
     << (c.momentum_report == MomentumReport::absolute ? "absolute" : "relative") << "\n";
  if (!c.snapshot_times.empty()) {
    os << "snapshot_times = ";
    for (std::size_t i = 0; i < c.snapshot_times.size(); ++i) {
      if (i) os << ",";
      os << c.snapshot_times[i];
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace lrvp
