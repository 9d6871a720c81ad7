#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lrvp/config.hpp"
#include "lrvp/diagnostics.hpp"

int main(int argc, char** argv) {
  CLI::App app{"conservative low-rank Vlasov-Poisson solver"};
  app.require_subcommand(1);

  auto* solve = app.add_subcommand("solve", "run a simulation from a config file");
  std::string config_path;
  std::vector<std::string> overrides;
  std::string outdir;
  bool compare = false;
  solve->add_option("config", config_path, "flat key=value config file")->required();
  solve->add_option("--override", overrides, "config override, key=value (repeatable)");
  solve->add_flag("--compare", compare,
                  "run conservative and plain truncation back-to-back");
  solve->add_option("--outdir", outdir, "output directory (overrides the config)");

  CLI11_PARSE(app, argc, argv);

  try {
    lrvp::SimulationConfig cfg = lrvp::parse_config_file(config_path);
    for (const std::string& o : overrides) lrvp::apply_override(cfg, o);
    if (!outdir.empty()) cfg.outdir = outdir;
    lrvp::validate_config(cfg);
    lrvp::run_simulation(cfg, compare);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
