#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ruelle/cli/commands.hpp"
#include "ruelle/cli/config.hpp"
#include "ruelle/error.hpp"

using namespace ruelle;
using namespace ruelle::cli;

int main(int argc, char** argv) {
  CLI::App app{"Transfer operators, pressure and dimension of conformal interval IFS"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_name = "example_paper";
  Overrides ov;
  Outputs io;
  std::string trace, plot_dir;
  std::vector<std::string> candidates;

  app.add_option("--config", config_name, "Bundled config name or path to a YAML file");
  app.add_option("--seed", ov.seed, "Random seed");
  app.add_option("--grid", ov.grid, "Grid size M");
  app.add_option("--truncate", ov.truncate, "Truncation N");
  app.add_option("--depth", ov.depth, "Cylinder depth n");
  app.add_option("--tol", ov.tol, "Dimension bracket tolerance");
  app.add_option("--workers", ov.workers, "Worker threads (0 = available parallelism)");
  app.add_option("--trace", trace, "Write the per-iteration CSV of the eigen run here");
  app.add_option("--emit-plot-data", plot_dir, "Directory for two-column plot data");

  auto* dim = app.add_subcommand("dim", "Hausdorff dimension: root of rho(T_a) = 1");
  auto* eigen = app.add_subcommand("eigen", "Perron eigenvalue, eigenfunction and eigenmeasure");
  eigen->add_option("--s", ov.eigen_s, "Exponent of the geometric potential");
  auto* pres = app.add_subcommand("pressure", "Pressure sweep as CSV");
  pres->add_option("--s-min", ov.s_min, "First exponent");
  pres->add_option("--s-max", ov.s_max, "Last exponent");
  pres->add_option("--steps", ov.steps, "Number of exponents");
  auto* osc = app.add_subcommand("osc", "Finite open set condition check");
  osc->add_option("--n", ov.osc_n, "Truncation level");
  osc->add_option("--candidate", candidates, "Open interval component 'lo,hi' (repeatable)");
  osc->add_flag("--suggest", ov.suggest, "Search for a passing candidate");
  auto* attr = app.add_subcommand("attractor", "Chaos-game sample, cylinder cover and box dimension");
  attr->add_option("--count", ov.count, "Number of points");
  attr->add_option("--word-length", ov.word_length, "Word length k");
  auto* list = app.add_subcommand("configs", "List bundled configs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_usage;
  }

  if (list->parsed()) {
    for (const auto& name : bundled_configs()) std::cout << name << '\n';
    return exit_ok;
  }

  RunConfig cfg;
  try {
    cfg = load_config(resolve_config(config_name));
    for (const std::string& c : candidates) {
      const auto comma = c.find(',');
      if (comma == std::string::npos) throw Error(ErrorCode::config, "--candidate expects 'lo,hi', got '" + c + "'");
      ov.candidate.push_back({parse_real(c.substr(0, comma)), parse_real(c.substr(comma + 1))});
    }
    apply_overrides(cfg, ov);
    validate(cfg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  }
  if (!trace.empty()) io.trace = trace;
  if (!plot_dir.empty()) io.plot_dir = plot_dir;

  if (dim->parsed()) return cmd_dim(cfg, io, std::cout, std::cerr);
  if (eigen->parsed()) return cmd_eigen(cfg, io, std::cout, std::cerr);
  if (pres->parsed()) return cmd_pressure(cfg, io, std::cout, std::cerr);
  if (osc->parsed()) return cmd_osc(cfg, io, std::cout, std::cerr);
  return cmd_attractor(cfg, io, std::cout, std::cerr);
}
