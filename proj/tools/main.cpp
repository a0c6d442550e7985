#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace regionkit;
using namespace regionkit::cli;

namespace {

struct CommonFlags {
  double alpha = 0, nu = 0, e = 0, d = 0, rel_tol = 0, abs_tol = 0, t_max = 0, horizon = 0, seed_x1 = 0,
         seed_x2 = 0;
  std::size_t samples = 0;
  std::string out, config;
  bool strict = false;
  std::map<std::string, CLI::Option*> opts;

  void attach(CLI::App* app) {
    opts["alpha"] = app->add_option("--alpha", alpha, "damping gain (> 0)");
    opts["nu"] = app->add_option("--nu", nu, "damping threshold, 0 < nu < e");
    opts["e"] = app->add_option("--e", e, "saddle abscissa is -e");
    opts["d"] = app->add_option("--d", d, "stable node abscissa is -d, e < d <= 2e");
    opts["rel_tol"] = app->add_option("--rel-tol", rel_tol, "relative integration tolerance (1e-13)");
    opts["abs_tol"] = app->add_option("--abs-tol", abs_tol, "absolute integration tolerance (1e-12)");
    opts["t_max"] = app->add_option("--t-max", t_max, "time cap for each boundary orbit (100)");
    opts["samples"] = app->add_option("--samples", samples, "points per boundary piece (2000)");
    opts["horizon"] = app->add_option("--horizon", horizon, "simulation horizon (200)");
    opts["seed_x1"] = app->add_option("--seed-x1", seed_x1, "limit cycle seed x1 (0.1)");
    opts["seed_x2"] = app->add_option("--seed-x2", seed_x2, "limit cycle seed x2 (0)");
    opts["out"] = app->add_option("--out", out, "output directory (.)");
    opts["config"] = app->add_option("--config", config, "JSON config file; flags override it");
    opts["strict"] = app->add_flag("--strict-conditions", strict,
                                   "fail the build with ConditionE1Violated when E lies right of -nu");
  }

  bool given(const std::string& name) const { return opts.at(name)->count() > 0; }

  RunConfig resolve() const {
    Overrides o;
    auto pick = [&](const char* name, auto& slot, auto value) {
      if (given(name)) slot = value;
    };
    pick("alpha", o.alpha, alpha);
    pick("nu", o.nu, nu);
    pick("e", o.e, e);
    pick("d", o.d, d);
    pick("rel_tol", o.rel_tol, rel_tol);
    pick("abs_tol", o.abs_tol, abs_tol);
    pick("t_max", o.t_max_piece, t_max);
    pick("samples", o.samples_per_piece, samples);
    pick("horizon", o.horizon, horizon);
    pick("seed_x1", o.seed_x1, seed_x1);
    pick("seed_x2", o.seed_x2, seed_x2);
    if (given("out")) o.output_dir = std::filesystem::path(out);
    if (given("strict")) o.strict_conditions = strict;
    std::optional<std::filesystem::path> file;
    if (given("config")) file = config;
    return resolve_config(file, o);
  }
};

State parse_point(const std::string& text) {
  std::stringstream ss(text);
  std::string a, b;
  if (std::getline(ss, a, ',') && std::getline(ss, b) && !a.empty() && !b.empty()) {
    try {
      return {std::stod(a), std::stod(b)};
    } catch (const std::exception&) {
    }
  }
  throw Error(ErrorCode::InvalidArgument, "bad point '" + text + "', expected x1,x2");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"regionkit: invariant region construction and verification for a damped planar oscillator"};
  app.footer(exit_code_table());
  app.require_subcommand(1);

  auto* build = app.add_subcommand("build", "construct the region; writes region.json and region.csv");
  auto* verify = app.add_subcommand("verify", "check a region file; writes verify.json");
  auto* simulate = app.add_subcommand("simulate", "integrate orbits; writes orbit_<k>.csv");
  auto* cycle = app.add_subcommand("limit-cycle", "locate the periodic orbit; writes cycle.json");
  auto* scan = app.add_subcommand("scan", "build over a parameter grid; writes scan.csv");
  auto* plot = app.add_subcommand("plot", "phase portrait of a region and orbits; writes plot.svg");

  std::map<CLI::App*, CommonFlags> flags;
  for (auto* sub : {build, verify, simulate, cycle, scan, plot}) flags[sub].attach(sub);

  std::string region_file;
  std::size_t boundary_points = 6;
  verify->add_option("--region", region_file, "region file (region.json)")->required();
  verify->add_option("--boundary-points", boundary_points, "containment orbits started on the boundary (6)");

  std::vector<std::string> points;
  std::size_t from_boundary = 0;
  std::string sim_region;
  simulate->add_option("--point", points, "initial point x1,x2 (repeatable)");
  simulate->add_option("--from-boundary", from_boundary, "add N starts 1e-6 inside the region boundary");
  simulate->add_option("--region", sim_region, "region file for boundary starts (built from the flags if absent)");

  std::string grid_alpha, grid_nu, grid_e, grid_d;
  scan->add_option("--grid-alpha", grid_alpha, "alpha values: lo:hi:n or a,b,c");
  scan->add_option("--grid-nu", grid_nu, "nu values");
  scan->add_option("--grid-e", grid_e, "e values");
  scan->add_option("--grid-d", grid_d, "d values");

  std::string plot_region;
  std::vector<std::string> trajectories;
  bool no_nullclines = false;
  plot->add_option("--region", plot_region, "region file")->required();
  plot->add_option("--trajectory", trajectories, "orbit CSV with x1,x2 columns (repeatable)");
  plot->add_flag("--no-nullclines", no_nullclines, "omit nullclines and asymptotes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? 0 : exit_code::usage;
  }

  CLI::App* chosen = app.get_subcommands().front();
  RunConfig cfg;
  try {
    cfg = flags.at(chosen).resolve();
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return err.code() == ErrorCode::Io ? exit_code::io : exit_code::usage;
  }

  try {
    if (chosen == build) return cmd_build(cfg, std::cerr);
    if (chosen == verify) return cmd_verify(cfg, {region_file, boundary_points}, std::cerr);
    if (chosen == simulate) {
      SimulateOptions opts;
      for (const auto& p : points) opts.points.push_back(parse_point(p));
      opts.from_boundary = from_boundary;
      if (!sim_region.empty()) opts.region_file = sim_region;
      return cmd_simulate(cfg, opts, std::cerr);
    }
    if (chosen == cycle) return cmd_limit_cycle(cfg, std::cerr);
    if (chosen == scan) {
      ScanGrid grid;
      if (!grid_alpha.empty()) grid.alpha = parse_axis(grid_alpha);
      if (!grid_nu.empty()) grid.nu = parse_axis(grid_nu);
      if (!grid_e.empty()) grid.e = parse_axis(grid_e);
      if (!grid_d.empty()) grid.d = parse_axis(grid_d);
      grid.threads = threads_from_env();
      return cmd_scan(cfg, grid, std::cerr);
    }
    PlotOptions opts{plot_region, {}, !no_nullclines};
    for (const auto& t : trajectories) opts.trajectory_files.push_back(t);
    return cmd_plot(cfg, opts, std::cerr);
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return exit_code_for(err.code());
  }
}
