#include "commands.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "regionkit/io.hpp"
#include "regionkit/svg.hpp"
#include "regionkit/verifier.hpp"

namespace regionkit::cli {

using nlohmann::json;
namespace fs = std::filesystem;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParameters: return exit_code::invalid_parameters;
    case ErrorCode::InvalidArgument: return exit_code::usage;
    case ErrorCode::TangencyRootNotFound: return exit_code::tangency_root_not_found;
    case ErrorCode::EventNotReached: return exit_code::event_not_reached;
    case ErrorCode::ConditionE1Violated: return exit_code::condition_e1;
    case ErrorCode::ConditionE2Violated: return exit_code::condition_e2;
    case ErrorCode::SelfIntersectingBoundary: return exit_code::self_intersecting;
    case ErrorCode::NoConvergence:
    case ErrorCode::SectionNeverHit: return exit_code::no_convergence;
    case ErrorCode::Io: return exit_code::io;
    case ErrorCode::NonFiniteState:
    case ErrorCode::StepSizeUnderflow: return exit_code::integration_failure;
    case ErrorCode::AsymptoteAbscissa:
    case ErrorCode::DomainError:
    case ErrorCode::OutsideLoop: return exit_code::unexpected;
  }
  return exit_code::unexpected;
}

std::string exit_code_table() {
  return "Exit codes:\n"
         "   0  success\n"
         "   1  unexpected internal error\n"
         "   2  InvalidParameters (need alpha > 0, 0 < nu < e < d <= 2e)\n"
         "   3  TangencyRootNotFound\n"
         "   4  EventNotReached (an auxiliary orbit missed its guard)\n"
         "   5  ConditionE1Violated\n"
         "   6  ConditionE2Violated\n"
         "   7  SelfIntersectingBoundary\n"
         "   8  NoConvergence (limit cycle search)\n"
         "   9  verification found violations\n"
         "  10  I/O error (missing or malformed file)\n"
         "  11  integration failure\n"
         "  64  usage error\n";
}

ToleranceSettings RunConfig::tolerances() const {
  ToleranceSettings tol;
  tol.relative = rel_tol;
  tol.absolute = abs_tol;
  return tol;
}

BuildOptions RunConfig::build_options() const {
  BuildOptions opts;
  opts.tolerances = tolerances();
  opts.t_max_piece = t_max_piece;
  opts.points_per_piece = samples_per_piece;
  opts.strict_conditions = strict_conditions;
  return opts;
}

void apply_config_json(RunConfig& cfg, const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::Io, "config file must hold a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "alpha") cfg.alpha = value.get<double>();
      else if (key == "nu") cfg.nu = value.get<double>();
      else if (key == "e") cfg.e = value.get<double>();
      else if (key == "d") cfg.d = value.get<double>();
      else if (key == "rel_tol") cfg.rel_tol = value.get<double>();
      else if (key == "abs_tol") cfg.abs_tol = value.get<double>();
      else if (key == "t_max") cfg.t_max_piece = value.get<double>();
      else if (key == "samples") cfg.samples_per_piece = value.get<std::size_t>();
      else if (key == "out") cfg.output_dir = value.get<std::string>();
      else if (key == "horizon") cfg.horizon = value.get<double>();
      else if (key == "seed_x1") cfg.seed_x1 = value.get<double>();
      else if (key == "seed_x2") cfg.seed_x2 = value.get<double>();
      else if (key == "strict_conditions") cfg.strict_conditions = value.get<bool>();
      else throw Error(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
    }
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::Io, std::string("bad config value: ") + ex.what());
  }
}

RunConfig resolve_config(const std::optional<fs::path>& config_file, const Overrides& flags) {
  RunConfig cfg;
  if (config_file) apply_config_json(cfg, io::read_json(config_file->string()));
  auto take = [](auto& field, const auto& flag) {
    if (flag) field = *flag;
  };
  take(cfg.alpha, flags.alpha);
  take(cfg.nu, flags.nu);
  take(cfg.e, flags.e);
  take(cfg.d, flags.d);
  take(cfg.rel_tol, flags.rel_tol);
  take(cfg.abs_tol, flags.abs_tol);
  take(cfg.t_max_piece, flags.t_max_piece);
  take(cfg.horizon, flags.horizon);
  take(cfg.seed_x1, flags.seed_x1);
  take(cfg.seed_x2, flags.seed_x2);
  take(cfg.samples_per_piece, flags.samples_per_piece);
  take(cfg.output_dir, flags.output_dir);
  take(cfg.strict_conditions, flags.strict_conditions);
  if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0))
    throw Error(ErrorCode::InvalidArgument, "tolerances must be positive");
  if (!(cfg.t_max_piece > 0.0) || !(cfg.horizon > 0.0))
    throw Error(ErrorCode::InvalidArgument, "--t-max and --horizon must be positive");
  if (cfg.samples_per_piece < 2) throw Error(ErrorCode::InvalidArgument, "--samples must be >= 2");
  return cfg;
}

namespace {

fs::path output_path(const RunConfig& cfg, const std::string& name) {
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + cfg.output_dir.string() + ": " + ec.message());
  return cfg.output_dir / name;
}

// Runs body, mapping library errors to exit codes.
template <class Body>
int guarded(std::ostream& log, Body&& body) {
  try {
    return body();
  } catch (const Error& err) {
    log << "error: " << err.what() << "\n";
    return exit_code_for(err.code());
  } catch (const std::exception& ex) {
    log << "error: " << ex.what() << "\n";
    return exit_code::unexpected;
  }
}

}  // namespace

int cmd_build(const RunConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    const Parameters p = cfg.parameters();
    const InvariantRegion region = build_region(p, cfg.build_options());
    io::write_json(output_path(cfg, "region.json").string(), io::to_json(region));
    io::write_text(output_path(cfg, "region.csv").string(), io::polygon_csv(region.polygon));
    log << "region: " << region.pieces.size() << " pieces ("
        << (region.case_eight_pieces ? "eight-piece" : "seven-piece") << " case), "
        << region.polygon.size() << " polygon vertices\n";
    for (const auto& [name, s] : region.vertices.named())
      log << "  " << name << " = " << detail::describe(s) << "\n";
    if (!region.conditions.condition1())
      log << "warning: E lies right of x1 = -nu; the region may admit outward flow near F\n";
    return exit_code::ok;
  });
}

VerifySummary verify_region(const InvariantRegion& region, const RunConfig& cfg,
                            std::size_t boundary_points) {
  const Parameters& p = region.params;
  VerifySummary out;

  // The stored polygon must be the concatenation of the pieces.
  const Polyline expected = assemble_ring(region.pieces);
  std::size_t mismatched = expected.size() > region.polygon.size()
                               ? expected.size() - region.polygon.size()
                               : region.polygon.size() - expected.size();
  for (std::size_t i = 0; i < std::min(expected.size(), region.polygon.size()); ++i)
    if (distance(expected[i], region.polygon[i]) > 1e-9 * std::max(1.0, norm(expected[i]))) ++mismatched;
  const bool simple = !find_self_intersection(region.polygon).has_value();

  const InvarianceReport flow = check_inward_flow(region, p, cfg.samples_per_piece);
  const auto crossings = check_all_crossings(region, p, cfg.samples_per_piece);
  const auto starts = boundary_start_points(region, boundary_points);
  const ContainmentReport containment =
      check_containment_by_simulation(region, p, starts, cfg.horizon, cfg.tolerances());

  std::size_t wrong_sign = 0;
  json jcross = json::array();
  for (const auto& c : crossings) {
    wrong_sign += c.wrong_sign;
    jcross.push_back(io::to_json(c));
  }
  json escapes = json::array();
  for (const auto& esc : containment.escapes)
    escapes.push_back({{"orbit", esc.orbit}, {"t", esc.t}, {"at", io::to_json(esc.at)}});
  json jstarts = json::array();
  for (State s : containment.starts) jstarts.push_back(io::to_json(s));

  out.violations = flow.violations.size() + wrong_sign + containment.escapes.size() +
                   containment.failures.size() + mismatched + (simple ? 0 : 1);
  out.report = {{"params", io::to_json(p)},
                {"samples_per_piece", cfg.samples_per_piece},
                {"polygon", {{"vertices", region.polygon.size()}, {"mismatched_vertices", mismatched}, {"simple", simple}}},
                {"invariance", io::to_json(flow)},
                {"crossings", jcross},
                {"containment",
                 {{"horizon", cfg.horizon},
                  {"starts", jstarts},
                  {"escapes", escapes},
                  {"failures", containment.failures}}},
                {"violation_count", out.violations},
                {"ok", out.violations == 0}};
  return out;
}

int cmd_verify(const RunConfig& cfg, const VerifyOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    const InvariantRegion region = io::read_region(opts.region_file.string());
    const VerifySummary summary = verify_region(region, cfg, opts.boundary_points);
    io::write_json(output_path(cfg, "verify.json").string(), summary.report);
    const auto& flow = summary.report["invariance"];
    log << "inward flow: " << flow["violations"].size() << " violations in " << flow["samples_checked"]
        << " samples (max f.n_out " << flow["max_outward_component"] << ")\n"
        << "containment: " << summary.report["containment"]["escapes"].size() << " escapes of "
        << opts.boundary_points << " orbits\n"
        << "total violations: " << summary.violations << "\n";
    return summary.violations == 0 ? exit_code::ok : exit_code::verification_failed;
  });
}

int cmd_simulate(const RunConfig& cfg, const SimulateOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    const Parameters p = cfg.parameters();
    std::vector<State> starts = opts.points;
    std::optional<InvariantRegion> region;
    if (opts.region_file) region = io::read_region(opts.region_file->string());
    else if (opts.from_boundary > 0) region = build_region(p, cfg.build_options());
    std::optional<PolygonIndex> index;
    if (region) index.emplace(region->polygon, 1e-9);
    if (opts.from_boundary > 0)
      for (State s : boundary_start_points(*region, opts.from_boundary))
        starts.push_back(nudge_inward(region->polygon, s, 1e-6));

    std::size_t failed = 0;
    for (std::size_t k = 0; k < starts.size(); ++k) {
      const State s0 = starts[k];
      if (!is_finite(s0)) {
        log << "orbit " << k << ": initial point is not finite, skipped\n";
        ++failed;
        continue;
      }
      auto run = integrate_partial(MainField{p}, s0, {0.0, cfg.horizon}, cfg.tolerances(), {}, "main");
      io::write_text(output_path(cfg, "orbit_" + std::to_string(k) + ".csv").string(),
                     io::trajectory_csv(run.trajectory));
      const State end = run.trajectory.back().state;
      log << "orbit " << k << ": " << detail::describe(s0) << " -> " << detail::describe(end) << " at t = "
          << run.trajectory.end_time();
      if (run.status != IntegrationStatus::Completed) {
        log << " (integration stopped early)";
        ++failed;
      }
      if (index) {
        bool left = false;
        for (const auto& sample : run.trajectory.samples())
          if (index->locate(sample.state) == Location::Outside) left = true;
        const bool inside_now = index->locate(end) != Location::Outside;
        log << (inside_now ? ", ends inside" : ", ends outside") << (left ? " (was outside at some step)" : "");
      }
      log << "\n";
    }
    return failed == 0 ? exit_code::ok : exit_code::integration_failure;
  });
}

int cmd_limit_cycle(const RunConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    const Parameters p = cfg.parameters();
    const InvariantRegion region = build_region(p, cfg.build_options());
    LimitCycleSettings settings;
    settings.integration = cfg.tolerances();
    const PeriodicOrbit orbit = find_limit_cycle(p, {cfg.seed_x1, cfg.seed_x2}, settings);
    const PolygonIndex index(region.polygon, 1e-9);
    bool inside = true;
    for (State s : orbit.polyline)
      if (index.locate(s) != Location::Inside) inside = false;
    json j = io::to_json(orbit);
    j["params"] = io::to_json(p);
    j["seed"] = io::to_json(State{cfg.seed_x1, cfg.seed_x2});
    j["inside_region"] = inside;
    io::write_json(output_path(cfg, "cycle.json").string(), j);
    log << "period " << detail::describe(orbit.period) << ", section point "
        << detail::describe(orbit.section_point) << " after " << orbit.returns_used << " returns, "
        << (inside ? "inside" : "NOT inside") << " the region\n";
    return exit_code::ok;
  });
}

std::vector<double> parse_axis(const std::string& text) {
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "bad grid value '" + s + "' in '" + text + "'");
    }
  };
  std::vector<std::string> parts;
  const char sep = text.find(':') != std::string::npos ? ':' : ',';
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, sep);) parts.push_back(part);
  std::vector<double> out;
  if (sep == ':') {
    if (parts.size() != 3) throw Error(ErrorCode::InvalidArgument, "range must be lo:hi:n, got '" + text + "'");
    const double lo = number(parts[0]), hi = number(parts[1]), n = number(parts[2]);
    if (!(n >= 1) || n != std::floor(n)) throw Error(ErrorCode::InvalidArgument, "bad count in '" + text + "'");
    const auto count = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i < count; ++i)
      out.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
  } else {
    for (const auto& part : parts) out.push_back(number(part));
  }
  for (double v : out)
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "grid values must be finite");
  return out;
}

std::size_t threads_from_env() {
  const char* raw = std::getenv("REGIONKIT_THREADS");
  if (!raw) return 0;
  char* end = nullptr;
  const long v = std::strtol(raw, &end, 10);
  return (end != raw && *end == '\0' && v > 0) ? static_cast<std::size_t>(v) : 0;
}

std::string scan_outcome(const Parameters& p, const RunConfig& cfg, double* cycle_max_x1) {
  try {
    build_region(p, cfg.build_options());
    LimitCycleSettings settings;
    settings.integration = cfg.tolerances();
    const PeriodicOrbit orbit = find_limit_cycle(p, {cfg.seed_x1, cfg.seed_x2}, settings);
    if (cycle_max_x1) *cycle_max_x1 = orbit.section_point.x1;
    return "ok";
  } catch (const Error& err) {
    return std::string(to_string(err.code()));
  } catch (const std::exception&) {
    return "Unexpected";
  }
}

int cmd_scan(const RunConfig& cfg, const ScanGrid& grid, std::ostream& log) {
  return guarded(log, [&] {
    auto axis = [](const std::vector<double>& v, double fallback) {
      return v.empty() ? std::vector<double>{fallback} : v;
    };
    const auto as = axis(grid.alpha, cfg.alpha), ns = axis(grid.nu, cfg.nu);
    const auto es = axis(grid.e, cfg.e), ds = axis(grid.d, cfg.d);
    struct Row {
      double alpha, nu, e, d;
      std::string outcome;
      double cycle = std::nan("");
    };
    std::vector<Row> rows;
    for (double a : as)
      for (double n : ns)
        for (double e : es)
          for (double d : ds) rows.push_back({a, n, e, d, {}});

    auto evaluate = [&](Row& row) {
      try {
        row.outcome = scan_outcome(Parameters::make(row.alpha, row.nu, row.e, row.d), cfg, &row.cycle);
      } catch (const Error& err) {
        row.outcome = std::string(to_string(err.code()));
      }
    };
    const std::size_t threads = std::min(grid.threads, rows.size());
    if (threads <= 1) {
      for (auto& row : rows) evaluate(row);
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::thread> pool;
      for (std::size_t t = 0; t < threads; ++t)
        pool.emplace_back([&] {
          for (std::size_t i; (i = next.fetch_add(1)) < rows.size();) evaluate(rows[i]);
        });
      for (auto& th : pool) th.join();
    }

    std::string csv = "alpha,nu,e,d,outcome,cycle_max_x1\n";
    std::map<std::string, std::size_t> tally;
    for (const auto& r : rows) {
      csv += io::decimal(r.alpha) + "," + io::decimal(r.nu) + "," + io::decimal(r.e) + "," + io::decimal(r.d) +
             "," + r.outcome + "," + (std::isfinite(r.cycle) ? io::decimal(r.cycle) : std::string()) + "\n";
      ++tally[r.outcome];
    }
    io::write_text(output_path(cfg, "scan.csv").string(), csv);
    log << rows.size() << " rows:";
    for (const auto& [name, count] : tally) log << " " << name << "=" << count;
    log << "\n";
    return exit_code::ok;
  });
}

int cmd_plot(const RunConfig& cfg, const PlotOptions& opts, std::ostream& log) {
  return guarded(log, [&] {
    const InvariantRegion region = io::read_region(opts.region_file.string());
    svg::PlotInput input;
    input.region = &region;
    input.nullclines = opts.nullclines;
    for (const auto& file : opts.trajectory_files) input.trajectories.push_back(io::read_xy_csv(file.string()));
    const fs::path out = output_path(cfg, "plot.svg");
    io::write_text(out.string(), svg::phase_portrait(input));
    log << "wrote " << out.string() << " (" << input.trajectories.size() << " trajectories)\n";
    return exit_code::ok;
  });
}

}  // namespace regionkit::cli
