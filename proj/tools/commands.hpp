#pragma once

// Subcommands of the regionkit executable. Each returns a process exit code
// and writes diagnostics to the given stream, so tests can call them directly.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "regionkit/errors.hpp"
#include "regionkit/region.hpp"

namespace regionkit::cli {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int unexpected = 1;
inline constexpr int invalid_parameters = 2;
inline constexpr int tangency_root_not_found = 3;
inline constexpr int event_not_reached = 4;
inline constexpr int condition_e1 = 5;
inline constexpr int condition_e2 = 6;
inline constexpr int self_intersecting = 7;
inline constexpr int no_convergence = 8;
inline constexpr int verification_failed = 9;
inline constexpr int io = 10;
inline constexpr int integration_failure = 11;
inline constexpr int usage = 64;
}  // namespace exit_code

int exit_code_for(ErrorCode code);

/// Text block for --help.
std::string exit_code_table();

struct RunConfig {
  double alpha = 1.5, nu = 0.1, e = 3.5, d = 4.0;
  double rel_tol = 1e-13;
  double abs_tol = 1e-12;
  double t_max_piece = 100.0;
  std::size_t samples_per_piece = 2000;
  std::filesystem::path output_dir = ".";
  double horizon = 200.0;
  double seed_x1 = 0.1, seed_x2 = 0.0;
  bool strict_conditions = false;

  Parameters parameters() const { return Parameters::make(alpha, nu, e, d); }
  ToleranceSettings tolerances() const;
  BuildOptions build_options() const;
};

/// Values given on the command line; unset fields fall through to the config
/// file, then to RunConfig's defaults.
struct Overrides {
  std::optional<double> alpha, nu, e, d, rel_tol, abs_tol, t_max_piece, horizon, seed_x1, seed_x2;
  std::optional<std::size_t> samples_per_piece;
  std::optional<std::filesystem::path> output_dir;
  std::optional<bool> strict_conditions;
};

/// Applies a JSON config object (keys: alpha nu e d rel_tol abs_tol t_max
/// samples out horizon seed_x1 seed_x2 strict_conditions) onto cfg. Unknown
/// keys are an error.
void apply_config_json(RunConfig& cfg, const nlohmann::json& j);

/// defaults <- config file <- flags.
RunConfig resolve_config(const std::optional<std::filesystem::path>& config_file,
                         const Overrides& flags);

int cmd_build(const RunConfig& cfg, std::ostream& log);

struct VerifyOptions {
  std::filesystem::path region_file;
  std::size_t boundary_points = 6;
};
int cmd_verify(const RunConfig& cfg, const VerifyOptions& opts, std::ostream& log);

/// Everything cmd_verify checks, on an in-memory region. `violations` sums
/// inward-flow violations, wrong-sign crossings, escapes, failed orbits and
/// polygon vertices that disagree with the pieces.
struct VerifySummary {
  std::size_t violations = 0;
  nlohmann::json report;
};
VerifySummary verify_region(const InvariantRegion& region, const RunConfig& cfg,
                            std::size_t boundary_points);

struct SimulateOptions {
  std::vector<State> points;
  std::size_t from_boundary = 0;  // extra starts sampled from the region boundary
  std::optional<std::filesystem::path> region_file;  // built from cfg when absent
};
int cmd_simulate(const RunConfig& cfg, const SimulateOptions& opts, std::ostream& log);

int cmd_limit_cycle(const RunConfig& cfg, std::ostream& log);

struct ScanGrid {
  std::vector<double> alpha, nu, e, d;  // empty axis = the template's value
  std::size_t threads = 0;              // 0 = sequential
};
/// "lo:hi:n" (n evenly spaced values) or a comma-separated list.
std::vector<double> parse_axis(const std::string& text);
/// Value of REGIONKIT_THREADS, 0 if unset or unparsable.
std::size_t threads_from_env();
int cmd_scan(const RunConfig& cfg, const ScanGrid& grid, std::ostream& log);

struct PlotOptions {
  std::filesystem::path region_file;
  std::vector<std::filesystem::path> trajectory_files;
  bool nullclines = true;
};
int cmd_plot(const RunConfig& cfg, const PlotOptions& opts, std::ostream& log);

/// Outcome label written in scan.csv: "ok" or the error's name.
std::string scan_outcome(const Parameters& p, const RunConfig& cfg, double* cycle_max_x1);

}  // namespace regionkit::cli
