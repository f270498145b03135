#pragma once

// Run configuration, bit-exact snapshots, CSV output and the three commands
// behind the command-line tool.

#include <iosfwd>
#include <string>
#include <vector>

#include "fbns/diagnostics.hpp"
#include "fbns/error.hpp"
#include "fbns/picard.hpp"

namespace fbns {

/// Flat `key = value` configuration with dotted sections; `#` starts a
/// comment. Keys and defaults:
///   grid.n1, grid.n2, grid.n3      16, 16, 33
///   basis.m                        4
///   physics.mu, .lambda, .kappa, .R, .c_v, .gamma, .A_bar   1, 0, 1, 1, 1, 2, 1
///   density.profile                power (envelope * d^alpha) | uniform
///   density.alpha, density.amplitude, density.value          1, 0, 1
///   temperature.profile            distance (scale d) | sine (scale sin pi x3) | zero
///   temperature.scale              1
///   velocity.profile               zero | shear (amplitude sin 2 pi x1 x3^2 (1 - x3)^2, 0, 0) | linear (amplitude x3, 0, 0)
///   velocity.amplitude             0.1
///   data.bypass                    false (skip initial-data validation)
///   time.T, time.n_steps, time.scheme   0.005, 10, cn | be
///   picard.tol, picard.max_iter    1e-8, 20
///   output.directory, output.snapshot_stride   out, 0 (no snapshots)
///   study.n_steps, study.amplitude, study.decay, study.pairs, study.seed   10, 0.05, 2, 3, 0
///   study.horizons                 0.02, 0.01, 0.005
/// The envelope of the power profile is 1 + amplitude cos(2 pi x1) cos(2 pi x2).
struct RunConfig {
  int n1 = 16, n2 = 16, n3 = 33;
  int m = 4;
  PhysParams physics;
  std::string density = "power";
  double alpha = 1.0;
  double density_amplitude = 0.0;
  double density_value = 1.0;
  std::string temperature = "distance";
  double temperature_scale = 1.0;
  std::string velocity = "zero";
  double velocity_amplitude = 0.1;
  bool bypass = false;
  TimeGrid time{0.005, 10, Scheme::crank_nicolson};
  double tol = 1e-8;
  int max_iter = 20;
  std::string output_dir = "out";
  int snapshot_stride = 0;
  ContractionOptions study;
  std::vector<double> horizons{0.02, 0.01, 0.005};

  GridSpec grid() const { return make_grid(n1, n2, n3); }
};

/// ParseError naming the line for malformed lines, unknown keys and bad
/// values; ValidationError naming the violated invariant otherwise.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
void validate_config(const RunConfig& c);

/// Initial data of the configured profiles; validated unless data.bypass.
InitialData build_initial_data(const RunConfig& c);

/// Comma-separated list of reals. ParseError on a malformed entry.
std::vector<double> parse_list(const std::string& text);

struct SnapshotHeader {
  int version = 1;
  int n1 = 0, n2 = 0, n3 = 0;
  int components = 0;
  double time = 0.0;
  std::string name;
  std::size_t payload_bytes = 0;
};

struct Snapshot {
  SnapshotHeader header;
  Field field;
};

/// One header line, then little-endian binary64 values in (component, i3, i2,
/// i1) order.
void write_snapshot(const std::string& path, const Field& f, const std::string& name, double time);
/// FormatError on a malformed header, a length mismatch or a short payload.
Snapshot read_snapshot(const std::string& path);

/// %.17g, which round-trips binary64.
std::string format_real(double x);

/// Per-step monitors written to energy.csv.
struct StepMonitor {
  int step = 0;
  double time = 0.0;
  EnergyTerms E;
  DissipationTerms F_terms;
  double F = 0.0;
  double M0 = 0.0;
  double j_min = 0.0, j_max = 0.0;
  double piola_max = 0.0;
  /// NaN when the entropy is undefined (Theta or rho not positive).
  double entropy_band_min = 0.0, entropy_band_max = 0.0;
  double grad_n_theta_min = 0.0, grad_n_theta_max = 0.0;
};

/// E, F (with the derived initial data at step 0 when given), Jacobian and
/// Piola bounds, entropy band and boundary normal derivative at every step.
std::vector<StepMonitor> monitor_trajectory(const Trajectory& t, const InitialData& data, const PhysParams& p,
                                            const DerivedInitials* di);

void write_energy_csv(const std::string& path, const std::vector<StepMonitor>& rows);
void write_iteration_csv(const std::string& path, const IterationReport& r);
void write_contraction_csv(const std::string& path, const std::vector<ContractionRow>& rows);

/// Exit codes: 0 ok, 2 configuration, 3 non-contraction, 4 numerical failure.
enum ExitCode { kExitOk = 0, kExitConfig = 2, kExitNonContraction = 3, kExitNumerical = 4 };
int exit_code_for(const Error& e);

/// Runs the verification checks and writes verify.json to `out`. Nonzero on
/// any failed check; compatibility findings are warnings only.
int cmd_verify(const RunConfig& c, const std::string& out, std::ostream& log);
/// Fixed-point run writing energy.csv, iteration.csv, summary.json and the
/// snapshots.
int cmd_run(const RunConfig& c, const std::string& out, std::ostream& log);
/// Writes contraction.csv with columns (T, ratio).
int cmd_contraction_study(const RunConfig& c, const std::vector<double>& horizons, const std::string& out,
                          std::ostream& log);

}  // namespace fbns
