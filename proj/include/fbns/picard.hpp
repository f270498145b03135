#pragma once

// The solving operator Xi (freeze the input, solve the linear system for v
// then Theta, transport the flow map with the new v), the V_T distance, the
// fixed-point iteration and the contraction-versus-horizon study.

#include <optional>
#include <vector>

#include "fbns/linear_solver.hpp"
#include "fbns/operators.hpp"

namespace fbns {

/// States (eta, v, Theta) at every step of a time grid; eta is stored as its
/// displacement. `defm` caches the deformation of every step.
struct Trajectory {
  TimeGrid tg;
  std::vector<Field> xi, v, Theta;
  std::vector<Deformation> defm;

  int steps() const { return tg.n_steps; }
  StateSlice slice(int n) const;
  /// Backward differences of v and Theta at step n: first derivatives at
  /// order 2 when n >= 2 (order 1 at n = 1), second derivatives at order 2
  /// when n >= 3 (order 1 at n = 2). InsufficientHistory otherwise.
  Field v_t(int n) const;
  Field v_tt(int n) const;
  Field Theta_t(int n) const;
  Field Theta_tt(int n) const;
  Field J_t(int n) const;
};

/// Backward difference of a step series (derivative 1 or 2) at the highest
/// order (<= 2) the history allows.
Field backward_difference(const std::vector<Field>& s, const TimeGrid& tg, int n, int derivative);

/// Builds the flow map of v by RK4 on the cubic-in-time interpolant of the
/// series, starting from the identity, and caches the deformations.
Trajectory make_trajectory(const TimeGrid& tg, std::vector<Field> v, std::vector<Field> Theta);

/// v = u0, Theta = theta0 at every step and eta = x + t u0.
Trajectory initial_iterate(const InitialData& data, const TimeGrid& tg);

/// Throws AprioriViolated unless every step satisfies check_apriori.
void require_apriori(const Trajectory& t);

/// Xi(input). Step 0 of the output holds (Id, u0, theta0) exactly; later steps
/// hold the Galerkin solution.
Trajectory apply_Xi(const Trajectory& input, const InitialData& data, const PhysParams& p, const BasisSet& b);

/// sqrt(sup_n (|rho0^{1/2} dv|^2 + |rho0^{1/2} dTheta|^2) + trapezoid of
/// (|dv|_{H1}^2 + |dTheta|_{H1}^2)). GridMismatch unless the time grids agree.
double vt_distance(const Trajectory& t1, const Trajectory& t2, const Field& rho0);

struct AprioriRecord {
  int step = 0;
  AprioriCheck check;
};

struct IterationReport {
  std::vector<double> distances;
  std::vector<double> ratios;
  int iterations = 0;
  bool converged = false;
  /// Max over time-interior steps (n >= 2) of the interior max-norm of the
  /// pointwise momentum and temperature residuals, with second-order
  /// backward differences for v_t and Theta_t.
  double momentum_residual = 0.0;
  double temperature_residual = 0.0;
  /// Largest absolute defect of the weak identities of the trajectory
  /// against its own frozen coefficients, over the lowest basis modes as
  /// time-constant test functions.
  double weak_momentum_residual = 0.0;
  double weak_temperature_residual = 0.0;
  /// max_n |J_t - a^s_r v^r_{,s}| over time-interior steps, with J_t of the
  /// stored flow from Richardson-extrapolated sub-step differences.
  double kinematic_residual = 0.0;
  std::vector<AprioriRecord> apriori;
};

struct FixedPointResult {
  Trajectory solution;
  IterationReport report;
};

/// Picard iteration from initial_iterate until vt_distance <= tol. Throws
/// NonContraction after two consecutive ratios >= 1 or when an iterate
/// leaves the a priori ball, and MaxIterExceeded after max_iter applications
/// of Xi.
FixedPointResult iterate_to_fixed_point(const InitialData& data, const PhysParams& p, const BasisSet& b,
                                        const TimeGrid& tg, double tol, int max_iter);

/// Residual diagnostics of a trajectory (fills the residual fields and the a
/// priori records of a report).
void measure_residuals(const Trajectory& t, const InitialData& data, const PhysParams& p, const BasisSet& b,
                       IterationReport& r);

struct ContractionOptions {
  int n_steps = 10;
  Scheme scheme = Scheme::crank_nicolson;
  unsigned seed = 0;
  double amplitude = 0.05;
  /// Basis coefficients of the perturbations are scaled by
  /// (1 + k1^2 + k2^2 + n^2)^-decay for Fourier wavenumbers k and x3 index n.
  double decay = 2.0;
  int pairs = 3;
};

struct ContractionRow {
  double T = 0.0;
  /// Mean of dist(Xi x1, Xi x2) / dist(x1, x2) over the pairs; empty when
  /// every pair coincides.
  std::optional<double> ratio;
  double input_distance = 0.0;
  double output_distance = 0.0;
};

/// For each horizon, perturbs initial_iterate by seeded random fields from
/// the basis spans (so Theta perturbations vanish on the faces) ramped in as
/// t / T, applies Xi once to each member of every pair and records the mean
/// distance ratio. Horizons must be positive and sorted.
std::vector<ContractionRow> contraction_study(const InitialData& data, const PhysParams& p, const BasisSet& b,
                                              const std::vector<double>& horizons, const ContractionOptions& opt = {});

}  // namespace fbns
