#pragma once

// Reusable verification studies: Piola and cofactor identities on random
// flow maps, the kinematic rate identity, heat-mode decay, manufactured
// solutions for both linear solves, and the inequality ratio sweeps.

#include <vector>

#include "fbns/diagnostics.hpp"
#include "fbns/linear_solver.hpp"

namespace fbns {

struct PiolaStudy {
  int maps = 0;
  double piola_max = 0.0;
  /// max |a - cofactor of the closed-form gradient|.
  double cofactor_max = 0.0;
  double seconds = 0.0;
};

/// eta = x + xi with xi a seeded SmoothRandomField scaled so that the largest
/// entry of D xi sampled on the grid equals `amplitude`.
PiolaStudy piola_study(const GridSpec& g, int maps, double amplitude, unsigned seed);

/// max |J_t - a^s_r v^r_{,s}| along the RK4 flow of the seeded velocity
/// v(x, t) = (1 + t) V(x), with J_t from Richardson-extrapolated central
/// differences of J over sub-steps h and h/2.
double kinematic_study(const GridSpec& g, double T, int steps, unsigned seed, double amplitude = 0.2);

/// Relative L2 error at t = T of the temperature solve with v = 0, rho0 = 1,
/// theta0 = sin(pi x3) against e^{-kappa pi^2 t / c_v} sin(pi x3).
double heat_mode_error(const GridSpec& g, const BasisOrders& m, const PhysParams& p, double T, int steps);

struct ConvergenceStudy {
  /// Self-convergence order from the solutions with n, 2n and 4n steps.
  double temporal_order = 0.0;
  /// L2 errors against the exact solution at t = T for the two basis orders.
  double error_low = 0.0;
  double error_high = 0.0;
  double spatial_drop() const { return error_low / error_high; }
};

struct ConvergenceSetup {
  GridSpec grid = make_grid(12, 12, 17);
  int m_low = 4, m_high = 6;
  double T = 0.1;
  int coarse_steps = 10;
  int fine_steps = 40;
};

/// v* = e^{-t} (cos(2 pi x1) sin x3, 0, cos x3) with rho0 = 1, at rest
/// coefficients, and the body force and outward traction that make v* exact.
ConvergenceStudy manufactured_velocity(const ConvergenceSetup& s, const PhysParams& p);

/// Theta* = e^{-t} sin(pi x3) (1 + cos(2 pi x2) / 2) with v = 0, rho0 = 1
/// and the matching body heat source.
ConvergenceStudy manufactured_temperature(const ConvergenceSetup& s, const PhysParams& p);

struct InequalitySweep {
  /// Largest Hardy ratios over the random polynomials for k = 2 and k = 1/2.
  double hardy_k2 = 0.0;
  double hardy_k_half = 0.0;
  /// Largest weighted Korn ratio over the random smooth fields.
  double korn = 0.0;
};

/// Random polynomials sampled at n3 Chebyshev-Lobatto points and random
/// smooth fields on an 8 x 8 x n3 grid with rho0 = d.
InequalitySweep inequality_sweep(int n3, int fields, unsigned seed);

}  // namespace fbns
