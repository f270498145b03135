#pragma once

// Galerkin discretization of the linearized system: given a frozen trajectory
// (v~, Theta~), the velocity solve uses the H1 basis with the traction
// condition natural in the weak form, then the temperature solve uses the
// H1_0 basis with Theta = 0 on the faces built in.

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "fbns/grid.hpp"
#include "fbns/initial_data.hpp"
#include "fbns/kinematics.hpp"
#include "fbns/physics.hpp"

namespace fbns {

enum class Scheme { backward_euler, crank_nicolson };

struct TimeGrid {
  double T = 0.0;
  int n_steps = 1;
  Scheme scheme = Scheme::crank_nicolson;

  double dt() const { return T / n_steps; }
  double time(int n) const { return T * n / n_steps; }
  /// Throws InvalidParameter unless T > 0 and n_steps >= 1.
  void validate() const;
};

/// A one-dimensional family sampled at the nodes of one axis, stored
/// (function, node) row-major, with its exact derivative.
struct Family1D {
  int size = 0;
  int nodes = 0;
  std::vector<double> value;
  std::vector<double> deriv;
  double operator()(int f, int i) const { return value[static_cast<std::size_t>(f) * nodes + i]; }
};

/// Basis orders per direction: m1, m2 real Fourier functions
/// (1, cos 2 pi x, sin 2 pi x, cos 4 pi x, ...) and m3 polynomial functions in x3.
struct BasisOrders {
  int m1 = 4, m2 = 4, m3 = 4;
};

enum class BasisKind { velocity, temperature };

/// Index of a scalar mode within a basis.
struct ModeIndex {
  int j1, j2, j3;
};

/// Tensor-product Fourier x Chebyshev families, each orthonormal in L2 of its
/// axis, so every basis is orthonormal in L2(Omega). Velocity modes in x3 are
/// orthonormalized T_n(2 x3 - 1), n < m3; temperature modes are the
/// orthonormalized T_{n+2} - T_{n mod 2}, which vanish at x3 = 0 and 1.
struct BasisSet {
  GridSpec grid;
  BasisOrders m;
  Family1D f1, f2;
  Family1D h_velocity, h_temperature;

  int size(BasisKind) const { return m.m1 * m.m2 * m.m3; }
  int velocity_size() const { return size(BasisKind::velocity); }
  int temperature_size() const { return size(BasisKind::temperature); }
  ModeIndex mode(int s) const { return {s % m.m1, (s / m.m1) % m.m2, s / (m.m1 * m.m2)}; }
  const Family1D& x3_family(BasisKind k) const { return k == BasisKind::velocity ? h_velocity : h_temperature; }
};

/// Throws InvalidResolution unless 1 <= m1 <= n1/2, 1 <= m2 <= n2/2 and
/// 1 <= m3 <= (n3 - 3)/2, which keeps every product of two modes exactly
/// integrated by the grid quadrature.
BasisSet build_basis(const GridSpec& g, BasisOrders m);
inline BasisSet build_basis(const GridSpec& g, int m) { return build_basis(g, BasisOrders{m, m, m}); }

/// Values of one basis mode on the grid.
Field basis_mode(const BasisSet& b, BasisKind kind, int s);

/// sum_s c[comp * N + s] w_s, for a field with `components` components.
Field synthesize(const BasisSet& b, BasisKind kind, const Eigen::VectorXd& c, int components);
/// (f, w_s) for every component, the L2 projection coefficients.
Eigen::VectorXd project(const BasisSet& b, BasisKind kind, const Field& f);

/// (rho0 w_l, w_s). Throws SingularMass if the smallest eigenvalue is <= 1e-14.
Eigen::MatrixXd assemble_mass(const Field& rho0, const BasisSet& b, BasisKind kind = BasisKind::velocity);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Eigen::MatrixXd& m);

/// Frozen coefficients at one time: the flow map of v~ and Theta~.
struct FrozenSample {
  double time = 0.0;
  Field xi;
  Deformation defm;
  Field Theta;
};

/// Samples at every step and at every step midpoint.
struct FrozenCoefficients {
  TimeGrid tg;
  std::vector<FrozenSample> steps;
  std::vector<FrozenSample> mids;
};

/// Cubic Lagrange interpolation in time through the four nearest steps (fewer
/// when the series is shorter).
Field interpolate_series(const std::vector<Field>& series, const TimeGrid& tg, double t);

/// eta~ from v~ by RK4 on the interpolated velocity; J~ checked against the a
/// priori bounds at every sample (AprioriViolated otherwise).
FrozenCoefficients freeze(const std::vector<Field>& v_tilde, const std::vector<Field>& Theta_tilde, const TimeGrid& tg);

/// Optional forcing hooks. `body` is added to the right-hand side of the
/// equation; `traction` (velocity only) is an outward surface force whose
/// values on the x3 = 0 and x3 = 1 planes enter as face integrals.
struct VelocityForcing {
  std::function<Field(double t)> body;
  std::function<Field(double t)> traction;
};
struct TemperatureForcing {
  std::function<Field(double t)> body;
};

struct VelocityTrajectory {
  std::vector<Field> v;
  std::vector<Eigen::VectorXd> coeffs;
};
struct TemperatureTrajectory {
  std::vector<Field> Theta;
  std::vector<Eigen::VectorXd> coeffs;
};

VelocityTrajectory solve_velocity(const FrozenCoefficients& frozen, const InitialData& data, const PhysParams& p,
                                  const TimeGrid& tg, const BasisSet& b, const VelocityForcing* forcing = nullptr);

TemperatureTrajectory solve_temperature(const VelocityTrajectory& v, const FrozenCoefficients& frozen,
                                        const InitialData& data, const PhysParams& p, const TimeGrid& tg,
                                        const BasisSet& b, const TemperatureForcing* forcing = nullptr);

/// Test functions phi(x, t) (3 components, free on the faces) and psi(x, t)
/// (scalar, vanishing on the faces).
struct TestFunctions {
  std::function<Field(double t)> phi;
  std::function<Field(double t)> psi;
};

struct WeakDefect {
  double momentum = 0.0;
  double temperature = 0.0;
};

/// Absolute defect of both weak identities at t = T, with the time integrals
/// taken by the rule of the configured scheme (midpoint stages for
/// Crank-Nicolson, end points for backward Euler) and the time-derivative
/// term summed by parts.
WeakDefect weak_residual(const VelocityTrajectory& v, const TemperatureTrajectory& Theta,
                         const FrozenCoefficients& frozen, const InitialData& data, const PhysParams& p,
                         const TestFunctions& tests, const VelocityForcing* vf = nullptr,
                         const TemperatureForcing* tf = nullptr);

}  // namespace fbns
