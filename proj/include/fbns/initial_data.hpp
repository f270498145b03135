#pragma once

// Vacuum initial data: density and temperature vanishing on x3 = 0, 1, their
// validation, and the time derivatives at t = 0 implied by the equations.

#include <functional>
#include <string>
#include <vector>

#include "fbns/grid.hpp"
#include "fbns/physics.hpp"

namespace fbns {

struct InitialData {
  Field rho0;
  Field u0;
  Field theta0;
  double alpha = 1.0;
};

struct DerivedInitials {
  Field u0t, u0tt;
  Field theta0t, theta0tt;
  double M0 = 1.0;
};

/// d(x) = x3 (1 - x3)
Field distance_function(const GridSpec& g);

/// Regularity norms of the density, reported without a threshold:
/// ||rho0||_inf, ||D rho0||_{L3}, ||dbar rho0||_{H1}, ||d (|D^2 rho0| + |dbar D^2 rho0|)||_{L2},
/// with |.| the entry sums.
struct DensityRecord {
  double linf = 0.0;
  double grad_l3 = 0.0;
  double tangential_h1 = 0.0;
  double weighted_second = 0.0;
};

struct DensityProfile {
  Field rho0;
  DensityRecord record;
};

/// rho0 = envelope(x) d(x)^alpha. The record integrates the closed-form
/// singular factor d^alpha with a double-exponential rule in x3 and the
/// smooth envelope by its spectral interpolant.
DensityProfile build_density(const GridSpec& g, double alpha, const Field::PointFn& envelope);

/// Outward normal derivative grad_n theta over the faces (n = -e3 at x3 = 0,
/// +e3 at x3 = 1).
struct NormalDerivativeRecord {
  double min = 0.0;
  double max = 0.0;
  bool finite = true;
};
NormalDerivativeRecord normal_derivative(const Field& theta);

struct TemperatureProfile {
  Field theta0;
  NormalDerivativeRecord normal;
};

/// Throws VacuumConditionViolation unless grad_n theta0 is finite and
/// negative at every boundary node, PositivityViolation unless theta0 > 0 in
/// the interior and 0 on the boundary.
TemperatureProfile build_temperature(const GridSpec& g, const Field::PointFn& profile);

/// rho0 = d^alpha, theta0 = d, u0 = 0.
InitialData default_dataset(const GridSpec& g, double alpha = 1.0);

/// Full validation of (rho0, u0, theta0, alpha).
void validate_initial_data(const InitialData& data);

/// u0t, theta0t from the equations at t = 0 with eta = Id; u0tt, theta0tt
/// from the time derivative of the right-hand sides, expanded by the product
/// rule with the deformation rates at Id. Quotients by rho0 are taken at nodes
/// where rho0 > 0; where it vanishes the value is extrapolated along x3 from
/// the interior nodes. M0 is filled in.
DerivedInitials initial_time_derivatives(const InitialData& data, const PhysParams& p, const GridSpec& g);

double compute_M0(const DerivedInitials& di, const InitialData& data, const GridSpec& g);

struct CompatibilityReport {
  double theta0_trace = 0.0;
  double dbar_theta0_trace = 0.0;
  double dbar2_theta0_trace = 0.0;
  double theta0t_trace = 0.0;
  double stress_trace = 0.0;       // max |S_Id[u0]^{i3}| on the faces
  double dbar_stress_trace = 0.0;  // max |S_Id[dbar u0]^{i3}| on the faces
  bool pass = true;
  std::vector<std::string> warnings;
};

inline constexpr double kCompatibilityTol = 1e-8;

CompatibilityReport check_compatibility(const InitialData& data, const DerivedInitials& di, const PhysParams& p);

/// Values of f on the nodes where mask == 0 replaced by the polynomial
/// extrapolation along x3 through the nodes where mask != 0.
Field extrapolate_masked(const Field& f, const Field& mask);

}  // namespace fbns
