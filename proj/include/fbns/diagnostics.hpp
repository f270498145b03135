#pragma once

// Energy functionals, Eulerian density, entropy and vacuum monitors, and the
// numerical Hardy and Korn inequality checks.

#include <vector>

#include "fbns/initial_data.hpp"
#include "fbns/picard.hpp"

namespace fbns {

/// The six terms of E: |rho0^{1/2} v_tt|^2, |v_t|_{H1}^2, |v|_{H3}^2,
/// |rho0^{1/2} Theta_tt|^2, |Theta_t|_{H1}^2, |Theta|_{H3}^2.
struct EnergyTerms {
  double v_tt = 0.0, v_t = 0.0, v = 0.0;
  double theta_tt = 0.0, theta_t = 0.0, theta = 0.0;
  double total() const { return v_tt + v_t + v + theta_tt + theta_t + theta; }
};

/// The six integrands of F: |v_tt|_{H1}^2, |v_t|_{H3}^2, |dbar v|_{H3}^2,
/// |Theta_tt|_{H1}^2, |Theta_t|_{H3}^2, |dbar Theta|_{H3}^2.
struct DissipationTerms {
  double v_tt = 0.0, v_t = 0.0, dbar_v = 0.0;
  double theta_tt = 0.0, theta_t = 0.0, dbar_theta = 0.0;
  double total() const { return v_tt + v_t + dbar_v + theta_tt + theta_t + dbar_theta; }
};

struct EnergyReport {
  int step = 0;
  double time = 0.0;
  EnergyTerms E;
  /// Trapezoid integrals of the dissipation terms up to `step`.
  DissipationTerms integrals;
  double F = 0.0;
  double M0 = 0.0;
};

/// Time derivatives of v and Theta at one step. Step 0 takes them from the
/// derived initial data when given (forward differences otherwise); step 1
/// uses central differences; later steps use backward differences.
struct StepRates {
  Field v_t, v_tt, Theta_t, Theta_tt;
};
StepRates step_rates(const Trajectory& t, int step, const DerivedInitials* di = nullptr);

/// E at one step. InsufficientHistory when the stencils do not fit.
EnergyTerms energy_E(const Trajectory& t, int step, const Field& rho0, const DerivedInitials* di = nullptr);

DissipationTerms dissipation(const Trajectory& t, int step, const DerivedInitials* di = nullptr);

/// F at upto_step: E there plus trapezoid integrals of the dissipation terms.
EnergyReport energy_F(const Trajectory& t, int upto_step, const Field& rho0, const DerivedInitials* di = nullptr);

/// E and F at every step; each entry's M0 is 1 + E(0).
std::vector<EnergyReport> energy_series(const Trajectory& t, const Field& rho0, const DerivedInitials* di = nullptr);

/// rho = rho0 / J. DegenerateJacobian unless J > 0 everywhere.
Field eulerian_density(const Field& rho0, const Deformation& d);

struct EntropyField {
  /// S on interior nodes; boundary planes hold 0.
  Field S;
  double band = 0.0;
  double band_min = 0.0;
  double band_max = 0.0;
  int band_nodes = 0;
  double spread() const { return band_max - band_min; }
};

inline constexpr double kEntropyBand = 0.05;

/// S = R/(gamma - 1) ln(R Theta / (A_bar rho^{gamma-1})) on interior nodes,
/// with band statistics over the interior nodes where d(x) = x3 (1 - x3) <
/// band. NonPositiveState unless Theta > 0 and rho > 0 on interior nodes.
EntropyField entropy_field(const Field& Theta, const Field& rho, const PhysParams& p, double band = kEntropyBand);

struct VacuumMonitor {
  double min = 0.0;
  double max = 0.0;
  bool violation = false;
};

/// grad_n Theta over both faces; a violation when max >= 0.
VacuumMonitor vacuum_boundary_monitor(const Field& Theta);

struct InequalityRatio {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

/// Hardy check for g sampled at the n Chebyshev-Lobatto points of [0, 1]
/// (s_j = (1 - cos(pi j / (n - 1))) / 2). k > 1: lhs = int s^{k-2} g^2,
/// rhs = int s^k (g^2 + g'^2); -1 < k < 1: lhs = int s^{k-2} (g - g(0))^2,
/// rhs = int s^k g'^2. Integrals of the interpolant by Gauss-Jacobi
/// quadrature. UnsupportedExponent for k = 1 or k <= -1.
InequalityRatio hardy_check(const std::vector<double>& g, double k);

/// Chebyshev-Lobatto nodes of [0, 1] used by hardy_check.
std::vector<double> hardy_nodes(int n);

/// lhs = |v|_{H1}^2, rhs = int sum_ij (v^i_{,j} + v^j_{,i})^2 + tail, with tail
/// |rho0^{1/2} v|^2 when weighted (rho0 required) and |v|^2 otherwise.
InequalityRatio korn_check(const Field& v, bool weighted, const Field* rho0 = nullptr);

/// Closed-form random smooth field: a seeded sum of Fourier modes with
/// |k| <= 2 in x1, x2 times cubics in x3, the same function on every grid.
class SmoothRandomField {
 public:
  SmoothRandomField(unsigned seed, int components, int terms = 6);
  double value(int c, double x1, double x2, double x3) const;
  /// d value / d x_axis (axis 0, 1, 2).
  double derivative(int c, int axis, double x1, double x2, double x3) const;
  Field sample(const GridSpec& g) const;

 private:
  struct Term {
    int comp, k1, k2;
    double amp, phase;
    double p[4];
  };
  int components_;
  std::vector<Term> terms_;
};

/// Random polynomial of degree <= 5 with seeded coefficients.
std::vector<double> random_polynomial(unsigned seed);
double eval_polynomial(const std::vector<double>& c, double s);

}  // namespace fbns
