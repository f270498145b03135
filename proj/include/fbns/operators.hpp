#pragma once

// Lagrangian differential operators, the viscous stress and the pointwise
// residuals of the momentum and temperature equations. Einstein summation
// over repeated indices; tensors use the Field layout of kinematics.hpp.

#include <array>

#include "fbns/grid.hpp"
#include "fbns/kinematics.hpp"
#include "fbns/physics.hpp"

namespace fbns {

struct StateSlice {
  Field v;
  Field Theta;
  Deformation defm;
  double time = 0.0;
};

/// (grad_eta F)^i = A^k_i F_{,k}
Field grad_eta(const Field& F, const Deformation& d);
/// div_eta W = A^k_l W^l_{,k}
Field div_eta(const Field& W, const Deformation& d);
/// S^{ij} = mu (A^k_j W^i_{,k} + A^k_i W^j_{,k}) + lambda (A^k_l W^l_{,k}) delta^{ij}
Field stress(const Field& W, const Deformation& d, const PhysParams& p);

// Building blocks. DW is a 9-component gradient (entry (i, k) = W^i_{,k}).
/// Stress from a velocity gradient and an arbitrary matrix field in place of A.
Field stress_from_gradient(const Field& DW, const Field& A, const PhysParams& p);
/// a^r_i W^i_{,r}
Field cofactor_contract(const Field& a, const Field& DW);
/// a^r_i F_{,r}
Field cofactor_grad(const Field& a, const Field& F);
/// a^r_j T^{ij}_{,r}
Field cofactor_div_tensor(const Field& a, const Field& T);
/// a^r_i G^i_{,r}
Field cofactor_div_vector(const Field& a, const Field& G);
/// S^{ij} a^r_j W^i_{,r}, dealiased in x1 and x2.
Field stress_work(const Field& S, const Field& a, const Field& DW);

/// Right-hand side of rho0 v_t = ... : -a^r_i (R rho0 Theta / J)_{,r} + a^r_j S^{ij}[v]_{,r}.
Field momentum_rhs(const Field& v, const Field& Theta, const Deformation& d, const Field& rho0, const PhysParams& p);

/// Right-hand side of c_v rho0 Theta_t = ... :
///   -(R rho0 Theta_p / J) a^r_i v^i_{,r} + S^{ij}[v] a^r_j v^i_{,r} + kappa a^r_i (grad_eta Theta)^i_{,r}.
/// Theta_p defaults to Theta; the linearized system passes the frozen
/// temperature there.
Field temperature_rhs(const Field& v, const Field& Theta, const Deformation& d, const Field& rho0, const PhysParams& p,
                      const Field* Theta_p = nullptr);

/// Time derivatives of a state entering the right-hand sides.
struct StateRates {
  const Field& v_t;
  const Field& Theta_t;
  const DeformationRates& defm_t;
  /// rho0 Theta_t when known without division by rho0 (e.g. at t = 0, where
  /// the quotient is singular on the vacuum boundary).
  const Field* rho0_Theta_t = nullptr;
};

/// d/dt of momentum_rhs and temperature_rhs by the product rule.
Field momentum_rhs_rate(const Field& v, const Field& Theta, const Deformation& d, const StateRates& r,
                        const Field& rho0, const PhysParams& p);
Field temperature_rhs_rate(const Field& v, const Field& Theta, const Deformation& d, const StateRates& r,
                           const Field& rho0, const PhysParams& p);

/// rho0 v_t - momentum_rhs. Boundary rows (x3 = 0, 1) are zero unless
/// interior_only is false.
Field momentum_residual(const StateSlice& s, const Field& v_t, const Field& rho0, const PhysParams& p,
                        bool interior_only = true);
/// c_v rho0 Theta_t - temperature_rhs.
Field temperature_residual(const StateSlice& s, const Field& Theta_t, const Field& rho0, const PhysParams& p,
                           bool interior_only = true);

/// Max over each face of |a^3_j S^{ij}[v]| for i = 1, 2, 3.
struct BoundaryStressResidual {
  std::array<double, 3> bottom{};
  std::array<double, 3> top{};
  double max() const;
};
BoundaryStressResidual boundary_stress_residual(const Field& v, const Deformation& d, const PhysParams& p);

/// Zeroes the x3 = 0 and x3 = 1 planes of every component.
void zero_boundary_rows(Field& f);

}  // namespace fbns
