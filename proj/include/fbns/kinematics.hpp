#pragma once

// Flow map eta(x, t) and the deformation tensors derived from it. Tensor
// fields use the row-major layout of Field: for Deta, entry (i, j) holds
// d eta^i / d x_j; for A and a, entry (k, i) holds A^k_i and a^k_i, so
// (grad_eta F)^i = A^k_i F_{,k} and a = J A is the transposed cofactor of Deta.

#include <functional>

#include "fbns/grid.hpp"

namespace fbns {

/// The flow map is stored as its displacement xi = eta - Id, which is periodic
/// in x1 and x2 even though eta itself is not.
struct FlowMap {
  Field xi;
  double time = 0.0;

  static FlowMap identity(const GridSpec& g);
  /// Positions eta(x) = x + xi(x).
  Field eta() const;
};

struct Deformation {
  Field A;
  Field J;
  Field a;
  Field Deta;
};

/// Lagrangian velocity at time t given the current displacement.
using VelocityEvaluator = std::function<Field(double t, const Field& xi)>;

/// One classical RK4 step of eta_t = v.
FlowMap advance_flow_map(const FlowMap& m, const VelocityEvaluator& v, double dt);
/// Same with v frozen over the step.
FlowMap advance_flow_map(const FlowMap& m, const Field& v, double dt);

Deformation compute_deformation(const FlowMap& m);
/// Builds (A, J, a) from a given deformation gradient.
Deformation deformation_from_gradient(const Field& Deta);

struct DeformationRates {
  Field J_t;
  Field a_t;
  Field A_t;
};

/// J_t = a^s_r v^r_{,s};  (a_t)^k_i = J^{-1} v^r_{,s} (a^s_r a^k_i - a^s_i a^k_r);
/// A_t = (a_t - J_t A) / J.
DeformationRates deformation_rates(const Deformation& d, const Field& v);

/// a^k_{i,k} for i = 1..3.
Field piola_residual(const Deformation& d);

struct AprioriCheck {
  bool ok = false;
  double j_min = 0.0;
  double j_max = 0.0;
  double deta_max = 0.0;
};

/// ok iff 1/2 <= J <= 3/2 at every node and |Deta| <= deta_bound, with |.|
/// the largest absolute entry.
AprioriCheck check_apriori(const Deformation& d, double deta_bound = 2.0);

/// Pointwise 3x3 products over 9-component fields: out(r,c) = sum_k x(r,k) y(k,c).
Field tensor_product(const Field& x, const Field& y);
Field tensor_transpose(const Field& x);

}  // namespace fbns
