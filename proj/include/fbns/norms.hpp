#pragma once

#include "fbns/grid.hpp"

namespace fbns {

/// Discrete H^k norm: sqrt(sum over multi-indices |beta| <= k, each counted
/// once, of the quadrature of w |D^beta f|^2), summed over components. The
/// optional scalar weight w multiplies every integrand. With zero_trace set,
/// throws TraceViolation unless f vanishes on x3 = 0, 1 within 1e-8.
double sobolev_norm(const Field& f, int k, const Field* weight = nullptr, bool zero_trace = false);

inline double sobolev_norm_sq(const Field& f, int k, const Field* weight = nullptr) {
  const double n = sobolev_norm(f, k, weight);
  return n * n;
}

/// Tangential derivatives (axes 1 and 2) stacked: for an n-component f, the
/// result has 2n components, (d1 f, d2 f).
Field tangential_gradient(const Field& f);

/// Largest |f| over the nodes on x3 = 0 and x3 = 1.
double boundary_max_abs(const Field& f);

}  // namespace fbns
