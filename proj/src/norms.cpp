#include "fbns/norms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>

#include "fbns/error.hpp"
#include "fbns/simd/kernels.hpp"

namespace fbns {

double boundary_max_abs(const Field& f) {
  const GridSpec& g = f.grid();
  const std::size_t plane = g.plane();
  double m = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    const auto comp = f.component(c);
    for (std::size_t q = 0; q < plane; ++q) m = std::max({m, std::abs(comp[q]), std::abs(comp[comp.size() - plane + q])});
  }
  return m;
}

double sobolev_norm(const Field& f, int k, const Field* weight, bool zero_trace) {
  if (k < 0 || k > 3) throw InvalidParameter("Sobolev order must be 0..3, got " + std::to_string(k));
  if (weight) {
    require_same_grid(f, *weight);
    if (weight->components() != 1) throw GridMismatch("weight must be scalar");
  }
  if (zero_trace) {
    const double t = boundary_max_abs(f);
    if (t > 1e-8) throw TraceViolation("field does not vanish on the boundary (max |f| = " + std::to_string(t) + ")");
  }
  const std::span<const double> w = f.grid().node_weights();
  Field sq(f.grid(), 1);

  // Walk multi-indices in order of total degree; each derivative is produced
  // from its parent by one more differentiation.
  std::map<std::array<int, 3>, Field> level{{{0, 0, 0}, f}};
  double total = 0.0;
  for (int order = 0; order <= k; ++order) {
    for (const auto& [beta, df] : level) {
      std::fill(sq.values().begin(), sq.values().end(), 0.0);
      for (int c = 0; c < df.components(); ++c) simd::mul_acc(df.component(c), df.component(c), sq.component(0));
      if (weight) simd::mul(sq.component(0), weight->component(0), sq.component(0));
      total += simd::dot(sq.component(0), w);
    }
    if (order == k) break;
    std::map<std::array<int, 3>, Field> next;
    for (const auto& [beta, df] : level) {
      // Extend only along axes >= the last axis used, so each index appears once.
      int last = 0;
      for (int a = 0; a < 3; ++a)
        if (beta[a] > 0) last = a;
      for (int a = last; a < 3; ++a) {
        auto child = beta;
        ++child[a];
        next.emplace(child, diff(df, a + 1));
      }
    }
    level = std::move(next);
  }
  return std::sqrt(std::max(total, 0.0));
}

Field tangential_gradient(const Field& f) {
  const int n = f.components();
  Field out(f.grid(), 2 * n);
  const Field d1 = diff(f, 1), d2 = diff(f, 2);
  for (int c = 0; c < n; ++c) {
    out.assign(c, d1.extract(c));
    out.assign(n + c, d2.extract(c));
  }
  return out;
}

}  // namespace fbns
