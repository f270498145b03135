#include "fbns/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fbns/error.hpp"
#include "fbns/simd/kernels.hpp"

namespace fbns {

FlowMap FlowMap::identity(const GridSpec& g) { return FlowMap{Field(g, 3), 0.0}; }

Field FlowMap::eta() const {
  const GridSpec& g = xi.grid();
  Field out = Field::sample(g, 3, [](int c, double x1, double x2, double x3) {
    return c == 0 ? x1 : (c == 1 ? x2 : x3);
  });
  out += xi;
  return out;
}

FlowMap advance_flow_map(const FlowMap& m, const VelocityEvaluator& v, double dt) {
  const double t = m.time;
  const Field k1 = v(t, m.xi);
  Field s = m.xi;
  s.add_scaled(0.5 * dt, k1);
  const Field k2 = v(t + 0.5 * dt, s);
  s = m.xi;
  s.add_scaled(0.5 * dt, k2);
  const Field k3 = v(t + 0.5 * dt, s);
  s = m.xi;
  s.add_scaled(dt, k3);
  const Field k4 = v(t + dt, s);

  FlowMap out{m.xi, t + dt};
  out.xi.add_scaled(dt / 6.0, k1);
  out.xi.add_scaled(dt / 3.0, k2);
  out.xi.add_scaled(dt / 3.0, k3);
  out.xi.add_scaled(dt / 6.0, k4);
  if (!out.xi.all_finite()) throw NonFiniteState("flow map update produced NaN or Inf");
  return out;
}

FlowMap advance_flow_map(const FlowMap& m, const Field& v, double dt) {
  return advance_flow_map(m, [&v](double, const Field&) { return v; }, dt);
}

namespace {

simd::Mat3Batch view(const Field& f) {
  simd::Mat3Batch b{};
  for (int e = 0; e < 9; ++e) b.entry[e] = f.component(e).data();
  return b;
}

}  // namespace

Deformation deformation_from_gradient(const Field& Deta) {
  if (Deta.components() != 9) throw GridMismatch("deformation gradient must have 9 components");
  if (!Deta.all_finite()) throw NonFiniteState("deformation gradient is not finite");
  const GridSpec& g = Deta.grid();
  const std::size_t n = g.points();
  const auto& k = simd::kernels();

  Field J(g, 1);
  Field a(g, 9);
  k.det3(view(Deta), J.values().data(), n);
  // a^k_i = cof(Deta)_{ik}: write cofactor entry (i, k) into slot (k, i).
  simd::Mat3BatchOut out{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out.entry[3 * r + c] = a.component(3 * c + r).data();
  k.cofactor3(view(Deta), out, n);

  const auto jv = J.component(0);
  for (std::size_t p = 0; p < n; ++p) {
    if (!(std::abs(jv[p]) >= 1e-10)) throw DegenerateJacobian("|J| < 1e-10 at node " + std::to_string(p));
  }
  Field A(g, 9);
  Field inv_j(g, 1);
  for (std::size_t p = 0; p < n; ++p) inv_j.values()[p] = 1.0 / jv[p];
  for (int e = 0; e < 9; ++e) simd::mul(inv_j.component(0), a.component(e), A.component(e));
  return Deformation{std::move(A), std::move(J), std::move(a), Deta};
}

Deformation compute_deformation(const FlowMap& m) {
  Field Deta = gradient(m.xi);
  for (int i = 0; i < 3; ++i)
    for (double& x : Deta.component(4 * i)) x += 1.0;
  return deformation_from_gradient(Deta);
}

Field tensor_product(const Field& x, const Field& y) {
  require_same_grid(x, y);
  Field out(x.grid(), 9);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      for (int k = 0; k < 3; ++k) simd::mul_acc(x.component(3 * r + k), y.component(3 * k + c), out.component(3 * r + c));
  return out;
}

Field tensor_transpose(const Field& x) {
  Field out(x.grid(), 9);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out.assign(3 * c + r, x.extract(3 * r + c));
  return out;
}

DeformationRates deformation_rates(const Deformation& d, const Field& v) {
  require_same_grid(d.J, v);
  const GridSpec& g = v.grid();
  const std::size_t n = g.points();
  for (double j : d.J.values())
    if (!(std::abs(j) >= 1e-10)) throw DegenerateJacobian("|J| < 1e-10");

  const Field Dv = gradient(v);
  Field J_t(g, 1);
  // J_t = a^s_r v^r_{,s} = trace(a Dv)
  for (int r = 0; r < 3; ++r)
    for (int s = 0; s < 3; ++s) simd::mul_acc(d.a.component(3 * s + r), Dv.component(3 * r + s), J_t.component(0));

  // a_t = (J_t a - a Dv a) / J
  const Field aDva = tensor_product(tensor_product(d.a, Dv), d.a);
  Field a_t(g, 9);
  Field A_t(g, 9);
  const auto jt = J_t.component(0);
  const auto jv = d.J.component(0);
  for (int e = 0; e < 9; ++e) {
    const auto ae = d.a.component(e);
    const auto Ae = d.A.component(e);
    const auto m = aDva.component(e);
    auto out = a_t.component(e);
    auto outA = A_t.component(e);
    for (std::size_t p = 0; p < n; ++p) {
      out[p] = (jt[p] * ae[p] - m[p]) / jv[p];
      outA[p] = (out[p] - jt[p] * Ae[p]) / jv[p];
    }
  }
  return DeformationRates{std::move(J_t), std::move(a_t), std::move(A_t)};
}

Field piola_residual(const Deformation& d) {
  const GridSpec& g = d.a.grid();
  Field out(g, 3);
  for (int k = 0; k < 3; ++k) {
    Field row(g, 3);
    for (int i = 0; i < 3; ++i) row.assign(i, d.a.extract(3 * k + i));
    out += diff(row, k + 1);
  }
  return out;
}

AprioriCheck check_apriori(const Deformation& d, double deta_bound) {
  AprioriCheck r;
  r.j_min = std::numeric_limits<double>::infinity();
  r.j_max = -std::numeric_limits<double>::infinity();
  for (double j : d.J.values()) {
    r.j_min = std::min(r.j_min, j);
    r.j_max = std::max(r.j_max, j);
  }
  const std::size_t n = d.J.points();
  for (std::size_t p = 0; p < n; ++p) {
    for (int e = 0; e < 9; ++e) r.deta_max = std::max(r.deta_max, std::abs(d.Deta.component(e)[p]));
  }
  r.ok = r.j_min >= 0.5 && r.j_max <= 1.5 && r.deta_max <= deta_bound;
  return r;
}

}  // namespace fbns
