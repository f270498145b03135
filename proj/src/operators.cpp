#include "fbns/operators.hpp"

#include <algorithm>
#include <cmath>

#include "fbns/error.hpp"
#include "fbns/simd/kernels.hpp"

namespace fbns {
namespace {

void require_components(const Field& f, int n, const char* what) {
  if (f.components() != n) throw GridMismatch(std::string(what) + " has the wrong number of components");
}

void require_nondegenerate(const Field& J) {
  for (double j : J.values())
    if (!(std::abs(j) >= 1e-10)) throw DegenerateJacobian("|J| < 1e-10");
}

// R rho0 Theta / J
Field pressure(const Field& Theta, const Deformation& d, const Field& rho0, const PhysParams& p) {
  require_nondegenerate(d.J);
  Field out(Theta.grid(), 1);
  const auto th = Theta.component(0), r0 = rho0.component(0), j = d.J.component(0);
  auto o = out.component(0);
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = p.R * r0[i] * th[i] / j[i];
  return out;
}

// d/dt (R rho0 Theta / J) = R (rho0 Theta_t) / J - R rho0 Theta J_t / J^2
Field pressure_rate(const Field& Theta, const StateRates& r, const Deformation& d, const Field& rho0,
                    const PhysParams& p) {
  const Field rt = r.rho0_Theta_t ? *r.rho0_Theta_t : rho0 * r.Theta_t;
  Field out(Theta.grid(), 1);
  const auto th = Theta.component(0), rtt = rt.component(0), r0 = rho0.component(0);
  const auto j = d.J.component(0), jt = r.defm_t.J_t.component(0);
  auto o = out.component(0);
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = p.R * (rtt[i] / j[i] - r0[i] * th[i] * jt[i] / (j[i] * j[i]));
  return out;
}

}  // namespace

Field grad_eta(const Field& F, const Deformation& d) {
  require_components(F, 1, "grad_eta argument");
  const Field DF = gradient(F);
  Field out(F.grid(), 3);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) simd::mul_acc(d.A.component(3 * k + i), DF.component(k), out.component(i));
  return out;
}

Field div_eta(const Field& W, const Deformation& d) {
  require_components(W, 3, "div_eta argument");
  const Field DW = gradient(W);
  Field out(W.grid(), 1);
  for (int l = 0; l < 3; ++l)
    for (int k = 0; k < 3; ++k) simd::mul_acc(d.A.component(3 * k + l), DW.component(3 * l + k), out.component(0));
  return out;
}

Field stress_from_gradient(const Field& DW, const Field& A, const PhysParams& p) {
  require_same_grid(DW, A);
  const GridSpec& g = DW.grid();
  Field out(g, 9);
  Field div(g, 1);
  for (int l = 0; l < 3; ++l)
    for (int k = 0; k < 3; ++k) simd::mul_acc(A.component(3 * k + l), DW.component(3 * l + k), div.component(0));
  // G^{ij} = A^k_j W^i_{,k}
  const Field G = tensor_product(DW, A);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      auto o = out.component(3 * i + j);
      const auto gij = G.component(3 * i + j), gji = G.component(3 * j + i);
      for (std::size_t n = 0; n < o.size(); ++n) o[n] = p.mu * (gij[n] + gji[n]);
      if (i == j) simd::axpy(p.lambda, div.component(0), o);
    }
  return out;
}

Field stress(const Field& W, const Deformation& d, const PhysParams& p) {
  require_components(W, 3, "stress argument");
  return stress_from_gradient(gradient(W), d.A, p);
}

Field cofactor_contract(const Field& a, const Field& DW) {
  Field out(a.grid(), 1);
  for (int r = 0; r < 3; ++r)
    for (int i = 0; i < 3; ++i) simd::mul_acc(a.component(3 * r + i), DW.component(3 * i + r), out.component(0));
  return out;
}

Field cofactor_grad(const Field& a, const Field& F) {
  const Field DF = gradient(F);
  Field out(a.grid(), 3);
  for (int i = 0; i < 3; ++i)
    for (int r = 0; r < 3; ++r) simd::mul_acc(a.component(3 * r + i), DF.component(r), out.component(i));
  return out;
}

Field cofactor_div_tensor(const Field& a, const Field& T) {
  require_components(T, 9, "tensor");
  Field out(a.grid(), 3);
  for (int r = 0; r < 3; ++r) {
    const Field dT = diff(T, r + 1);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) simd::mul_acc(a.component(3 * r + j), dT.component(3 * i + j), out.component(i));
  }
  return out;
}

Field cofactor_div_vector(const Field& a, const Field& G) {
  require_components(G, 3, "vector");
  Field out(a.grid(), 1);
  for (int r = 0; r < 3; ++r) {
    const Field dG = diff(G, r + 1);
    for (int i = 0; i < 3; ++i) simd::mul_acc(a.component(3 * r + i), dG.component(i), out.component(0));
  }
  return out;
}

Field stress_work(const Field& S, const Field& a, const Field& DW) {
  // S^{ij} (DW a)^{ij}, (DW a)^{ij} = W^i_{,r} a^r_j
  const Field M = tensor_product(DW, a);
  Field out(a.grid(), 1);
  for (int e = 0; e < 9; ++e) simd::mul_acc(S.component(e), M.component(e), out.component(0));
  return dealias(out);
}

Field momentum_rhs(const Field& v, const Field& Theta, const Deformation& d, const Field& rho0, const PhysParams& p) {
  require_components(v, 3, "velocity");
  require_same_grid(v, Theta);
  const Field P = pressure(Theta, d, rho0, p);
  const Field S = stress(v, d, p);
  Field out = cofactor_div_tensor(d.a, S);
  out -= cofactor_grad(d.a, P);
  return out;
}

Field temperature_rhs(const Field& v, const Field& Theta, const Deformation& d, const Field& rho0, const PhysParams& p,
                      const Field* Theta_p) {
  require_components(v, 3, "velocity");
  require_same_grid(v, Theta);
  const Field P = pressure(Theta_p ? *Theta_p : Theta, d, rho0, p);
  const Field Dv = gradient(v);
  const Field S = stress_from_gradient(Dv, d.A, p);
  Field out = stress_work(S, d.a, Dv);
  out -= P * cofactor_contract(d.a, Dv);
  out.add_scaled(p.kappa, cofactor_div_vector(d.a, grad_eta(Theta, d)));
  return out;
}

Field momentum_rhs_rate(const Field& v, const Field& Theta, const Deformation& d, const StateRates& r,
                        const Field& rho0, const PhysParams& p) {
  const Field& a_t = r.defm_t.a_t;
  const Field& A_t = r.defm_t.A_t;
  const Field P = pressure(Theta, d, rho0, p);
  const Field P_t = pressure_rate(Theta, r, d, rho0, p);
  const Field Dv = gradient(v);
  const Field S = stress_from_gradient(Dv, d.A, p);
  const Field S_t = stress_from_gradient(gradient(r.v_t), d.A, p) + stress_from_gradient(Dv, A_t, p);
  Field out = cofactor_div_tensor(a_t, S);
  out += cofactor_div_tensor(d.a, S_t);
  out -= cofactor_grad(a_t, P);
  out -= cofactor_grad(d.a, P_t);
  return out;
}

Field temperature_rhs_rate(const Field& v, const Field& Theta, const Deformation& d, const StateRates& r,
                           const Field& rho0, const PhysParams& p) {
  const Field& a_t = r.defm_t.a_t;
  const Field& A_t = r.defm_t.A_t;
  const Field P = pressure(Theta, d, rho0, p);
  const Field P_t = pressure_rate(Theta, r, d, rho0, p);
  const Field Dv = gradient(v);
  const Field Dv_t = gradient(r.v_t);
  const Field S = stress_from_gradient(Dv, d.A, p);
  const Field S_t = stress_from_gradient(Dv_t, d.A, p) + stress_from_gradient(Dv, A_t, p);

  Field out = stress_work(S_t, d.a, Dv);
  out += stress_work(S, a_t, Dv);
  out += stress_work(S, d.a, Dv_t);
  out -= P_t * cofactor_contract(d.a, Dv);
  out -= P * (cofactor_contract(a_t, Dv) + cofactor_contract(d.a, Dv_t));

  const Field DTheta = gradient(Theta);
  const Field DTheta_t = gradient(r.Theta_t);
  Field G(v.grid(), 3), G_t(v.grid(), 3);
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      simd::mul_acc(d.A.component(3 * k + i), DTheta.component(k), G.component(i));
      simd::mul_acc(A_t.component(3 * k + i), DTheta.component(k), G_t.component(i));
      simd::mul_acc(d.A.component(3 * k + i), DTheta_t.component(k), G_t.component(i));
    }
  out.add_scaled(p.kappa, cofactor_div_vector(a_t, G));
  out.add_scaled(p.kappa, cofactor_div_vector(d.a, G_t));
  return out;
}

void zero_boundary_rows(Field& f) {
  const GridSpec& g = f.grid();
  const std::size_t plane = g.plane();
  for (int c = 0; c < f.components(); ++c) {
    auto comp = f.component(c);
    std::fill(comp.begin(), comp.begin() + plane, 0.0);
    std::fill(comp.end() - plane, comp.end(), 0.0);
  }
}

Field momentum_residual(const StateSlice& s, const Field& v_t, const Field& rho0, const PhysParams& p,
                        bool interior_only) {
  Field out = rho0 * v_t;
  out -= momentum_rhs(s.v, s.Theta, s.defm, rho0, p);
  if (interior_only) zero_boundary_rows(out);
  return out;
}

Field temperature_residual(const StateSlice& s, const Field& Theta_t, const Field& rho0, const PhysParams& p,
                           bool interior_only) {
  Field out = p.c_v * (rho0 * Theta_t);
  out -= temperature_rhs(s.v, s.Theta, s.defm, rho0, p);
  if (interior_only) zero_boundary_rows(out);
  return out;
}

double BoundaryStressResidual::max() const {
  double m = 0.0;
  for (int i = 0; i < 3; ++i) m = std::max({m, bottom[i], top[i]});
  return m;
}

BoundaryStressResidual boundary_stress_residual(const Field& v, const Deformation& d, const PhysParams& p) {
  const Field S = stress(v, d, p);
  const GridSpec& g = v.grid();
  const std::size_t plane = g.plane();
  const std::size_t top0 = g.points() - plane;
  BoundaryStressResidual r;
  for (int i = 0; i < 3; ++i)
    for (std::size_t q = 0; q < plane; ++q) {
      double b = 0.0, t = 0.0;
      for (int j = 0; j < 3; ++j) {
        b += d.a.component(6 + j)[q] * S.component(3 * i + j)[q];
        t += d.a.component(6 + j)[top0 + q] * S.component(3 * i + j)[top0 + q];
      }
      r.bottom[i] = std::max(r.bottom[i], std::abs(b));
      r.top[i] = std::max(r.top[i], std::abs(t));
    }
  return r;
}

}  // namespace fbns
