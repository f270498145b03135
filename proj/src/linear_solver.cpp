#include "fbns/linear_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fbns/error.hpp"
#include "fbns/operators.hpp"
#include "fbns/parallel.hpp"
#include "fbns/simd/kernels.hpp"

namespace fbns {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Family1D fourier_family(int m, std::span<const double> x) {
  Family1D f;
  f.size = m;
  f.nodes = static_cast<int>(x.size());
  f.value.resize(static_cast<std::size_t>(m) * f.nodes);
  f.deriv.resize(f.value.size());
  for (int j = 0; j < m; ++j) {
    const int k = (j + 1) / 2;
    const double w = 2 * std::numbers::pi * k;
    for (int i = 0; i < f.nodes; ++i) {
      const std::size_t q = static_cast<std::size_t>(j) * f.nodes + i;
      if (j == 0) {
        f.value[q] = 1.0;
        f.deriv[q] = 0.0;
      } else if (j % 2 == 1) {
        f.value[q] = std::numbers::sqrt2 * std::cos(w * x[i]);
        f.deriv[q] = -std::numbers::sqrt2 * w * std::sin(w * x[i]);
      } else {
        f.value[q] = std::numbers::sqrt2 * std::sin(w * x[i]);
        f.deriv[q] = std::numbers::sqrt2 * w * std::cos(w * x[i]);
      }
    }
  }
  return f;
}

// T_n(2x - 1) and d/dx for n < count, by the three-term recurrence.
void chebyshev_table(int count, std::span<const double> x, RowMat& T, RowMat& dT) {
  const int n = static_cast<int>(x.size());
  T.setZero(count, n);
  dT.setZero(count, n);
  for (int i = 0; i < n; ++i) {
    const double y = 2 * x[i] - 1;
    for (int k = 0; k < count; ++k) {
      if (k == 0) {
        T(k, i) = 1.0;
      } else if (k == 1) {
        T(k, i) = y;
        dT(k, i) = 1.0;
      } else {
        T(k, i) = 2 * y * T(k - 1, i) - T(k - 2, i);
        dT(k, i) = 2 * T(k - 1, i) + 2 * y * dT(k - 1, i) - dT(k - 2, i);
      }
    }
  }
  dT *= 2.0;  // d/dx = 2 d/dy
}

// Orthonormalizes the rows of (V, D) in L2(0, 1) by the Cholesky factor of
// their Gram matrix.
Family1D orthonormal_family(const RowMat& V, const RowMat& D, std::span<const double> w) {
  const int m = static_cast<int>(V.rows()), n = static_cast<int>(V.cols());
  const Eigen::Map<const Eigen::VectorXd> wv(w.data(), n);
  const Eigen::MatrixXd G = V * wv.asDiagonal() * V.transpose();
  const Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success) throw InvalidResolution("x3 basis family is not linearly independent");
  const Eigen::MatrixXd L = llt.matrixL();
  const RowMat Vo = L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd(V));
  const RowMat Do = L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd(D));
  Family1D f;
  f.size = m;
  f.nodes = n;
  f.value.assign(Vo.data(), Vo.data() + Vo.size());
  f.deriv.assign(Do.data(), Do.data() + Do.size());
  return f;
}

struct Axis {
  const Family1D* fam;
  bool deriv;
  const double* row(int j) const {
    return (deriv ? fam->deriv.data() : fam->value.data()) + static_cast<std::size_t>(j) * fam->nodes;
  }
};

std::vector<double> uniform_weights(int n) { return std::vector<double>(n, 1.0 / n); }

// Per-axis test and trial selections for a bilinear or linear form. A linear
// form passes trial = nullptr families.
struct FormAxes {
  std::array<Axis, 3> test;
  std::array<Axis, 3> trial;
};

// axis 0, 1, 2 -> family; `d` is the derivative axis or -1.
std::array<Axis, 3> axes(const BasisSet& b, BasisKind kind, int d) {
  return {Axis{&b.f1, d == 0}, Axis{&b.f2, d == 1}, Axis{&b.x3_family(kind), d == 2}};
}

// P[(s, l)][i] = w[i] * test_s[i] * trial_l[i]; trial may be absent.
RowMat pair_table(const Axis& test, const Axis* trial, const std::vector<double>& w) {
  const int ms = test.fam->size, ml = trial ? trial->fam->size : 1, n = test.fam->nodes;
  RowMat P(ms * ml, n);
  for (int s = 0; s < ms; ++s)
    for (int l = 0; l < ml; ++l) {
      const double* a = test.row(s);
      const double* c = trial ? trial->row(l) : nullptr;
      for (int i = 0; i < n; ++i) P(s * ml + l, i) = w[i] * a[i] * (c ? c[i] : 1.0);
    }
  return P;
}

// Sum-factorized quadrature of coef(x) * test_s(x) * trial_l(x) over all
// (s, l); returns B3 indexed (q3, q2 * Q1 + q1) with q = s * m_l + l per axis.
RowMat contract(std::span<const double> coef, const GridSpec& g, const RowMat& P1, const RowMat& P2,
                const RowMat& P3) {
  const int n1 = g.n1(), n2 = g.n2(), n3 = g.n3();
  const Eigen::Map<const RowMat> C(coef.data(), static_cast<Eigen::Index>(n3) * n2, n1);
  const RowMat T1 = C * P1.transpose();  // (i3 i2) x Q1
  const Eigen::Index Q1 = P1.rows(), Q2 = P2.rows();
  RowMat S(n3, Q2 * Q1);
  for (int i3 = 0; i3 < n3; ++i3) {
    const RowMat T2 = P2 * T1.middleRows(static_cast<Eigen::Index>(i3) * n2, n2);  // Q2 x Q1
    S.row(i3) = Eigen::Map<const Eigen::RowVectorXd>(T2.data(), Q2 * Q1);
  }
  return P3 * S;
}

struct Quadrature {
  std::vector<double> w1, w2, w3, faces;
  explicit Quadrature(const GridSpec& g)
      : w1(uniform_weights(g.n1())), w2(uniform_weights(g.n2())), w3(g.x3_weights().begin(), g.x3_weights().end()),
        faces(g.n3(), 0.0) {
    faces.front() = 1.0;
    faces.back() = 1.0;
  }
};

// (coef D^beta w_s, D^alpha w_l) over all modes: rows s (test), columns l (trial).
Eigen::MatrixXd bilinear_form(std::span<const double> coef, const BasisSet& b, BasisKind ks, int beta, BasisKind kl,
                              int alpha, const Quadrature& q) {
  const auto ts = axes(b, ks, beta), tl = axes(b, kl, alpha);
  const RowMat P1 = pair_table(ts[0], &tl[0], q.w1);
  const RowMat P2 = pair_table(ts[1], &tl[1], q.w2);
  const RowMat P3 = pair_table(ts[2], &tl[2], q.w3);
  const RowMat B3 = contract(coef, b.grid, P1, P2, P3);
  const int m1 = b.m.m1, m2 = b.m.m2, m3 = b.m.m3, N = m1 * m2 * m3;
  Eigen::MatrixXd out(N, N);
  for (int c3 = 0; c3 < m3; ++c3)
    for (int l3 = 0; l3 < m3; ++l3)
      for (int c2 = 0; c2 < m2; ++c2)
        for (int l2 = 0; l2 < m2; ++l2)
          for (int c1 = 0; c1 < m1; ++c1)
            for (int l1 = 0; l1 < m1; ++l1) {
              const int s = (c3 * m2 + c2) * m1 + c1, l = (l3 * m2 + l2) * m1 + l1;
              out(s, l) = B3(c3 * m3 + l3, (c2 * m2 + l2) * (m1 * m1) + c1 * m1 + l1);
            }
  return out;
}

// (g, D^beta w_s) with the given x3 weights (bulk quadrature or face sums).
Eigen::VectorXd linear_form(std::span<const double> g, const BasisSet& b, BasisKind ks, int beta,
                            const std::vector<double>& w3, const Quadrature& q) {
  const auto ts = axes(b, ks, beta);
  const RowMat P1 = pair_table(ts[0], nullptr, q.w1);
  const RowMat P2 = pair_table(ts[1], nullptr, q.w2);
  const RowMat P3 = pair_table(ts[2], nullptr, w3);
  const RowMat B3 = contract(g, b.grid, P1, P2, P3);
  const int m1 = b.m.m1, m2 = b.m.m2, m3 = b.m.m3;
  Eigen::VectorXd out(m1 * m2 * m3);
  for (int c3 = 0; c3 < m3; ++c3)
    for (int c2 = 0; c2 < m2; ++c2)
      for (int c1 = 0; c1 < m1; ++c1) out((c3 * m2 + c2) * m1 + c1) = B3(c3, c2 * m1 + c1);
  return out;
}

// Coefficient fields of the viscous form: block (i, j), derivative pair (r, k)
// is mu delta_ij G^{rk} + mu a^r_j A^k_i + lambda a^r_i A^k_j, G^{rk} = a^r_l A^k_l.
Field conduction_tensor(const Deformation& d) {
  Field G(d.J.grid(), 9);
  for (int r = 0; r < 3; ++r)
    for (int k = 0; k < 3; ++k)
      for (int l = 0; l < 3; ++l) simd::mul_acc(d.a.component(3 * r + l), d.A.component(3 * k + l), G.component(3 * r + k));
  return G;
}

Eigen::MatrixXd velocity_stiffness(const Deformation& d, const BasisSet& b, const PhysParams& p, const Quadrature& q) {
  const int N = b.velocity_size();
  const Field G = conduction_tensor(d);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(3 * N, 3 * N);
  const std::size_t pts = b.grid.points();
  parallel_for(9, [&](std::size_t block) {
    const int i = static_cast<int>(block) / 3, j = static_cast<int>(block) % 3;
    std::vector<double> c(pts);
    Eigen::MatrixXd Kij = Eigen::MatrixXd::Zero(N, N);
    for (int r = 0; r < 3; ++r)
      for (int k = 0; k < 3; ++k) {
        const auto arj = d.a.component(3 * r + j), Aki = d.A.component(3 * k + i);
        const auto ari = d.a.component(3 * r + i), Akj = d.A.component(3 * k + j);
        const auto g = G.component(3 * r + k);
        for (std::size_t n = 0; n < pts; ++n)
          c[n] = p.mu * arj[n] * Aki[n] + p.lambda * ari[n] * Akj[n] + (i == j ? p.mu * g[n] : 0.0);
        Kij += bilinear_form(c, b, BasisKind::velocity, r, BasisKind::velocity, k, q);
      }
    K.block(static_cast<Eigen::Index>(i) * N, static_cast<Eigen::Index>(j) * N, N, N) = Kij;
  });
  return K;
}

Eigen::MatrixXd temperature_stiffness(const Deformation& d, const BasisSet& b, double kappa, const Quadrature& q) {
  const int N = b.temperature_size();
  const Field G = conduction_tensor(d);
  std::vector<Eigen::MatrixXd> parts(9);
  parallel_for(9, [&](std::size_t e) {
    const int r = static_cast<int>(e) / 3, k = static_cast<int>(e) % 3;
    parts[e] = bilinear_form(G.component(3 * r + k), b, BasisKind::temperature, r, BasisKind::temperature, k, q);
  });
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(N, N);
  for (const auto& m : parts) K += m;
  return kappa * K;
}

Eigen::MatrixXd block_diag3(const Eigen::MatrixXd& M) {
  const Eigen::Index N = M.rows();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(3 * N, 3 * N);
  for (int i = 0; i < 3; ++i) B.block(i * N, i * N, N, N) = M;
  return B;
}

Field pressure_field(const Field& rho0, const FrozenSample& s, const PhysParams& p) {
  Field P(rho0.grid(), 1);
  const auto r = rho0.component(0), th = s.Theta.component(0), j = s.defm.J.component(0);
  auto o = P.component(0);
  for (std::size_t n = 0; n < o.size(); ++n) o[n] = p.R * r[n] * th[n] / j[n];
  return P;
}

// Right-hand side of the velocity system at one stage.
Eigen::VectorXd velocity_load(const FrozenSample& s, const Field& rho0, const PhysParams& p, const BasisSet& b,
                              const Quadrature& q, const VelocityForcing* forcing, double t) {
  const int N = b.velocity_size();
  const Field P = pressure_field(rho0, s, p);
  Eigen::VectorXd F = Eigen::VectorXd::Zero(3 * N);
  const Field body = forcing && forcing->body ? forcing->body(t) : Field(rho0.grid(), 3);
  const Field traction = forcing && forcing->traction ? forcing->traction(t) : Field(rho0.grid(), 3);
  for (int i = 0; i < 3; ++i) {
    Eigen::VectorXd Fi = linear_form(body.component(i), b, BasisKind::velocity, -1, q.w3, q);
    Fi += linear_form(traction.component(i), b, BasisKind::velocity, -1, q.faces, q);
    for (int r = 0; r < 3; ++r) {
      const Field g = s.defm.a.extract(3 * r + i) * P;
      Fi += linear_form(g.component(0), b, BasisKind::velocity, r, q.w3, q);
    }
    F.segment(static_cast<Eigen::Index>(i) * N, N) = Fi;
  }
  return F;
}

void check_solution(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu, const Eigen::VectorXd& x, int step) {
  const double rc = lu.rcond();
  if (!(rc > 1e-15) || !x.allFinite())
    throw LinearSolveFailure("step " + std::to_string(step) + " system is singular (rcond " + std::to_string(rc) + ")");
}

void require_matching_grid(const TimeGrid& a, const TimeGrid& b) {
  if (a.n_steps != b.n_steps || a.T != b.T || a.scheme != b.scheme)
    throw GridMismatch("time grid differs from the frozen coefficients");
}

const FrozenSample& stage_sample(const FrozenCoefficients& f, int n) {
  return f.tg.scheme == Scheme::crank_nicolson ? f.mids[n] : f.steps[n + 1];
}
double stage_time(const TimeGrid& tg, int n) {
  return tg.scheme == Scheme::crank_nicolson ? 0.5 * (tg.time(n) + tg.time(n + 1)) : tg.time(n + 1);
}
double stage_theta(const TimeGrid& tg) { return tg.scheme == Scheme::crank_nicolson ? 0.5 : 1.0; }

Field stage_value(const std::vector<Field>& s, const TimeGrid& tg, int n) {
  return tg.scheme == Scheme::crank_nicolson ? 0.5 * (s[n] + s[n + 1]) : s[n + 1];
}

FrozenSample make_sample(double t, const FlowMap& m, const Field& Theta) {
  Deformation d = compute_deformation(m);
  const AprioriCheck c = check_apriori(d, std::numeric_limits<double>::infinity());
  if (!c.ok)
    throw AprioriViolated("frozen Jacobian leaves [1/2, 3/2] at t = " + std::to_string(t) + " (min " +
                          std::to_string(c.j_min) + ", max " + std::to_string(c.j_max) + ")");
  return FrozenSample{t, m.xi, std::move(d), Theta};
}

}  // namespace

void TimeGrid::validate() const {
  if (!(T > 0.0) || !std::isfinite(T)) throw InvalidParameter("time horizon T must be positive");
  if (n_steps < 1) throw InvalidParameter("n_steps must be at least 1");
}

BasisSet build_basis(const GridSpec& g, BasisOrders m) {
  if (m.m1 < 1 || 2 * m.m1 > g.n1() || m.m2 < 1 || 2 * m.m2 > g.n2())
    throw InvalidResolution("Fourier basis orders must lie in [1, n/2]");
  if (m.m3 < 1 || 2 * m.m3 + 3 > g.n3())
    throw InvalidResolution("x3 basis order must lie in [1, (n3 - 3)/2]");
  RowMat T, dT;
  chebyshev_table(m.m3 + 2, g.x3_nodes(), T, dT);
  RowMat Tv = T.topRows(m.m3), dTv = dT.topRows(m.m3);
  RowMat Tt(m.m3, g.n3()), dTt(m.m3, g.n3());
  for (int n = 0; n < m.m3; ++n) {
    Tt.row(n) = T.row(n + 2) - T.row(n % 2);
    dTt.row(n) = dT.row(n + 2) - dT.row(n % 2);
  }
  return BasisSet{g,
                  m,
                  fourier_family(m.m1, g.x1_nodes()),
                  fourier_family(m.m2, g.x2_nodes()),
                  orthonormal_family(Tv, dTv, g.x3_weights()),
                  orthonormal_family(Tt, dTt, g.x3_weights())};
}

Field synthesize(const BasisSet& b, BasisKind kind, const Eigen::VectorXd& c, int components) {
  const GridSpec& g = b.grid;
  const int m1 = b.m.m1, m2 = b.m.m2, m3 = b.m.m3, N = b.size(kind);
  if (c.size() != static_cast<Eigen::Index>(N) * components) throw GridMismatch("coefficient vector size");
  const Eigen::Map<const RowMat> F1(b.f1.value.data(), m1, g.n1());
  const Eigen::Map<const RowMat> F2(b.f2.value.data(), m2, g.n2());
  const Family1D& h = b.x3_family(kind);
  const Eigen::Map<const RowMat> F3(h.value.data(), m3, g.n3());
  Field out(g, components);
  for (int comp = 0; comp < components; ++comp) {
    const Eigen::Map<const RowMat> D(c.data() + static_cast<Eigen::Index>(comp) * N, m3 * m2, m1);
    const RowMat X1 = D * F1;  // (c3 c2) x n1
    RowMat Z(m3, static_cast<Eigen::Index>(g.n2()) * g.n1());
    for (int c3 = 0; c3 < m3; ++c3) {
      const RowMat Y = F2.transpose() * X1.middleRows(static_cast<Eigen::Index>(c3) * m2, m2);  // n2 x n1
      Z.row(c3) = Eigen::Map<const Eigen::RowVectorXd>(Y.data(), Y.size());
    }
    const RowMat V = F3.transpose() * Z;  // n3 x (n2 n1)
    auto o = out.component(comp);
    std::copy(V.data(), V.data() + V.size(), o.begin());
  }
  return out;
}

Field basis_mode(const BasisSet& b, BasisKind kind, int s) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(b.size(kind));
  c(s) = 1.0;
  return synthesize(b, kind, c, 1);
}

Eigen::VectorXd project(const BasisSet& b, BasisKind kind, const Field& f) {
  require_same_grid(f, Field(b.grid, 1));
  const Quadrature q(b.grid);
  const int N = b.size(kind);
  Eigen::VectorXd out(static_cast<Eigen::Index>(N) * f.components());
  for (int c = 0; c < f.components(); ++c)
    out.segment(static_cast<Eigen::Index>(c) * N, N) = linear_form(f.component(c), b, kind, -1, q.w3, q);
  return out;
}

double min_eigenvalue(const Eigen::MatrixXd& m) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

Eigen::MatrixXd assemble_mass(const Field& rho0, const BasisSet& b, BasisKind kind) {
  const Quadrature q(b.grid);
  Eigen::MatrixXd M = bilinear_form(rho0.component(0), b, kind, -1, kind, -1, q);
  M = 0.5 * (M + M.transpose());
  const double ev = min_eigenvalue(M);
  if (!(ev > 1e-14)) throw SingularMass("mass matrix is not positive definite (min eigenvalue " + std::to_string(ev) + ")");
  return M;
}

Field interpolate_series(const std::vector<Field>& series, const TimeGrid& tg, double t) {
  const int last = static_cast<int>(series.size()) - 1;
  if (last < 0) throw InsufficientHistory("empty series");
  if (last == 0) return series[0];
  const double dt = tg.dt();
  const int count = std::min(4, last + 1);
  const int n = std::clamp(static_cast<int>(std::floor(t / dt)), 0, last);
  const int start = std::clamp(n - (count - 1) / 2, 0, last + 1 - count);
  for (int j = start; j < start + count; ++j)
    if (tg.time(j) == t) return series[j];
  Field out(series[0].grid(), series[0].components());
  for (int j = start; j < start + count; ++j) {
    double w = 1.0;
    for (int k = start; k < start + count; ++k)
      if (k != j) w *= (t - tg.time(k)) / (tg.time(j) - tg.time(k));
    out.add_scaled(w, series[j]);
  }
  return out;
}

FrozenCoefficients freeze(const std::vector<Field>& v_tilde, const std::vector<Field>& Theta_tilde, const TimeGrid& tg) {
  tg.validate();
  const std::size_t n = static_cast<std::size_t>(tg.n_steps) + 1;
  if (v_tilde.size() != n || Theta_tilde.size() != n) throw GridMismatch("frozen series length differs from the time grid");
  const GridSpec& g = v_tilde[0].grid();
  const VelocityEvaluator vel = [&](double t, const Field&) { return interpolate_series(v_tilde, tg, t); };
  FrozenCoefficients f{tg, {}, {}};
  FlowMap m = FlowMap::identity(g);
  f.steps.push_back(make_sample(0.0, m, Theta_tilde[0]));
  const double dt = tg.dt();
  for (int k = 0; k < tg.n_steps; ++k) {
    FlowMap half = advance_flow_map(m, vel, 0.5 * dt);
    const double tm = 0.5 * (tg.time(k) + tg.time(k + 1));
    half.time = tm;
    f.mids.push_back(make_sample(tm, half, interpolate_series(Theta_tilde, tg, tm)));
    m = advance_flow_map(m, vel, dt);
    m.time = tg.time(k + 1);
    f.steps.push_back(make_sample(m.time, m, Theta_tilde[k + 1]));
  }
  return f;
}

VelocityTrajectory solve_velocity(const FrozenCoefficients& frozen, const InitialData& data, const PhysParams& p,
                                  const TimeGrid& tg, const BasisSet& b, const VelocityForcing* forcing) {
  tg.validate();
  require_matching_grid(tg, frozen.tg);
  const Quadrature q(b.grid);
  const Eigen::MatrixXd M = block_diag3(assemble_mass(data.rho0, b, BasisKind::velocity));
  const double dt = tg.dt(), th = stage_theta(tg);
  VelocityTrajectory out;
  out.coeffs.push_back(project(b, BasisKind::velocity, data.u0));
  out.v.push_back(synthesize(b, BasisKind::velocity, out.coeffs.back(), 3));
  for (int n = 0; n < tg.n_steps; ++n) {
    const FrozenSample& s = stage_sample(frozen, n);
    const Eigen::MatrixXd K = velocity_stiffness(s.defm, b, p, q);
    const Eigen::VectorXd F = velocity_load(s, data.rho0, p, b, q, forcing, stage_time(tg, n));
    const Eigen::VectorXd& d = out.coeffs.back();
    const Eigen::VectorXd rhs = M * d - (1.0 - th) * dt * (K * d) + dt * F;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(M + th * dt * K);
    Eigen::VectorXd next = lu.solve(rhs);
    check_solution(lu, next, n + 1);
    out.v.push_back(synthesize(b, BasisKind::velocity, next, 3));
    out.coeffs.push_back(std::move(next));
  }
  return out;
}

TemperatureTrajectory solve_temperature(const VelocityTrajectory& v, const FrozenCoefficients& frozen,
                                        const InitialData& data, const PhysParams& p, const TimeGrid& tg,
                                        const BasisSet& b, const TemperatureForcing* forcing) {
  tg.validate();
  require_matching_grid(tg, frozen.tg);
  if (v.v.size() != static_cast<std::size_t>(tg.n_steps) + 1) throw GridMismatch("velocity trajectory length");
  const Quadrature q(b.grid);
  const GridSpec& g = b.grid;
  const Eigen::MatrixXd M = p.c_v * assemble_mass(data.rho0, b, BasisKind::temperature);
  const double dt = tg.dt(), th = stage_theta(tg);
  const Field zero(g, 1);
  TemperatureTrajectory out;
  out.coeffs.push_back(project(b, BasisKind::temperature, data.theta0));
  out.Theta.push_back(synthesize(b, BasisKind::temperature, out.coeffs.back(), 1));
  for (int n = 0; n < tg.n_steps; ++n) {
    const FrozenSample& s = stage_sample(frozen, n);
    const double t = stage_time(tg, n);
    const Eigen::MatrixXd K = temperature_stiffness(s.defm, b, p.kappa, q);
    // Compression and stress work of the new velocity at the stage; zero
    // temperature switches off the conduction term, which is implicit here.
    Field h = temperature_rhs(stage_value(v.v, tg, n), zero, s.defm, data.rho0, p, &s.Theta);
    if (forcing && forcing->body) h += forcing->body(t);
    const Eigen::VectorXd F = linear_form(h.component(0), b, BasisKind::temperature, -1, q.w3, q);
    const Eigen::VectorXd& d = out.coeffs.back();
    const Eigen::VectorXd rhs = M * d - (1.0 - th) * dt * (K * d) + dt * F;
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(M + th * dt * K);
    Eigen::VectorXd next = lu.solve(rhs);
    check_solution(lu, next, n + 1);
    out.Theta.push_back(synthesize(b, BasisKind::temperature, next, 1));
    out.coeffs.push_back(std::move(next));
  }
  return out;
}

WeakDefect weak_residual(const VelocityTrajectory& v, const TemperatureTrajectory& Theta,
                         const FrozenCoefficients& frozen, const InitialData& data, const PhysParams& p,
                         const TestFunctions& tests, const VelocityForcing* vf, const TemperatureForcing* tf) {
  const TimeGrid& tg = frozen.tg;
  const int steps = tg.n_steps;
  if (v.v.size() != static_cast<std::size_t>(steps) + 1 || Theta.Theta.size() != v.v.size())
    throw GridMismatch("trajectories do not match the time grid");
  const GridSpec& g = data.rho0.grid();
  const Field& rho0 = data.rho0;
  const double dt = tg.dt();
  const Field zero(g, 1);

  std::vector<Field> phi, psi;
  for (int n = 0; n <= steps; ++n) {
    phi.push_back(tests.phi ? tests.phi(tg.time(n)) : Field(g, 3));
    psi.push_back(tests.psi ? tests.psi(tg.time(n)) : Field(g, 1));
  }
  auto dot = [](const Field& x, const Field& y) {
    double s = 0.0;
    for (int c = 0; c < x.components(); ++c) s += integrate(x.extract(c) * y.extract(c));
    return s;
  };

  double dm = dot(rho0 * (v.v[0] - data.u0), phi[0]);
  double dtem = p.c_v * dot(rho0 * (Theta.Theta[0] - data.theta0), psi[0]);
  for (int n = 0; n < steps; ++n) {
    const FrozenSample& s = stage_sample(frozen, n);
    const double t = stage_time(tg, n);
    const Field vs = stage_value(v.v, tg, n), ths = stage_value(Theta.Theta, tg, n);
    const Field phs = stage_value(phi, tg, n), pss = stage_value(psi, tg, n);

    // (rho0 dv, phi) + dt (a^r_j (S^{ij} - P delta^{ij}), phi^i_{,r}) - dt (f, phi) - dt <t, phi>_faces
    double m = dot(rho0 * (v.v[n + 1] - v.v[n]), phs);
    const Field S = stress(vs, s.defm, p);
    const Field P = pressure_field(rho0, s, p);
    const Field Dphi = gradient(phs);
    Field flux(g, 1);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        Field T = S.extract(3 * i + j);
        if (i == j) T -= P;
        for (int r = 0; r < 3; ++r) flux += s.defm.a.extract(3 * r + j) * T * Dphi.extract(3 * i + r);
      }
    m += dt * integrate(flux);
    if (vf && vf->body) m -= dt * dot(vf->body(t), phs);
    if (vf && vf->traction) {
      const Field tr = vf->traction(t);
      for (int i = 0; i < 3; ++i) {
        const Field f = tr.extract(i) * phs.extract(i);
        m -= dt * (integrate_face(f, 0) + integrate_face(f, 1));
      }
    }
    dm += m;

    // c_v (rho0 dTheta, psi) + dt kappa (a^r_i (grad_eta Theta)^i, psi_{,r}) - dt (h + f, psi)
    double e = p.c_v * dot(rho0 * (Theta.Theta[n + 1] - Theta.Theta[n]), pss);
    const Field ge = grad_eta(ths, s.defm);
    const Field Dpsi = gradient(pss);
    Field cond(g, 1);
    for (int r = 0; r < 3; ++r)
      for (int i = 0; i < 3; ++i) cond += s.defm.a.extract(3 * r + i) * ge.extract(i) * Dpsi.extract(r);
    e += dt * p.kappa * integrate(cond);
    Field h = temperature_rhs(vs, zero, s.defm, rho0, p, &s.Theta);
    if (tf && tf->body) h += tf->body(t);
    e -= dt * integrate(h * pss);
    dtem += e;
  }
  return WeakDefect{std::abs(dm), std::abs(dtem)};
}

}  // namespace fbns
