#include "fbns/diagnostics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "fbns/error.hpp"
#include "fbns/norms.hpp"

namespace fbns {
namespace {

Field stencil(const std::vector<Field>& s, std::initializer_list<std::pair<int, double>> terms, double scale) {
  Field out(s[0].grid(), s[0].components());
  for (const auto& [k, c] : terms) out.add_scaled(c * scale, s[k]);
  return out;
}

void require_step(const Trajectory& t, int step) {
  if (step < 0 || step > t.steps()) throw InvalidParameter("step " + std::to_string(step) + " is outside the trajectory");
}

// Time derivatives of one series at `step` (see step_rates).
std::pair<Field, Field> series_rates(const std::vector<Field>& s, const TimeGrid& tg, int step) {
  const int N = tg.n_steps;
  const double dt = tg.dt();
  if (step == 0) {
    if (N < 3) throw InsufficientHistory("forward differences at step 0 need at least 3 steps");
    return {stencil(s, {{0, -1.5}, {1, 2.0}, {2, -0.5}}, 1.0 / dt),
            stencil(s, {{0, 2.0}, {1, -5.0}, {2, 4.0}, {3, -1.0}}, 1.0 / (dt * dt))};
  }
  if (step == 1) {
    if (N < 2) throw InsufficientHistory("central differences at step 1 need at least 2 steps");
    return {stencil(s, {{2, 0.5}, {0, -0.5}}, 1.0 / dt), stencil(s, {{2, 1.0}, {1, -2.0}, {0, 1.0}}, 1.0 / (dt * dt))};
  }
  return {backward_difference(s, tg, step, 1), backward_difference(s, tg, step, 2)};
}

}  // namespace

StepRates step_rates(const Trajectory& t, int step, const DerivedInitials* di) {
  require_step(t, step);
  if (step == 0 && di != nullptr) return StepRates{di->u0t, di->u0tt, di->theta0t, di->theta0tt};
  auto [vt, vtt] = series_rates(t.v, t.tg, step);
  auto [tt, ttt] = series_rates(t.Theta, t.tg, step);
  return StepRates{std::move(vt), std::move(vtt), std::move(tt), std::move(ttt)};
}

EnergyTerms energy_E(const Trajectory& t, int step, const Field& rho0, const DerivedInitials* di) {
  const StepRates r = step_rates(t, step, di);
  EnergyTerms e;
  e.v_tt = sobolev_norm_sq(r.v_tt, 0, &rho0);
  e.v_t = sobolev_norm_sq(r.v_t, 1);
  e.v = sobolev_norm_sq(t.v[step], 3);
  e.theta_tt = sobolev_norm_sq(r.Theta_tt, 0, &rho0);
  e.theta_t = sobolev_norm_sq(r.Theta_t, 1);
  e.theta = sobolev_norm_sq(t.Theta[step], 3);
  return e;
}

DissipationTerms dissipation(const Trajectory& t, int step, const DerivedInitials* di) {
  const StepRates r = step_rates(t, step, di);
  DissipationTerms d;
  d.v_tt = sobolev_norm_sq(r.v_tt, 1);
  d.v_t = sobolev_norm_sq(r.v_t, 3);
  d.dbar_v = sobolev_norm_sq(tangential_gradient(t.v[step]), 3);
  d.theta_tt = sobolev_norm_sq(r.Theta_tt, 1);
  d.theta_t = sobolev_norm_sq(r.Theta_t, 3);
  d.dbar_theta = sobolev_norm_sq(tangential_gradient(t.Theta[step]), 3);
  return d;
}

namespace {

void accumulate(DissipationTerms& acc, const DissipationTerms& d, double w) {
  acc.v_tt += w * d.v_tt;
  acc.v_t += w * d.v_t;
  acc.dbar_v += w * d.dbar_v;
  acc.theta_tt += w * d.theta_tt;
  acc.theta_t += w * d.theta_t;
  acc.dbar_theta += w * d.dbar_theta;
}

}  // namespace

std::vector<EnergyReport> energy_series(const Trajectory& t, const Field& rho0, const DerivedInitials* di) {
  std::vector<EnergyReport> out;
  DissipationTerms acc;
  DissipationTerms prev;
  double M0 = 0.0;
  const double dt = t.tg.dt();
  for (int n = 0; n <= t.steps(); ++n) {
    EnergyReport r;
    r.step = n;
    r.time = t.tg.time(n);
    r.E = energy_E(t, n, rho0, di);
    const DissipationTerms d = dissipation(t, n, di);
    if (n == 0) {
      M0 = 1.0 + r.E.total();
    } else {
      accumulate(acc, prev, 0.5 * dt);
      accumulate(acc, d, 0.5 * dt);
    }
    prev = d;
    r.integrals = acc;
    r.F = r.E.total() + acc.total();
    r.M0 = M0;
    out.push_back(r);
  }
  return out;
}

EnergyReport energy_F(const Trajectory& t, int upto_step, const Field& rho0, const DerivedInitials* di) {
  require_step(t, upto_step);
  DissipationTerms acc;
  const double dt = t.tg.dt();
  DissipationTerms prev = dissipation(t, 0, di);
  for (int n = 1; n <= upto_step; ++n) {
    const DissipationTerms d = dissipation(t, n, di);
    accumulate(acc, prev, 0.5 * dt);
    accumulate(acc, d, 0.5 * dt);
    prev = d;
  }
  EnergyReport r;
  r.step = upto_step;
  r.time = t.tg.time(upto_step);
  r.E = energy_E(t, upto_step, rho0, di);
  r.integrals = acc;
  r.F = r.E.total() + acc.total();
  r.M0 = 1.0 + energy_E(t, 0, rho0, di).total();
  return r;
}

Field eulerian_density(const Field& rho0, const Deformation& d) {
  require_same_grid(rho0, d.J);
  Field rho(rho0.grid(), 1);
  const auto r = rho0.component(0), j = d.J.component(0);
  auto o = rho.component(0);
  for (std::size_t n = 0; n < o.size(); ++n) {
    if (!(j[n] > 0.0)) throw DegenerateJacobian("J = " + std::to_string(j[n]) + " at node " + std::to_string(n));
    o[n] = r[n] / j[n];
  }
  return rho;
}

EntropyField entropy_field(const Field& Theta, const Field& rho, const PhysParams& p, double band) {
  require_same_grid(Theta, rho);
  const GridSpec& g = Theta.grid();
  const auto x3 = g.x3_nodes();
  EntropyField e{Field(g, 1), band, std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), 0};
  const double c = p.R / (p.gamma - 1.0);
  for (int i3 = 1; i3 + 1 < g.n3(); ++i3) {
    const double d = x3[i3] * (1.0 - x3[i3]);
    for (int i2 = 0; i2 < g.n2(); ++i2)
      for (int i1 = 0; i1 < g.n1(); ++i1) {
        const double th = Theta.at(0, i3, i2, i1), r = rho.at(0, i3, i2, i1);
        if (!(th > 0.0) || !(r > 0.0))
          throw NonPositiveState("Theta = " + std::to_string(th) + ", rho = " + std::to_string(r) + " at interior node (" +
                                 std::to_string(i3) + ", " + std::to_string(i2) + ", " + std::to_string(i1) + ")");
        const double s = c * std::log(p.R * th / (p.A_bar * std::pow(r, p.gamma - 1.0)));
        e.S.at(0, i3, i2, i1) = s;
        if (d < band) {
          e.band_min = std::min(e.band_min, s);
          e.band_max = std::max(e.band_max, s);
          ++e.band_nodes;
        }
      }
  }
  if (e.band_nodes == 0) e.band_min = e.band_max = 0.0;
  return e;
}

VacuumMonitor vacuum_boundary_monitor(const Field& Theta) {
  const NormalDerivativeRecord n = normal_derivative(Theta);
  return VacuumMonitor{n.min, n.max, !n.finite || n.max >= 0.0};
}

std::vector<double> hardy_nodes(int n) {
  std::vector<double> s(n);
  for (int j = 0; j < n; ++j) s[j] = 0.5 * (1.0 - std::cos(std::numbers::pi * j / (n - 1)));
  s.front() = 0.0;
  s.back() = 1.0;
  return s;
}

namespace {

// Gauss-Jacobi rule for int_0^1 s^beta f(s) ds (Golub-Welsch on the monic
// Jacobi recurrence with weight (1 + x)^beta on [-1, 1]).
void gauss_jacobi(int n, double beta, std::vector<double>& nodes, std::vector<double>& weights) {
  const double a = 0.0, b = beta;
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    T(k, k) = k == 0 ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (s * (s + 2.0));
    if (k + 1 < n) {
      const double m = k + 1.0, sm = 2.0 * m + a + b;
      const double bk = 4.0 * m * (m + a) * (m + b) * (m + a + b) / (sm * sm * (sm + 1.0) * (sm - 1.0));
      T(k, k + 1) = T(k + 1, k) = std::sqrt(bk);
    }
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  const double mu0 = std::pow(2.0, a + b + 1.0) * std::tgamma(a + 1.0) * std::tgamma(b + 1.0) / std::tgamma(a + b + 2.0);
  nodes.resize(n);
  weights.resize(n);
  const double scale = std::pow(2.0, -b - 1.0);
  for (int k = 0; k < n; ++k) {
    nodes[k] = 0.5 * (1.0 + es.eigenvalues()(k));
    weights[k] = scale * mu0 * es.eigenvectors()(0, k) * es.eigenvectors()(0, k);
  }
}

// Chebyshev interpolant on [0, 1] through Lobatto samples.
struct ChebInterpolant {
  std::vector<double> c;
  explicit ChebInterpolant(const std::vector<double>& g) {
    const int n = static_cast<int>(g.size()) - 1;
    c.assign(n + 1, 0.0);
    // Samples are ordered from s = 0, i.e. y = 2 s - 1 = -cos(pi j / n).
    for (int k = 0; k <= n; ++k) {
      double sum = 0.0;
      for (int j = 0; j <= n; ++j) {
        const double w = (j == 0 || j == n) ? 0.5 : 1.0;
        sum += w * g[j] * std::cos(std::numbers::pi * k * (n - j) / n);
      }
      c[k] = sum * 2.0 / n * ((k == 0 || k == n) ? 0.5 : 1.0);
    }
  }
  // Value and d/ds at s.
  std::pair<double, double> operator()(double s) const {
    const double y = 2 * s - 1;
    double t0 = 1.0, t1 = y, d0 = 0.0, d1 = 1.0;
    double v = c[0], dv = 0.0;
    if (c.size() > 1) {
      v += c[1] * y;
      dv += c[1];
    }
    for (std::size_t k = 2; k < c.size(); ++k) {
      const double t2 = 2 * y * t1 - t0, d2 = 2 * t1 + 2 * y * d1 - d0;
      v += c[k] * t2;
      dv += c[k] * d2;
      t0 = t1;
      t1 = t2;
      d0 = d1;
      d1 = d2;
    }
    return {v, 2.0 * dv};
  }
};

}  // namespace

InequalityRatio hardy_check(const std::vector<double>& g, double k) {
  if (k == 1.0 || !(k > -1.0)) throw UnsupportedExponent("Hardy check needs k != 1 and k > -1, got " + std::to_string(k));
  if (g.size() < 2) throw InvalidParameter("Hardy check needs at least two samples");
  const ChebInterpolant f(g);
  const int nq = static_cast<int>(g.size()) + 4;
  std::vector<double> s, w;
  InequalityRatio r;
  if (k > 1.0) {
    gauss_jacobi(nq, k - 2.0, s, w);
    for (int q = 0; q < nq; ++q) r.lhs += w[q] * std::pow(f(s[q]).first, 2);
    gauss_jacobi(nq, k, s, w);
    for (int q = 0; q < nq; ++q) {
      const auto [v, dv] = f(s[q]);
      r.rhs += w[q] * (v * v + dv * dv);
    }
  } else {
    // (g - g(0))^2 s^{k-2} = s^k h^2 with the polynomial h = (g - g(0)) / s.
    const double g0 = f(0.0).first;
    gauss_jacobi(nq, k, s, w);
    for (int q = 0; q < nq; ++q) {
      const auto [v, dv] = f(s[q]);
      const double h = (v - g0) / s[q];
      r.lhs += w[q] * h * h;
      r.rhs += w[q] * dv * dv;
    }
  }
  r.ratio = r.lhs / r.rhs;
  return r;
}

InequalityRatio korn_check(const Field& v, bool weighted, const Field* rho0) {
  if (v.components() != 3) throw InvalidParameter("Korn check needs a 3-component field");
  if (weighted && rho0 == nullptr) throw InvalidParameter("weighted Korn check needs rho0");
  const Field G = gradient(v);
  Field sym(v.grid(), 1);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const Field e = G.extract(3 * i + j) + G.extract(3 * j + i);
      sym += e * e;
    }
  InequalityRatio r;
  r.lhs = sobolev_norm_sq(v, 1);
  r.rhs = integrate(sym) + sobolev_norm_sq(v, 0, weighted ? rho0 : nullptr);
  r.ratio = r.lhs / r.rhs;
  return r;
}

SmoothRandomField::SmoothRandomField(unsigned seed, int components, int terms) : components_(components) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> kd(-2, 2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int c = 0; c < components; ++c)
    for (int q = 0; q < terms; ++q) {
      Term t{c, kd(rng), kd(rng), u(rng), std::numbers::pi * u(rng), {u(rng), u(rng), u(rng), u(rng)}};
      terms_.push_back(t);
    }
}

double SmoothRandomField::value(int c, double x1, double x2, double x3) const {
  double s = 0.0;
  for (const Term& t : terms_) {
    if (t.comp != c) continue;
    const double poly = t.p[0] + x3 * (t.p[1] + x3 * (t.p[2] + x3 * t.p[3]));
    s += t.amp * std::sin(2 * std::numbers::pi * (t.k1 * x1 + t.k2 * x2) + t.phase) * poly;
  }
  return s;
}

double SmoothRandomField::derivative(int c, int axis, double x1, double x2, double x3) const {
  double s = 0.0;
  for (const Term& t : terms_) {
    if (t.comp != c) continue;
    const double arg = 2 * std::numbers::pi * (t.k1 * x1 + t.k2 * x2) + t.phase;
    const double poly = t.p[0] + x3 * (t.p[1] + x3 * (t.p[2] + x3 * t.p[3]));
    if (axis == 2) {
      s += t.amp * std::sin(arg) * (t.p[1] + x3 * (2 * t.p[2] + 3 * x3 * t.p[3]));
    } else {
      const int k = axis == 0 ? t.k1 : t.k2;
      s += t.amp * 2 * std::numbers::pi * k * std::cos(arg) * poly;
    }
  }
  return s;
}

Field SmoothRandomField::sample(const GridSpec& g) const {
  return Field::sample(g, components_, [this](int c, double x1, double x2, double x3) { return value(c, x1, x2, x3); });
}

std::vector<double> random_polynomial(unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n;
  std::vector<double> c(6);
  for (double& x : c) x = n(rng);
  return c;
}

double eval_polynomial(const std::vector<double>& c, double s) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * s + *it;
  return v;
}

}  // namespace fbns
