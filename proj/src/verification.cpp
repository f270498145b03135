#include "fbns/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "fbns/kinematics.hpp"
#include "fbns/operators.hpp"

namespace fbns {
namespace {

constexpr double pi = std::numbers::pi;

double l2(const Field& f) {
  double s = 0.0;
  for (int c = 0; c < f.components(); ++c) s += integrate(f.extract(c) * f.extract(c));
  return std::sqrt(s);
}

FrozenCoefficients at_rest(const GridSpec& g, const TimeGrid& tg) {
  const std::size_t n = static_cast<std::size_t>(tg.n_steps) + 1;
  return freeze(std::vector<Field>(n, Field(g, 3)), std::vector<Field>(n, Field(g, 1)), tg);
}

// Largest |d f^c / d x_k| of a random field over the grid nodes.
double max_gradient(const SmoothRandomField& f, const GridSpec& g, int comps) {
  double m = 0.0;
  for (double x3 : g.x3_nodes())
    for (double x2 : g.x2_nodes())
      for (double x1 : g.x1_nodes())
        for (int c = 0; c < comps; ++c)
          for (int k = 0; k < 3; ++k) m = std::max(m, std::abs(f.derivative(c, k, x1, x2, x3)));
  return m;
}

double order_from(const std::vector<Field>& u) {
  return std::log2(l2(u[0] - u[1]) / l2(u[1] - u[2]));
}

}  // namespace

PiolaStudy piola_study(const GridSpec& g, int maps, double amplitude, unsigned seed) {
  const auto start = std::chrono::steady_clock::now();
  PiolaStudy r;
  r.maps = maps;
  for (int q = 0; q < maps; ++q) {
    const SmoothRandomField f(seed + static_cast<unsigned>(q), 3);
    const double scale = amplitude / max_gradient(f, g, 3);
    const Field xi = scale * f.sample(g);
    const Deformation d = compute_deformation(FlowMap{xi, 0.0});
    r.piola_max = std::max(r.piola_max, piola_residual(d).max_abs());
    const auto x1 = g.x1_nodes(), x2 = g.x2_nodes(), x3 = g.x3_nodes();
    for (int i3 = 0; i3 < g.n3(); ++i3)
      for (int i2 = 0; i2 < g.n2(); ++i2)
        for (int i1 = 0; i1 < g.n1(); ++i1) {
          double F[3][3];
          for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 3; ++k) F[i][k] = (i == k ? 1.0 : 0.0) + scale * f.derivative(i, k, x1[i1], x2[i2], x3[i3]);
          for (int k = 0; k < 3; ++k)
            for (int i = 0; i < 3; ++i) {
              const int i1p = (i + 1) % 3, i2p = (i + 2) % 3, k1p = (k + 1) % 3, k2p = (k + 2) % 3;
              const double cof = F[i1p][k1p] * F[i2p][k2p] - F[i1p][k2p] * F[i2p][k1p];
              r.cofactor_max = std::max(r.cofactor_max, std::abs(d.a.at(3 * k + i, i3, i2, i1) - cof));
            }
        }
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

double kinematic_study(const GridSpec& g, double T, int steps, unsigned seed, double amplitude) {
  const SmoothRandomField f(seed, 3);
  const Field V = (amplitude / max_gradient(f, g, 3)) * f.sample(g);
  const VelocityEvaluator vel = [&](double t, const Field&) { return (1.0 + t) * V; };
  const double dt = T / steps;
  auto central = [&](const FlowMap& m, double h) {
    Field d = (0.5 / h) * compute_deformation(advance_flow_map(m, vel, h)).J;
    d.add_scaled(-0.5 / h, compute_deformation(advance_flow_map(m, vel, -h)).J);
    return d;
  };
  FlowMap m = FlowMap::identity(g);
  double worst = 0.0;
  for (int n = 1; n <= steps; ++n) {
    m = advance_flow_map(m, vel, dt);
    const double h = dt / 8;
    const Field jt = (4.0 / 3.0) * central(m, h / 2) - (1.0 / 3.0) * central(m, h);
    const Field av = cofactor_contract(compute_deformation(m).a, gradient(vel(m.time, m.xi)));
    worst = std::max(worst, (jt - av).max_abs());
  }
  return worst;
}

double heat_mode_error(const GridSpec& g, const BasisOrders& m, const PhysParams& p, double T, int steps) {
  const BasisSet b = build_basis(g, m);
  const Field mode = Field::sample(g, [](double, double, double x3) { return std::sin(pi * x3); });
  const InitialData data{Field::constant(g, 1, 1.0), Field(g, 3), mode, 1.0};
  const TimeGrid tg{T, steps, Scheme::crank_nicolson};
  VelocityTrajectory v;
  v.v.assign(static_cast<std::size_t>(steps) + 1, Field(g, 3));
  const TemperatureTrajectory t = solve_temperature(v, at_rest(g, tg), data, p, tg, b);
  const Field exact = std::exp(-p.kappa * pi * pi * T / p.c_v) * mode;
  return l2(t.Theta.back() - exact) / l2(exact);
}

ConvergenceStudy manufactured_velocity(const ConvergenceSetup& s, const PhysParams& p) {
  const GridSpec& g = s.grid;
  const double mu = p.mu, la = p.lambda;
  auto exact = [&](double t) {
    return Field::sample(g, 3, [=](int c, double x1, double, double x3) {
      if (c == 0) return std::exp(-t) * std::cos(2 * pi * x1) * std::sin(x3);
      if (c == 2) return std::exp(-t) * std::cos(x3);
      return 0.0;
    });
  };
  VelocityForcing f;
  // rho0 v*_t - div S[v*].
  f.body = [&](double t) {
    return Field::sample(g, 3, [=](int c, double x1, double, double x3) {
      const double e = std::exp(-t), cs = std::cos(2 * pi * x1), sn = std::sin(2 * pi * x1);
      const double s3 = std::sin(x3), c3 = std::cos(x3);
      if (c == 0) {
        const double div_s = mu * (-4 * pi * pi - 1) * cs * s3 + (mu + la) * (-4 * pi * pi * cs * s3);
        return -e * cs * s3 - e * div_s;
      }
      if (c == 2) {
        const double div_s = -mu * c3 + (mu + la) * (-2 * pi * sn * c3 - c3);
        return -e * c3 - e * div_s;
      }
      return 0.0;
    });
  };
  // n3 (S^{13}, S^{23}, S^{33}).
  f.traction = [&](double t) {
    return Field::sample(g, 3, [=](int c, double x1, double, double x3) {
      const double e = std::exp(-t), n3 = x3 > 0.5 ? 1.0 : -1.0;
      const double s3 = std::sin(x3), c3 = std::cos(x3);
      const double div = -2 * pi * std::sin(2 * pi * x1) * s3 - s3;
      if (c == 0) return n3 * e * mu * std::cos(2 * pi * x1) * c3;
      if (c == 2) return n3 * e * (-2 * mu * s3 + la * div);
      return 0.0;
    });
  };
  const InitialData data{Field::constant(g, 1, 1.0), exact(0.0), Field(g, 1), 1.0};
  auto solve = [&](int m, int steps) {
    const TimeGrid tg{s.T, steps, Scheme::crank_nicolson};
    return solve_velocity(at_rest(g, tg), data, p, tg, build_basis(g, m), &f).v.back();
  };
  ConvergenceStudy r;
  std::vector<Field> u;
  for (int k : {1, 2, 4}) u.push_back(solve(s.m_low, k * s.coarse_steps));
  r.temporal_order = order_from(u);
  const Field ex = exact(s.T);
  r.error_low = l2(solve(s.m_low, s.fine_steps) - ex);
  r.error_high = l2(solve(s.m_high, s.fine_steps) - ex);
  return r;
}

ConvergenceStudy manufactured_temperature(const ConvergenceSetup& s, const PhysParams& p) {
  const GridSpec& g = s.grid;
  auto exact = [&](double t) {
    return Field::sample(g, [=](double, double x2, double x3) {
      return std::exp(-t) * std::sin(pi * x3) * (1 + 0.5 * std::cos(2 * pi * x2));
    });
  };
  TemperatureForcing f;
  // c_v rho0 Theta*_t - kappa Lap Theta*.
  f.body = [&](double t) {
    const double cv = p.c_v, ka = p.kappa;
    return Field::sample(g, [=](double, double x2, double x3) {
      const double e = std::exp(-t), sp = std::sin(pi * x3), c2 = std::cos(2 * pi * x2);
      const double th = e * sp * (1 + 0.5 * c2);
      const double lap = e * (-pi * pi * sp * (1 + 0.5 * c2) - 2 * pi * pi * sp * c2);
      return -cv * th - ka * lap;
    });
  };
  const InitialData data{Field::constant(g, 1, 1.0), Field(g, 3), exact(0.0), 1.0};
  auto solve = [&](int m, int steps) {
    const TimeGrid tg{s.T, steps, Scheme::crank_nicolson};
    VelocityTrajectory v;
    v.v.assign(static_cast<std::size_t>(steps) + 1, Field(g, 3));
    return solve_temperature(v, at_rest(g, tg), data, p, tg, build_basis(g, m), &f).Theta.back();
  };
  ConvergenceStudy r;
  std::vector<Field> u;
  for (int k : {1, 2, 4}) u.push_back(solve(s.m_low, k * s.coarse_steps));
  r.temporal_order = order_from(u);
  const Field ex = exact(s.T);
  r.error_low = l2(solve(s.m_low, s.fine_steps) - ex);
  r.error_high = l2(solve(s.m_high, s.fine_steps) - ex);
  return r;
}

InequalitySweep inequality_sweep(int n3, int fields, unsigned seed) {
  InequalitySweep r;
  const auto s = hardy_nodes(n3);
  std::vector<double> g(s.size());
  const GridSpec grid = make_grid(8, 8, n3);
  const Field rho0 = distance_function(grid);
  for (int q = 0; q < fields; ++q) {
    const auto c = random_polynomial(seed + static_cast<unsigned>(q));
    for (std::size_t j = 0; j < s.size(); ++j) g[j] = eval_polynomial(c, s[j]);
    r.hardy_k2 = std::max(r.hardy_k2, hardy_check(g, 2.0).ratio);
    r.hardy_k_half = std::max(r.hardy_k_half, hardy_check(g, 0.5).ratio);
    const Field v = SmoothRandomField(seed + static_cast<unsigned>(q), 3).sample(grid);
    r.korn = std::max(r.korn, korn_check(v, true, &rho0).ratio);
  }
  return r;
}

}  // namespace fbns
