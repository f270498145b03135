#include "fbns/picard.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "fbns/error.hpp"
#include "fbns/norms.hpp"
#include "fbns/parallel.hpp"

namespace fbns {
namespace {

Field combine(const std::vector<Field>& s, int n, std::initializer_list<double> w, double scale) {
  Field out(s[n].grid(), s[n].components());
  int k = n;
  for (double c : w) out.add_scaled(c * scale, s[k--]);
  return out;
}

double weighted_sq(const Field& f, const Field& rho0) { return sobolev_norm_sq(f, 0, &rho0); }

void require_same_time_grid(const TimeGrid& a, const TimeGrid& b) {
  if (a.n_steps != b.n_steps || a.T != b.T) throw GridMismatch("trajectories live on different time grids");
}

// J_t at step n of the flow of the interpolated velocity, by one-sided
// second-order differences over sub-steps inside [t_n, t_n+1] (where the
// interpolant is a single cubic), Richardson-extrapolated.
Field flow_jacobian_rate(const Trajectory& t, int n) {
  const VelocityEvaluator vel = [&](double s, const Field&) { return interpolate_series(t.v, t.tg, s); };
  const FlowMap m0{t.xi[n], t.tg.time(n)};
  auto rate = [&](double h) {
    const FlowMap m1 = advance_flow_map(m0, vel, h);
    const FlowMap m2 = advance_flow_map(m1, vel, h);
    Field d = (-1.5 / h) * t.defm[n].J;
    d.add_scaled(2.0 / h, compute_deformation(m1).J);
    d.add_scaled(-0.5 / h, compute_deformation(m2).J);
    return d;
  };
  const double h = t.tg.dt() / 8;
  const Field coarse = rate(h), fine = rate(h / 2);
  return (4.0 / 3.0) * fine - (1.0 / 3.0) * coarse;
}

}  // namespace

StateSlice Trajectory::slice(int n) const { return StateSlice{v[n], Theta[n], defm[n], tg.time(n)}; }

Field backward_difference(const std::vector<Field>& s, const TimeGrid& tg, int n, int derivative) {
  const double dt = tg.dt();
  if (derivative == 1) {
    if (n >= 2) return combine(s, n, {1.5, -2.0, 0.5}, 1.0 / dt);
    if (n == 1) return combine(s, n, {1.0, -1.0}, 1.0 / dt);
  } else if (derivative == 2) {
    if (n >= 3) return combine(s, n, {2.0, -5.0, 4.0, -1.0}, 1.0 / (dt * dt));
    if (n == 2) return combine(s, n, {1.0, -2.0, 1.0}, 1.0 / (dt * dt));
  } else {
    throw InvalidParameter("backward differences cover first and second derivatives only");
  }
  throw InsufficientHistory("step " + std::to_string(n) + " has too few predecessors for a derivative of order " +
                            std::to_string(derivative));
}

Field Trajectory::v_t(int n) const { return backward_difference(v, tg, n, 1); }
Field Trajectory::v_tt(int n) const { return backward_difference(v, tg, n, 2); }
Field Trajectory::Theta_t(int n) const { return backward_difference(Theta, tg, n, 1); }
Field Trajectory::Theta_tt(int n) const { return backward_difference(Theta, tg, n, 2); }
Field Trajectory::J_t(int n) const {
  std::vector<Field> J;
  for (int k = std::max(0, n - 2); k <= n; ++k) J.push_back(defm[k].J);
  return backward_difference(J, tg, static_cast<int>(J.size()) - 1, 1);
}

Trajectory make_trajectory(const TimeGrid& tg, std::vector<Field> v, std::vector<Field> Theta) {
  tg.validate();
  const std::size_t n = static_cast<std::size_t>(tg.n_steps) + 1;
  if (v.size() != n || Theta.size() != n) throw GridMismatch("series length differs from the time grid");
  Trajectory t{tg, {}, std::move(v), std::move(Theta), {}};
  const VelocityEvaluator vel = [&](double s, const Field&) { return interpolate_series(t.v, tg, s); };
  FlowMap m = FlowMap::identity(t.v[0].grid());
  t.xi.push_back(m.xi);
  t.defm.push_back(compute_deformation(m));
  for (int k = 0; k < tg.n_steps; ++k) {
    m = advance_flow_map(m, vel, tg.dt());
    m.time = tg.time(k + 1);
    t.xi.push_back(m.xi);
    t.defm.push_back(compute_deformation(m));
  }
  return t;
}

Trajectory initial_iterate(const InitialData& data, const TimeGrid& tg) {
  const std::size_t n = static_cast<std::size_t>(tg.n_steps) + 1;
  return make_trajectory(tg, std::vector<Field>(n, data.u0), std::vector<Field>(n, data.theta0));
}

void require_apriori(const Trajectory& t) {
  for (int n = 0; n <= t.steps(); ++n) {
    const AprioriCheck c = check_apriori(t.defm[n]);
    if (!c.ok)
      throw AprioriViolated("step " + std::to_string(n) + ": J in [" + std::to_string(c.j_min) + ", " +
                            std::to_string(c.j_max) + "], |D eta| " + std::to_string(c.deta_max));
  }
}

Trajectory apply_Xi(const Trajectory& input, const InitialData& data, const PhysParams& p, const BasisSet& b) {
  require_apriori(input);
  const FrozenCoefficients frozen = freeze(input.v, input.Theta, input.tg);
  const VelocityTrajectory v = solve_velocity(frozen, data, p, input.tg, b);
  const TemperatureTrajectory th = solve_temperature(v, frozen, data, p, input.tg, b);
  std::vector<Field> vs = v.v, ts = th.Theta;
  vs[0] = data.u0;
  ts[0] = data.theta0;
  return make_trajectory(input.tg, std::move(vs), std::move(ts));
}

double vt_distance(const Trajectory& t1, const Trajectory& t2, const Field& rho0) {
  require_same_time_grid(t1.tg, t2.tg);
  const int N = t1.steps();
  if (t1.v.size() != t2.v.size()) throw GridMismatch("trajectories hold different step counts");
  double sup = 0.0, integral = 0.0;
  for (int n = 0; n <= N; ++n) {
    const Field dv = t1.v[n] - t2.v[n], dth = t1.Theta[n] - t2.Theta[n];
    sup = std::max(sup, weighted_sq(dv, rho0) + weighted_sq(dth, rho0));
    const double w = (n == 0 || n == N) ? 0.5 : 1.0;
    integral += w * t1.tg.dt() * (sobolev_norm_sq(dv, 1) + sobolev_norm_sq(dth, 1));
  }
  return std::sqrt(sup + integral);
}

void measure_residuals(const Trajectory& t, const InitialData& data, const PhysParams& p, const BasisSet& b,
                       IterationReport& r) {
  r.apriori.clear();
  for (int n = 0; n <= t.steps(); ++n) r.apriori.push_back({n, check_apriori(t.defm[n])});
  r.momentum_residual = r.temperature_residual = r.kinematic_residual = 0.0;
  for (int n = 2; n <= t.steps(); ++n) {
    const StateSlice s = t.slice(n);
    r.momentum_residual = std::max(r.momentum_residual, momentum_residual(s, t.v_t(n), data.rho0, p).max_abs());
    r.temperature_residual =
        std::max(r.temperature_residual, temperature_residual(s, t.Theta_t(n), data.rho0, p).max_abs());
  }
  for (int n = 1; n < t.steps(); ++n) {
    const Field jt = flow_jacobian_rate(t, n) - cofactor_contract(t.defm[n].a, gradient(t.v[n]));
    r.kinematic_residual = std::max(r.kinematic_residual, jt.max_abs());
  }

  const FrozenCoefficients frozen = freeze(t.v, t.Theta, t.tg);
  VelocityTrajectory v;
  v.v = t.v;
  TemperatureTrajectory th;
  th.Theta = t.Theta;
  r.weak_momentum_residual = r.weak_temperature_residual = 0.0;
  const int modes = std::min(4, b.velocity_size());
  for (int s = 0; s < modes; ++s)
    for (int c = 0; c < 3; ++c) {
      Field phi(b.grid, 3);
      phi.assign(c, basis_mode(b, BasisKind::velocity, s));
      const Field psi = basis_mode(b, BasisKind::temperature, s);
      const TestFunctions tests{[&](double) { return phi; }, [&](double) { return psi; }};
      const WeakDefect d = weak_residual(v, th, frozen, data, p, tests);
      r.weak_momentum_residual = std::max(r.weak_momentum_residual, d.momentum);
      r.weak_temperature_residual = std::max(r.weak_temperature_residual, d.temperature);
    }
}

FixedPointResult iterate_to_fixed_point(const InitialData& data, const PhysParams& p, const BasisSet& b,
                                        const TimeGrid& tg, double tol, int max_iter) {
  if (!(tol > 0.0)) throw InvalidParameter("tolerance must be positive");
  if (max_iter < 1) throw InvalidParameter("max_iter must be at least 1");
  Trajectory x = initial_iterate(data, tg);
  IterationReport rep;
  int above = 0;
  for (int k = 0; k < max_iter; ++k) {
    Trajectory next = [&] {
      if (k == 0) return apply_Xi(x, data, p, b);
      try {
        return apply_Xi(x, data, p, b);
      } catch (const AprioriViolated& e) {
        throw NonContraction("iterate " + std::to_string(k) + " left the a priori ball (" + e.what() +
                             ") at T = " + std::to_string(tg.T) + "; Xi contracts only for small enough T, so reduce the horizon");
      }
    }();
    const double d = vt_distance(next, x, data.rho0);
    rep.distances.push_back(d);
    rep.iterations = k + 1;
    x = std::move(next);
    if (rep.distances.size() >= 2) {
      const double prev = rep.distances[rep.distances.size() - 2];
      const double ratio = prev > 0.0 ? d / prev : 0.0;
      rep.ratios.push_back(ratio);
      above = ratio >= 1.0 ? above + 1 : 0;
      if (above >= 2)
        throw NonContraction("V_T distance ratios " + std::to_string(rep.ratios[rep.ratios.size() - 2]) + ", " +
                             std::to_string(ratio) + " at T = " + std::to_string(tg.T) +
                             "; Xi contracts only for small enough T, so reduce the horizon");
    }
    if (d <= tol) {
      rep.converged = true;
      measure_residuals(x, data, p, b, rep);
      return FixedPointResult{std::move(x), std::move(rep)};
    }
  }
  throw MaxIterExceeded("V_T distance " + std::to_string(rep.distances.back()) + " after " + std::to_string(max_iter) +
                        " iterations (tolerance " + std::to_string(tol) + ")");
}

std::vector<ContractionRow> contraction_study(const InitialData& data, const PhysParams& p, const BasisSet& b,
                                              const std::vector<double>& horizons, const ContractionOptions& opt) {
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    if (!(horizons[i] > 0.0)) throw InvalidParameter("horizons must be positive");
    if (i > 0 && horizons[i] < horizons[i - 1]) throw InvalidParameter("horizons must be sorted");
  }
  if (opt.pairs < 1) throw InvalidParameter("pairs must be at least 1");

  // The same spatial perturbations at every horizon, drawn once from the seed
  // and ramped in from zero so that both members keep the initial data.
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal;
  auto draw = [&](BasisKind kind, int comps) {
    Eigen::VectorXd c(static_cast<Eigen::Index>(b.size(kind)) * comps);
    const int N = b.size(kind);
    for (Eigen::Index q = 0; q < c.size(); ++q) {
      const ModeIndex mi = b.mode(static_cast<int>(q % N));
      const double k1 = (mi.j1 + 1) / 2, k2 = (mi.j2 + 1) / 2;
      c(q) = normal(rng) * std::pow(1.0 + k1 * k1 + k2 * k2 + mi.j3 * mi.j3, -opt.decay);
    }
    Field f = synthesize(b, kind, c, comps);
    const double m = f.max_abs();
    if (m > 0.0) f *= opt.amplitude / m;
    return f;
  };
  struct Perturbation {
    Field v, Theta;
  };
  std::vector<std::array<Perturbation, 2>> pert;
  for (int k = 0; k < opt.pairs; ++k) {
    Perturbation a{draw(BasisKind::velocity, 3), draw(BasisKind::temperature, 1)};
    Perturbation c{draw(BasisKind::velocity, 3), draw(BasisKind::temperature, 1)};
    pert.push_back({a, c});
  }

  std::vector<ContractionRow> rows(horizons.size());
  parallel_for(horizons.size(), [&](std::size_t h) {
    const TimeGrid tg{horizons[h], opt.n_steps, opt.scheme};
    const Trajectory x0 = initial_iterate(data, tg);
    auto perturbed = [&](const Perturbation& q) {
      std::vector<Field> v = x0.v, th = x0.Theta;
      for (int n = 0; n <= tg.n_steps; ++n) {
        const double ramp = tg.time(n) / tg.T;
        v[n].add_scaled(ramp, q.v);
        th[n].add_scaled(ramp, q.Theta);
      }
      return make_trajectory(tg, std::move(v), std::move(th));
    };
    ContractionRow row{horizons[h], std::nullopt, 0.0, 0.0};
    double sum = 0.0;
    int used = 0;
    for (const auto& pr : pert) {
      const Trajectory x1 = perturbed(pr[0]), x2 = perturbed(pr[1]);
      const double din = vt_distance(x1, x2, data.rho0);
      if (din == 0.0) continue;
      const double dout = vt_distance(apply_Xi(x1, data, p, b), apply_Xi(x2, data, p, b), data.rho0);
      row.input_distance += din;
      row.output_distance += dout;
      sum += dout / din;
      ++used;
    }
    if (used > 0) {
      row.ratio = sum / used;
      row.input_distance /= used;
      row.output_distance /= used;
    }
    rows[h] = row;
  });
  return rows;
}

}  // namespace fbns
