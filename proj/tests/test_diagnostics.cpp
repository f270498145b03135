#include <gtest/gtest.h>

#include <cmath>

#include "fbns/diagnostics.hpp"
#include "fbns/error.hpp"
#include "fbns/kinematics.hpp"
#include "support.hpp"

using namespace fbns;
using fbns::testing::pi;

namespace {

PhysParams params() {
  PhysParams p;
  p.gamma = 2.0;
  return p;
}

// v = q(t) f, Theta = q(t) h with q(t) = 1 + t + t^2.
Trajectory quadratic_in_time(const GridSpec& g, const TimeGrid& tg, const Field& f, const Field& h) {
  std::vector<Field> v, th;
  for (int n = 0; n <= tg.n_steps; ++n) {
    const double t = tg.time(n), q = 1 + t + t * t;
    v.push_back(q * f);
    th.push_back(q * h);
  }
  (void)g;
  return make_trajectory(tg, std::move(v), std::move(th));
}

Field smooth_velocity(const GridSpec& g) { return 0.1 * SmoothRandomField(3, 3).sample(g); }

Field smooth_temperature(const GridSpec& g) {
  return Field::sample(g, [](double x1, double, double x3) { return x3 * (1 - x3) * (1 + 0.3 * std::cos(2 * pi * x1)); });
}

// Gauss-Legendre rule on [0, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5)), dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = 0.5 * (1 + z);
    w[i] = 1.0 / ((1 - z * z) * dp * dp);
  }
}

}  // namespace

TEST(StepRates, ExactForQuadraticInTime) {
  const auto g = make_grid(4, 4, 9);
  const TimeGrid tg{0.1, 6, Scheme::crank_nicolson};
  const Field f = smooth_velocity(g), h = smooth_temperature(g);
  const Trajectory t = quadratic_in_time(g, tg, f, h);
  for (int n = 0; n <= 6; ++n) {
    const StepRates r = step_rates(t, n);
    const double s = tg.time(n);
    EXPECT_LE((r.v_t - (1 + 2 * s) * f).max_abs(), 1e-10) << n;
    EXPECT_LE((r.Theta_tt - 2.0 * h).max_abs(), 1e-8) << n;
  }
  EXPECT_THROW(step_rates(t, 7), InvalidParameter);
}

TEST(StepRates, ShortTrajectoriesNeedHistory) {
  const auto g = make_grid(4, 4, 5);
  const TimeGrid tg{0.1, 2, Scheme::crank_nicolson};
  const Trajectory t = quadratic_in_time(g, tg, Field(g, 3), Field(g, 1));
  EXPECT_THROW(step_rates(t, 0), InsufficientHistory);
  EXPECT_NO_THROW(step_rates(t, 1));
}

TEST(Energy, ZeroTrajectoryIsZero) {
  const auto g = make_grid(8, 8, 9);
  const InitialData d = default_dataset(g);
  const TimeGrid tg{0.1, 5, Scheme::crank_nicolson};
  const Trajectory t = quadratic_in_time(g, tg, Field(g, 3), Field(g, 1));
  for (const EnergyReport& r : energy_series(t, d.rho0)) {
    EXPECT_EQ(r.E.total(), 0.0);
    EXPECT_EQ(r.F, 0.0);
    EXPECT_EQ(r.M0, 1.0);
  }
}

TEST(Energy, InitialValueMatchesM0) {
  const auto g = make_grid(8, 8, 17);
  const InitialData d = default_dataset(g);
  const DerivedInitials di = initial_time_derivatives(d, params(), g);
  const TimeGrid tg{0.01, 4, Scheme::crank_nicolson};
  const Trajectory t = initial_iterate(d, tg);
  EXPECT_NEAR(1.0 + energy_E(t, 0, d.rho0, &di).total(), compute_M0(di, d, g), 1e-8);
  const EnergyReport f0 = energy_F(t, 0, d.rho0, &di);
  EXPECT_EQ(f0.F, f0.E.total());
  EXPECT_NEAR(f0.M0, di.M0, 1e-8);
}

TEST(Energy, QuadraticScaling) {
  const auto g = make_grid(8, 8, 13);
  const InitialData d = default_dataset(g);
  const TimeGrid tg{0.2, 5, Scheme::crank_nicolson};
  const Field f = smooth_velocity(g), h = smooth_temperature(g);
  const Trajectory t1 = quadratic_in_time(g, tg, f, h);
  const Trajectory t3 = quadratic_in_time(g, tg, 3.0 * f, 3.0 * h);
  for (int n = 0; n <= 5; ++n) {
    const double e1 = energy_E(t1, n, d.rho0).total(), e3 = energy_E(t3, n, d.rho0).total();
    EXPECT_NEAR(e3 / e1, 9.0, 1e-10);
    EXPECT_NEAR(energy_F(t3, n, d.rho0).F / energy_F(t1, n, d.rho0).F, 9.0, 1e-10);
  }
}

TEST(Energy, SeriesMatchesPointwiseCalls) {
  const auto g = make_grid(8, 8, 13);
  const InitialData d = default_dataset(g);
  const TimeGrid tg{0.2, 5, Scheme::crank_nicolson};
  const Trajectory t = quadratic_in_time(g, tg, smooth_velocity(g), smooth_temperature(g));
  const auto s = energy_series(t, d.rho0);
  ASSERT_EQ(s.size(), 6u);
  double prev = -1.0;
  for (int n = 0; n <= 5; ++n) {
    const EnergyReport r = energy_F(t, n, d.rho0);
    EXPECT_NEAR(s[n].F, r.F, 1e-12 * r.F);
    EXPECT_NEAR(s[n].M0, 1.0 + s[0].E.total(), 1e-14);
    EXPECT_GT(s[n].integrals.total(), prev);
    prev = s[n].integrals.total();
  }
}

TEST(Energy, StableUnderRefinement) {
  const TimeGrid tg{0.2, 5, Scheme::crank_nicolson};
  double e[2], f[2];
  const int n3[2] = {17, 25};
  for (int r = 0; r < 2; ++r) {
    const auto g = make_grid(12, 12, n3[r]);
    const InitialData d = default_dataset(g);
    const Trajectory t = quadratic_in_time(g, tg, smooth_velocity(g), smooth_temperature(g));
    e[r] = energy_E(t, 3, d.rho0).total();
    f[r] = dissipation(t, 3).total();
  }
  EXPECT_NEAR(e[0], e[1], 1e-8 * e[1]);
  EXPECT_NEAR(f[0], f[1], 1e-8 * f[1]);
}

TEST(EulerianDensity, IdentityAndUniformStretch) {
  const auto g = make_grid(6, 6, 9);
  const InitialData d = default_dataset(g);
  const Field rho1 = eulerian_density(d.rho0, compute_deformation(FlowMap::identity(g)));
  EXPECT_LE((rho1 - d.rho0).max_abs(), 1e-14);
  Field D(g, 9);
  D.assign(0, Field::constant(g, 1, 1.0));
  D.assign(4, Field::constant(g, 1, 1.0));
  D.assign(8, Field::constant(g, 1, 2.0));
  const Field rho2 = eulerian_density(d.rho0, deformation_from_gradient(D));
  EXPECT_LE((rho2 - 0.5 * d.rho0).max_abs(), 1e-14);
  D.assign(8, Field::constant(g, 1, -1.0));
  EXPECT_THROW(eulerian_density(d.rho0, deformation_from_gradient(D)), DegenerateJacobian);
}

TEST(Entropy, ReferenceStates) {
  const auto g = make_grid(6, 6, 17);
  const PhysParams p = params();
  const Field rho = Field::sample(g, [](double x1, double, double x3) { return x3 * (1 - x3) * (2 + std::sin(2 * pi * x1)); });
  const EntropyField s0 = entropy_field(rho, rho, p);
  EXPECT_LE(s0.S.max_abs(), 1e-14);
  EXPECT_GT(s0.band_nodes, 0);
  EXPECT_LE(s0.spread(), 1e-14);
  const EntropyField s1 = entropy_field(std::exp(1.0) * rho, rho, p);
  EXPECT_NEAR(s1.band_min, p.R, 1e-13);
  EXPECT_NEAR(s1.band_max, p.R, 1e-13);
}

TEST(Entropy, ScalingInvariance) {
  const auto g = make_grid(6, 6, 17);
  PhysParams p = params();
  p.gamma = 1.4;
  p.R = 0.7;
  p.A_bar = 1.3;
  const Field rho = Field::sample(g, [](double, double x2, double x3) { return x3 * (1 - x3) * (1.5 + std::cos(2 * pi * x2)); });
  const Field th = Field::sample(g, [](double x1, double, double x3) { return x3 * (1 - x3) * (1 + 0.5 * std::sin(2 * pi * x1)); });
  const double c = 3.0;
  const EntropyField a = entropy_field(th, rho, p);
  const EntropyField b = entropy_field(std::pow(c, p.gamma - 1.0) * th, c * rho, p);
  EXPECT_LE((a.S - b.S).max_abs(), 1e-12);
}

TEST(Entropy, BandSelection) {
  const auto g = make_grid(4, 4, 33);
  const Field rho = Field::sample(g, [](double, double, double x3) { return x3 * (1 - x3); });
  const Field th = Field::sample(g, [](double, double, double x3) { return x3 * (1 - x3) * (1 + x3); });
  const EntropyField wide = entropy_field(th, rho, params(), 0.05);
  const EntropyField narrow = entropy_field(th, rho, params(), 0.02);
  // S = ln(1 + x3): the band spread shrinks with the band.
  EXPECT_LT(narrow.band_nodes, wide.band_nodes);
  EXPECT_GT(narrow.band_nodes, 0);
  EXPECT_LE(narrow.spread(), wide.spread());
  EXPECT_NEAR(wide.band_min, std::log(1 + g.x3_nodes()[1]), 1e-13);
  const Field bad = Field::sample(g, [](double, double, double x3) { return x3 - 0.5; });
  EXPECT_THROW(entropy_field(bad, rho, params()), NonPositiveState);
}

TEST(VacuumMonitor, NormalDerivatives) {
  const auto g = make_grid(6, 6, 17);
  const VacuumMonitor s = vacuum_boundary_monitor(Field::sample(g, [](double, double, double x3) { return std::sin(pi * x3); }));
  EXPECT_NEAR(s.min, -pi, 1e-9);
  EXPECT_NEAR(s.max, -pi, 1e-9);
  EXPECT_FALSE(s.violation);
  const Field d = distance_function(g);
  const VacuumMonitor m = vacuum_boundary_monitor(d);
  EXPECT_NEAR(m.min, -1.0, 1e-12);
  EXPECT_NEAR(m.max, -1.0, 1e-12);
  EXPECT_FALSE(m.violation);
  EXPECT_TRUE(vacuum_boundary_monitor(-1.0 * d).violation);
}

TEST(Hardy, ClosedFormRatios) {
  const auto s = hardy_nodes(12);
  std::vector<double> one(12, 1.0), lin(s);
  EXPECT_NEAR(hardy_check(one, 2.0).ratio, 3.0, 1e-12);
  EXPECT_NEAR(hardy_check(lin, 0.0).ratio, 1.0, 1e-12);
  // g = s^2, k = 3: int s^5 / int s^3 (s^4 + 4 s^2) = (1/6) / (1/8 + 4/6).
  std::vector<double> sq(12);
  for (int j = 0; j < 12; ++j) sq[j] = s[j] * s[j];
  EXPECT_NEAR(hardy_check(sq, 3.0).ratio, (1.0 / 6) / (1.0 / 8 + 4.0 / 6), 1e-12);
  EXPECT_THROW(hardy_check(one, 1.0), UnsupportedExponent);
  EXPECT_THROW(hardy_check(one, -1.0), UnsupportedExponent);
}

TEST(Hardy, MatchesIndependentQuadrature) {
  std::vector<double> x, w;
  gauss_legendre(40, x, w);
  const auto s = hardy_nodes(10);
  for (unsigned seed = 0; seed < 5; ++seed) {
    const auto c = random_polynomial(seed);
    std::vector<double> dc(c.size() - 1);
    for (std::size_t i = 1; i < c.size(); ++i) dc[i - 1] = i * c[i];
    std::vector<double> g(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) g[j] = eval_polynomial(c, s[j]);
    // k = 4: smooth integrands on [0, 1].
    double lhs = 0.0, rhs = 0.0;
    for (int q = 0; q < 40; ++q) {
      const double v = eval_polynomial(c, x[q]), dv = eval_polynomial(dc, x[q]);
      lhs += w[q] * x[q] * x[q] * v * v;
      rhs += w[q] * std::pow(x[q], 4) * (v * v + dv * dv);
    }
    EXPECT_NEAR(hardy_check(g, 4.0).ratio, lhs / rhs, 1e-10 * lhs / rhs);
    // k = 1/2 with s = u^2: int s^{-3/2} (g - g0)^2 ds = int 2 u^{-2} (g(u^2) - g0)^2 du.
    lhs = rhs = 0.0;
    for (int q = 0; q < 40; ++q) {
      const double u = x[q], v = eval_polynomial(c, u * u) - c[0], dv = eval_polynomial(dc, u * u);
      lhs += w[q] * 2.0 * v * v / (u * u);
      rhs += w[q] * 2.0 * u * u * dv * dv;
    }
    EXPECT_NEAR(hardy_check(g, 0.5).ratio, lhs / rhs, 1e-9 * lhs / rhs);
  }
}

TEST(Korn, ClosedForms) {
  const auto g = make_grid(8, 8, 13);
  EXPECT_NEAR(korn_check(Field::constant(g, 3, 0.4), false).ratio, 1.0, 1e-12);
  const Field v = Field::sample(g, 3, [](int c, double, double, double x3) { return c == 0 ? x3 : 0.0; });
  const InequalityRatio r = korn_check(v, false);
  EXPECT_NEAR(r.lhs, 4.0 / 3, 1e-12);
  EXPECT_NEAR(r.rhs, 7.0 / 3, 1e-12);
  EXPECT_NEAR(r.ratio, 4.0 / 7, 1e-12);
  const InitialData d = default_dataset(g);
  // Weighted tail int x3^3 (1 - x3) = 1/20.
  EXPECT_NEAR(korn_check(v, true, &d.rho0).rhs, 2.0 + 1.0 / 20, 1e-12);
  EXPECT_THROW(korn_check(v, true), InvalidParameter);
}

TEST(Korn, BoundedOnRandomFields) {
  const auto g = make_grid(12, 12, 17);
  const InitialData d = default_dataset(g);
  for (unsigned seed = 0; seed < 6; ++seed) {
    const Field v = SmoothRandomField(seed, 3).sample(g);
    const double r = korn_check(v, true, &d.rho0).ratio;
    EXPECT_TRUE(std::isfinite(r));
    EXPECT_GT(r, 0.0);
    EXPECT_LT(r, 50.0);
  }
}

TEST(SmoothRandomFieldTest, SameFunctionOnEveryGrid) {
  const SmoothRandomField f(9, 2);
  const auto a = f.sample(make_grid(8, 8, 9));
  const auto b = f.sample(make_grid(16, 16, 17));
  EXPECT_EQ(a.at(1, 4, 2, 6), b.at(1, 8, 4, 12));
  EXPECT_NE(SmoothRandomField(10, 2).value(0, 0.3, 0.1, 0.2), f.value(0, 0.3, 0.1, 0.2));
}
