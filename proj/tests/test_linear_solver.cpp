#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fbns/error.hpp"
#include "fbns/initial_data.hpp"
#include "fbns/linear_solver.hpp"
#include "fbns/norms.hpp"
#include "fbns/operators.hpp"
#include "support.hpp"

using namespace fbns;
using fbns::testing::pi;

namespace {

std::vector<Field> constant_series(const Field& f, const TimeGrid& tg) {
  return std::vector<Field>(static_cast<std::size_t>(tg.n_steps) + 1, f);
}

FrozenCoefficients at_rest(const GridSpec& g, const TimeGrid& tg) {
  return freeze(constant_series(Field(g, 3), tg), constant_series(Field(g, 1), tg), tg);
}

double l2(const Field& f) {
  double s = 0.0;
  for (int c = 0; c < f.components(); ++c) s += integrate(f.extract(c) * f.extract(c));
  return std::sqrt(s);
}

PhysParams params() {
  PhysParams p;
  p.mu = 1.0;
  p.lambda = 0.5;
  p.kappa = 1.0;
  p.R = 1.0;
  p.c_v = 1.0;
  return p;
}

// Smooth nontrivial frozen trajectory: v~ = t * W(x), Theta~ = theta(x) (1 + t).
FrozenCoefficients smooth_frozen(const GridSpec& g, const TimeGrid& tg) {
  const Field W = Field::sample(g, 3, [](int c, double x1, double x2, double x3) {
    if (c == 0) return 0.3 * std::sin(2 * pi * x2) * x3;
    if (c == 1) return 0.2 * std::cos(2 * pi * x1) * (1 - x3);
    return 0.2 * std::sin(2 * pi * (x1 + x2)) * x3 * x3;
  });
  const Field th = Field::sample(g, [](double x1, double, double x3) { return x3 * (1 - x3) * (1 + 0.3 * std::cos(2 * pi * x1)); });
  std::vector<Field> v, Th;
  for (int n = 0; n <= tg.n_steps; ++n) {
    v.push_back(tg.time(n) * W);
    Th.push_back((1 + tg.time(n)) * th);
  }
  return freeze(v, Th, tg);
}

Field positive_density(const GridSpec& g) {
  return Field::sample(g, [](double x1, double, double x3) { return 1 + 0.5 * x3 * (1 - x3) + 0.2 * std::sin(2 * pi * x1); });
}

VelocityTrajectory zero_velocity(const GridSpec& g, const TimeGrid& tg) {
  VelocityTrajectory v;
  v.v = constant_series(Field(g, 3), tg);
  return v;
}

}  // namespace

TEST(Basis, ConstantModeOnlyInVelocityBasis) {
  const auto g = make_grid(4, 4, 9);
  const BasisSet b = build_basis(g, 1);
  EXPECT_EQ(b.velocity_size(), 1);
  EXPECT_LE((basis_mode(b, BasisKind::velocity, 0) - Field::constant(g, 1, 1.0)).max_abs(), 1e-12);
  const Field t = basis_mode(b, BasisKind::temperature, 0);
  EXPECT_GT(t.max_abs(), 0.5);  // a bubble in x3, not a constant
  EXPECT_LE(boundary_max_abs(t), 1e-12);
}

TEST(Basis, TemperatureModesVanishOnFaces) {
  const auto g = make_grid(8, 8, 17);
  const BasisSet b = build_basis(g, BasisOrders{4, 4, 7});
  for (int s = 0; s < b.temperature_size(); ++s) EXPECT_LE(boundary_max_abs(basis_mode(b, BasisKind::temperature, s)), 1e-12);
}

TEST(Basis, GramNonsingularAndOrthonormal) {
  const auto g = make_grid(8, 8, 17);
  const BasisSet b = build_basis(g, 4);
  for (BasisKind k : {BasisKind::velocity, BasisKind::temperature}) {
    Eigen::MatrixXd G(b.size(k), b.size(k));
    for (int s = 0; s < b.size(k); ++s)
      for (int l = 0; l < b.size(k); ++l) G(s, l) = integrate(basis_mode(b, k, s) * basis_mode(b, k, l));
    EXPECT_GT(min_eigenvalue(G), 0.5);
    EXPECT_LE((G - Eigen::MatrixXd::Identity(b.size(k), b.size(k))).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Basis, ResolutionLimits) {
  const auto g = make_grid(8, 8, 13);
  EXPECT_NO_THROW(build_basis(g, BasisOrders{4, 4, 5}));
  EXPECT_THROW(build_basis(g, BasisOrders{5, 4, 5}), InvalidResolution);
  EXPECT_THROW(build_basis(g, BasisOrders{4, 4, 6}), InvalidResolution);
  EXPECT_THROW(build_basis(g, 0), InvalidResolution);
}

TEST(Basis, ProjectSynthesizeRoundTrip) {
  const auto g = make_grid(8, 8, 17);
  const BasisSet b = build_basis(g, 4);
  std::mt19937 rng(7);
  std::normal_distribution<double> n;
  Eigen::VectorXd c(3 * b.velocity_size());
  for (auto& x : c) x = n(rng);
  const Field f = synthesize(b, BasisKind::velocity, c, 3);
  EXPECT_LE((project(b, BasisKind::velocity, f) - c).cwiseAbs().maxCoeff(), 1e-12);
  // Matches the explicit mode sum.
  Field ref(g, 1);
  for (int s = 0; s < b.velocity_size(); ++s) ref.add_scaled(c(b.velocity_size() + s), basis_mode(b, BasisKind::velocity, s));
  EXPECT_LE((f.extract(1) - ref).max_abs(), 1e-12);
}

TEST(Mass, IdentityForUnitDensity) {
  const auto g = make_grid(8, 8, 17);
  const BasisSet b = build_basis(g, 4);
  for (BasisKind k : {BasisKind::velocity, BasisKind::temperature}) {
    const Eigen::MatrixXd M = assemble_mass(Field::constant(g, 1, 1.0), b, k);
    EXPECT_LE((M - Eigen::MatrixXd::Identity(M.rows(), M.cols())).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Mass, ZeroDensityIsSingular) {
  const auto g = make_grid(8, 8, 13);
  const BasisSet b = build_basis(g, 3);
  EXPECT_THROW(assemble_mass(Field(g, 1), b), SingularMass);
}

TEST(Mass, VacuumDensityMatchesDenseQuadrature) {
  // rho0 = d depends on x3 only and the Fourier factors are orthonormal, so
  // the smallest eigenvalue is that of the generalized x3 problem
  // (d T_l, T_s) x = lambda (T_l, T_s) x on {T_n(2 x3 - 1)}_{n<3}, whose
  // degree-6 integrands four-point Gauss-Legendre integrates exactly.
  const auto g = make_grid(6, 6, 13);
  const BasisSet b = build_basis(g, 3);
  const Eigen::MatrixXd M = assemble_mass(distance_function(g), b);
  EXPECT_LE((M - M.transpose()).cwiseAbs().maxCoeff(), 1e-14);

  const double gx[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
  const double gw[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538};
  auto cheb = [](int n, double x) { return std::cos(n * std::acos(2 * x - 1)); };
  Eigen::MatrixXd Md = Eigen::MatrixXd::Zero(3, 3), Gm = Eigen::MatrixXd::Zero(3, 3);
  for (int q = 0; q < 4; ++q) {
    const double x = 0.5 + 0.5 * gx[q], w = 0.5 * gw[q];
    const double d = x * (1 - x);
    for (int s = 0; s < 3; ++s)
      for (int l = 0; l < 3; ++l) {
        Gm(s, l) += w * cheb(s, x) * cheb(l, x);
        Md(s, l) += w * d * cheb(s, x) * cheb(l, x);
      }
  }
  const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Md, Gm);
  EXPECT_GT(min_eigenvalue(M), 0.0);
  EXPECT_NEAR(min_eigenvalue(M), es.eigenvalues()(0), 1e-8);
}

TEST(Freeze, ConstantVelocityTranslates) {
  const auto g = make_grid(8, 8, 9);
  const TimeGrid tg{0.5, 5, Scheme::crank_nicolson};
  const Field c = Field::sample(g, 3, [](int k, double, double, double) { return 0.1 * (k + 1); });
  const FrozenCoefficients f = freeze(constant_series(c, tg), constant_series(Field(g, 1), tg), tg);
  ASSERT_EQ(f.steps.size(), 6u);
  ASSERT_EQ(f.mids.size(), 5u);
  EXPECT_LE((f.steps[5].xi - 0.5 * c).max_abs(), 1e-13);
  EXPECT_LE((f.mids[2].xi - 0.25 * c).max_abs(), 1e-13);
  EXPECT_LE((f.steps[3].defm.J - Field::constant(g, 1, 1.0)).max_abs(), 1e-13);
}

TEST(Freeze, InterpolationExactForCubics) {
  const auto g = make_grid(4, 4, 5);
  const TimeGrid tg{1.0, 6, Scheme::crank_nicolson};
  auto p = [](double t) { return 1 - 2 * t + 3 * t * t - 0.5 * t * t * t; };
  std::vector<Field> s;
  for (int n = 0; n <= tg.n_steps; ++n) s.push_back(Field::constant(g, 1, p(tg.time(n))));
  for (double t : {0.03, 0.25, 0.5, 0.77, 0.99}) EXPECT_NEAR(interpolate_series(s, tg, t).at(0, 0, 0, 0), p(t), 1e-13);
}

TEST(Freeze, RefusesLargeCompression) {
  const auto g = make_grid(4, 4, 9);
  const TimeGrid tg{1.0, 4, Scheme::crank_nicolson};
  const Field v = Field::sample(g, 3, [](int c, double, double, double x3) { return c == 2 ? -0.8 * x3 : 0.0; });
  EXPECT_THROW(freeze(constant_series(v, tg), constant_series(Field(g, 1), tg), tg), AprioriViolated);
}

TEST(Freeze, RejectsMismatchedSeries) {
  const auto g = make_grid(4, 4, 9);
  const TimeGrid tg{1.0, 4, Scheme::crank_nicolson};
  EXPECT_THROW(freeze(std::vector<Field>(3, Field(g, 3)), constant_series(Field(g, 1), tg), tg), GridMismatch);
  EXPECT_THROW(freeze({}, {}, TimeGrid{0.0, 4, Scheme::crank_nicolson}), InvalidParameter);
}

TEST(Velocity, ZeroDataStaysAtRest) {
  const auto g = make_grid(8, 8, 13);
  const TimeGrid tg{0.01, 5, Scheme::crank_nicolson};
  const BasisSet b = build_basis(g, 3);
  const InitialData data{positive_density(g), Field(g, 3), Field(g, 1), 1.0};
  const VelocityTrajectory v = solve_velocity(at_rest(g, tg), data, params(), tg, b);
  ASSERT_EQ(v.v.size(), 6u);
  for (const Field& f : v.v) EXPECT_EQ(f.max_abs(), 0.0);
}

TEST(Velocity, FineStepSelfOracle) {
  const auto g = make_grid(4, 4, 11);
  const BasisSet b = build_basis(g, BasisOrders{2, 1, 4});
  InitialData d{Field::constant(g, 1, 1.0), Field(g, 3), Field(g, 1), 1.0};
  d.u0.assign(2, basis_mode(b, BasisKind::velocity, 1));
  const PhysParams p = params();
  const TimeGrid coarse{0.01, 300, Scheme::crank_nicolson}, fine{0.01, 3000, Scheme::crank_nicolson};
  const Field vc = solve_velocity(at_rest(g, coarse), d, p, coarse, b).v.back();
  const Field vf = solve_velocity(at_rest(g, fine), d, p, fine, b).v.back();
  EXPECT_LE(l2(vc - vf) / l2(vf), 1e-6);
}

namespace {

// v* = e^{-t} (cos(2 pi x1) x3^2, 0, x3) at eta = Id with rho0 = 1, Theta~ = 0,
// and the body force and outward traction that make it an exact solution.
struct Manufactured {
  PhysParams p = params();
  Field exact(const GridSpec& g, double t) const {
    return Field::sample(g, 3, [=](int c, double x1, double, double x3) {
      if (c == 0) return std::exp(-t) * std::cos(2 * pi * x1) * x3 * x3;
      if (c == 2) return std::exp(-t) * x3;
      return 0.0;
    });
  }
  // rho0 v*_t - div S[v*]
  Field body(const GridSpec& g, double t) const {
    const double mu = p.mu, la = p.lambda;
    return Field::sample(g, 3, [=](int c, double x1, double, double x3) {
      const double e = std::exp(-t), cs = std::cos(2 * pi * x1), sn = std::sin(2 * pi * x1);
      if (c == 0) return -e * cs * x3 * x3 - e * (-(2 * mu + la) * 4 * pi * pi * cs * x3 * x3 + 2 * mu * cs);
      if (c == 2) return -e * x3 - e * (-(mu + la) * 4 * pi * sn * x3);
      return 0.0;
    });
  }
  // n3 (S^{13}, S^{23}, S^{33}) with n3 = -1 at x3 = 0 and +1 at x3 = 1.
  Field traction(const GridSpec& g, double t) const {
    const double mu = p.mu, la = p.lambda;
    return Field::sample(g, 3, [=](int c, double x1, double, double x3) {
      const double e = std::exp(-t), n3 = x3 > 0.5 ? 1.0 : -1.0;
      const double div = -2 * pi * std::sin(2 * pi * x1) * x3 * x3 + 1;
      if (c == 0) return n3 * e * 2 * mu * std::cos(2 * pi * x1) * x3;
      if (c == 2) return n3 * e * (2 * mu + la * div);
      return 0.0;
    });
  }
};

}  // namespace

TEST(Velocity, ManufacturedSolution) {
  const auto g = make_grid(12, 12, 17);
  const BasisSet b = build_basis(g, 6);
  const Manufactured ms;
  const InitialData data{Field::constant(g, 1, 1.0), ms.exact(g, 0.0), Field(g, 1), 1.0};
  VelocityForcing f;
  f.body = [&](double t) { return ms.body(g, t); };
  f.traction = [&](double t) { return ms.traction(g, t); };
  const TimeGrid tg{0.1, 100, Scheme::crank_nicolson};
  const VelocityTrajectory v = solve_velocity(at_rest(g, tg), data, ms.p, tg, b, &f);
  double err = 0.0;
  for (int n = 0; n <= tg.n_steps; n += 10) err = std::max(err, (v.v[n] - ms.exact(g, tg.time(n))).max_abs());
  EXPECT_LE(err, 1e-5);
}

TEST(Velocity, BackwardEulerEnergyDecreases) {
  const auto g = make_grid(8, 8, 17);
  const BasisSet b = build_basis(g, 4);
  const DensityProfile rho = build_density(g, 1.0, [](double, double, double) { return 1.0; });
  std::mt19937 rng(3);
  std::normal_distribution<double> n;
  Eigen::VectorXd c(3 * b.velocity_size());
  for (auto& x : c) x = n(rng);
  const InitialData data{rho.rho0, synthesize(b, BasisKind::velocity, c, 3), Field(g, 1), 1.0};
  const TimeGrid tg{0.05, 20, Scheme::backward_euler};
  const FrozenCoefficients fr = smooth_frozen(g, tg);
  // Theta~ = 0 switches off the pressure.
  FrozenCoefficients f0 = fr;
  for (auto* s : {&f0.steps, &f0.mids})
    for (auto& x : *s) x.Theta = Field(g, 1);
  const VelocityTrajectory v = solve_velocity(f0, data, params(), tg, b);
  const Eigen::MatrixXd M = assemble_mass(rho.rho0, b);
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& d : v.coeffs) {
    double e = 0.0;
    for (int i = 0; i < 3; ++i) {
      const auto di = d.segment(i * b.velocity_size(), b.velocity_size());
      e += di.dot(M * di);
    }
    EXPECT_LE(e, prev + 1e-12);
    prev = e;
  }
}

TEST(Velocity, CrankNicolsonSecondOrder) {
  const auto g = make_grid(8, 8, 13);
  const BasisSet b = build_basis(g, BasisOrders{3, 3, 4});
  const InitialData data{positive_density(g),
                         Field::sample(g, 3, [](int c, double x1, double, double x3) { return c == 0 ? 0.1 * std::cos(2 * pi * x1) * x3 : 0.0; }),
                         Field(g, 1), 1.0};
  std::vector<Field> out;
  for (int steps : {10, 20, 40}) {
    const TimeGrid tg{0.04, steps, Scheme::crank_nicolson};
    out.push_back(solve_velocity(smooth_frozen(g, tg), data, params(), tg, b).v.back());
  }
  const double rate = std::log2(l2(out[0] - out[1]) / l2(out[1] - out[2]));
  EXPECT_GE(rate, 1.8);
  EXPECT_LE(rate, 2.2);
}

TEST(Velocity, NaturalBoundaryConditionUnderRefinement) {
  const auto g = make_grid(8, 8, 25);
  const InitialData data{positive_density(g),
                         Field::sample(g, 3, [](int c, double x1, double, double x3) { return c == 0 ? std::cos(2 * pi * x1) * x3 : 0.0; }),
                         Field(g, 1), 1.0};
  const TimeGrid tg{0.02, 10, Scheme::backward_euler};
  const FrozenCoefficients fr = at_rest(g, tg);
  std::vector<double> res;
  for (int m3 : {3, 6, 9}) {
    const BasisSet b = build_basis(g, BasisOrders{3, 3, m3});
    const Field v = solve_velocity(fr, data, params(), tg, b).v.back();
    res.push_back(boundary_stress_residual(v, fr.steps.back().defm, params()).max());
  }
  EXPECT_LT(res[1], res[0]);
  EXPECT_LT(res[2], res[1]);
}

TEST(Temperature, ZeroDataStaysZero) {
  const auto g = make_grid(8, 8, 13);
  const TimeGrid tg{0.01, 5, Scheme::crank_nicolson};
  const BasisSet b = build_basis(g, 3);
  const InitialData data{positive_density(g), Field(g, 3), Field(g, 1), 1.0};
  const TemperatureTrajectory t = solve_temperature(zero_velocity(g, tg), at_rest(g, tg), data, params(), tg, b);
  for (const Field& f : t.Theta) EXPECT_EQ(f.max_abs(), 0.0);
}

TEST(Temperature, HeatModeDecay) {
  const auto g = make_grid(4, 4, 33);
  const BasisSet b = build_basis(g, BasisOrders{1, 1, 12});
  PhysParams p = params();
  p.kappa = 0.7;
  p.c_v = 1.3;
  const Field mode = Field::sample(g, [](double, double, double x3) { return std::sin(pi * x3); });
  const InitialData data{Field::constant(g, 1, 1.0), Field(g, 3), mode, 1.0};
  const TimeGrid tg{0.1, 1000, Scheme::crank_nicolson};
  const TemperatureTrajectory t = solve_temperature(zero_velocity(g, tg), at_rest(g, tg), data, p, tg, b);
  const Field exact = std::exp(-p.kappa * pi * pi * 0.1 / p.c_v) * mode;
  EXPECT_LE(l2(t.Theta.back() - exact) / l2(exact), 1e-6);
}

TEST(Temperature, FineStepSelfOracleAndFaces) {
  const auto g = make_grid(8, 8, 13);
  const BasisSet b = build_basis(g, BasisOrders{3, 3, 4});
  const InitialData data{positive_density(g),
                         Field::sample(g, 3, [](int c, double, double x2, double x3) { return c == 1 ? 0.2 * std::sin(2 * pi * x2) * x3 : 0.0; }),
                         Field::sample(g, [](double x1, double, double x3) { return x3 * (1 - x3) * (1 + 0.2 * std::sin(2 * pi * x1)); }),
                         1.0};
  const PhysParams p = params();
  std::vector<Field> out;
  for (int steps : {50, 500}) {
    const TimeGrid tg{0.02, steps, Scheme::crank_nicolson};
    const FrozenCoefficients fr = smooth_frozen(g, tg);
    const VelocityTrajectory v = solve_velocity(fr, data, p, tg, b);
    const TemperatureTrajectory t = solve_temperature(v, fr, data, p, tg, b);
    for (const Field& f : t.Theta) EXPECT_LE(boundary_max_abs(f), 1e-12);
    out.push_back(t.Theta.back());
  }
  EXPECT_LE(l2(out[0] - out[1]) / l2(out[1]), 1e-5);
}

namespace {

struct WeakSetup {
  GridSpec g = make_grid(8, 8, 13);
  BasisSet b = build_basis(g, BasisOrders{3, 3, 4});
  PhysParams p = params();
  TimeGrid tg{0.02, 10, Scheme::crank_nicolson};
  InitialData data;
  FrozenCoefficients fr;
  VelocityTrajectory v;
  TemperatureTrajectory th;

  explicit WeakSetup(Scheme s)
      : data{positive_density(g), Field(g, 3), Field(g, 1), 1.0}, fr((tg.scheme = s, smooth_frozen(g, tg))) {
    Eigen::VectorXd cv = Eigen::VectorXd::Zero(3 * b.velocity_size()), ct = Eigen::VectorXd::Zero(b.temperature_size());
    cv(2) = 0.1;
    cv(b.velocity_size() + 5) = -0.05;
    ct(0) = 0.3;
    ct(4) = 0.1;
    data.u0 = synthesize(b, BasisKind::velocity, cv, 3);
    data.theta0 = synthesize(b, BasisKind::temperature, ct, 1);
    v = solve_velocity(fr, data, p, tg, b);
    th = solve_temperature(v, fr, data, p, tg, b);
  }

  TestFunctions random_tests(unsigned seed) const {
    std::mt19937 rng(seed);
    std::normal_distribution<double> n;
    Eigen::VectorXd a(3 * b.velocity_size()), c(3 * b.velocity_size()), e(b.temperature_size()), f(b.temperature_size());
    for (auto* x : {&a, &c, &e, &f})
      for (auto& y : *x) y = n(rng);
    const Field pa = synthesize(b, BasisKind::velocity, a, 3), pc = synthesize(b, BasisKind::velocity, c, 3);
    const Field qe = synthesize(b, BasisKind::temperature, e, 1), qf = synthesize(b, BasisKind::temperature, f, 1);
    TestFunctions t;
    t.phi = [=](double s) { return std::cos(40 * s) * pa + (s * s) * pc; };
    t.psi = [=](double s) { return (1 - 30 * s) * qe + std::sin(50 * s) * qf; };
    return t;
  }
};

}  // namespace

TEST(WeakResidual, ZeroTrajectoriesZeroDefect) {
  const auto g = make_grid(8, 8, 13);
  const TimeGrid tg{0.01, 4, Scheme::crank_nicolson};
  const InitialData data{positive_density(g), Field(g, 3), Field(g, 1), 1.0};
  TemperatureTrajectory th;
  th.Theta = constant_series(Field(g, 1), tg);
  TestFunctions t;
  t.phi = [&](double) { return Field::constant(g, 3, 1.0); };
  t.psi = [&](double) { return Field::sample(g, [](double, double, double x3) { return x3 * (1 - x3); }); };
  const WeakDefect w = weak_residual(zero_velocity(g, tg), th, at_rest(g, tg), data, params(), t);
  EXPECT_EQ(w.momentum, 0.0);
  EXPECT_EQ(w.temperature, 0.0);
}

TEST(WeakResidual, ConvergedSolveSatisfiesWeakForm) {
  for (Scheme s : {Scheme::crank_nicolson, Scheme::backward_euler}) {
    const WeakSetup w(s);
    for (unsigned seed = 1; seed <= 10; ++seed) {
      const WeakDefect d = weak_residual(w.v, w.th, w.fr, w.data, w.p, w.random_tests(seed));
      EXPECT_LE(d.momentum, 1e-10);
      EXPECT_LE(d.temperature, 1e-10);
    }
  }
}

TEST(WeakResidual, DefectLinearInPerturbation) {
  const WeakSetup w(Scheme::crank_nicolson);
  const TestFunctions t = w.random_tests(11);
  const Field mode = basis_mode(w.b, BasisKind::velocity, 4);
  std::vector<double> d;
  for (double eps : {1e-3, 2e-3}) {
    VelocityTrajectory v = w.v;
    for (std::size_t n = 1; n < v.v.size(); ++n) {
      Field bump(w.g, 3);
      bump.assign(0, eps * mode);
      v.v[n] += bump;
    }
    d.push_back(weak_residual(v, w.th, w.fr, w.data, w.p, t).momentum);
  }
  EXPECT_GT(d[0], 1e-6);
  EXPECT_NEAR(d[1] / d[0], 2.0, 1e-4);
}
