#include <gtest/gtest.h>

#include <cmath>

#include "fbns/error.hpp"
#include "fbns/kinematics.hpp"
#include "support.hpp"

using namespace fbns;
using fbns::testing::pi;

namespace {

// eta = (x1, x2, s3 x3); stretches in x1, x2 are not periodic displacements.
FlowMap linear_map(const GridSpec& g, double s3) {
  Field xi = Field::sample(g, 3, [=](int c, double, double, double x3) { return c == 2 ? (s3 - 1) * x3 : 0.0; });
  return FlowMap{xi, 0.0};
}

double entry(const Field& f, int e, std::size_t p) { return f.component(e)[p]; }

}  // namespace

TEST(FlowMap, IdentityAtTimeZero) {
  const auto g = make_grid(4, 4, 5);
  const FlowMap m = FlowMap::identity(g);
  EXPECT_EQ(m.time, 0.0);
  EXPECT_EQ(m.xi.max_abs(), 0.0);
  const Field eta = m.eta();
  EXPECT_DOUBLE_EQ(eta.at(2, 3, 0, 0), g.x3_nodes()[3]);
}

TEST(FlowMap, ZeroVelocityLeavesMapUnchanged) {
  const auto g = make_grid(4, 4, 5);
  const FlowMap m0 = FlowMap::identity(g);
  const FlowMap m1 = advance_flow_map(m0, Field(g, 3), 0.3);
  EXPECT_EQ(m1.xi.max_abs(), 0.0);
  EXPECT_DOUBLE_EQ(m1.time, 0.3);
}

TEST(FlowMap, ConstantVelocityTranslates) {
  const auto g = make_grid(4, 4, 5);
  const double c = 0.7, dt = 0.25;
  const Field v = Field::sample(g, 3, [=](int comp, double, double, double) { return comp == 2 ? c : 0.0; });
  const FlowMap m = advance_flow_map(FlowMap::identity(g), v, dt);
  const Field eta = m.eta();
  for (int i3 = 0; i3 < g.n3(); ++i3) EXPECT_DOUBLE_EQ(eta.at(2, i3, 1, 1), g.x3_nodes()[i3] + c * dt);
}

TEST(FlowMap, ShearVelocity) {
  const auto g = make_grid(4, 4, 5);
  const Field v = Field::sample(g, 3, [](int comp, double, double, double x3) { return comp == 0 ? x3 : 0.0; });
  const FlowMap m = advance_flow_map(FlowMap::identity(g), v, 0.1);
  const Field eta = m.eta();
  for (int i3 = 0; i3 < g.n3(); ++i3)
    for (int i1 = 0; i1 < g.n1(); ++i1)
      EXPECT_NEAR(eta.at(0, i3, 2, i1), g.x1_nodes()[i1] + 0.1 * g.x3_nodes()[i3], 1e-12);
}

TEST(FlowMap, RejectsNonFiniteVelocity) {
  const auto g = make_grid(4, 4, 5);
  const Field v = Field::constant(g, 3, std::nan(""));
  EXPECT_THROW(advance_flow_map(FlowMap::identity(g), v, 0.1), NonFiniteState);
}

TEST(Deformation, Identity) {
  const auto g = make_grid(4, 4, 5);
  const Deformation d = compute_deformation(FlowMap::identity(g));
  for (std::size_t p = 0; p < g.points(); ++p) {
    EXPECT_EQ(d.J.values()[p], 1.0);
    for (int e = 0; e < 9; ++e) {
      const double id = (e % 4 == 0) ? 1.0 : 0.0;
      EXPECT_EQ(entry(d.A, e, p), id);
      EXPECT_EQ(entry(d.a, e, p), id);
    }
  }
}

TEST(Deformation, DiagonalStretch) {
  const auto g = make_grid(4, 4, 5);
  const Deformation d = compute_deformation(linear_map(g, 2));
  for (std::size_t p = 0; p < g.points(); ++p) {
    EXPECT_NEAR(d.J.values()[p], 2.0, 1e-13);
    EXPECT_NEAR(entry(d.A, 8, p), 0.5, 1e-13);
    EXPECT_NEAR(entry(d.A, 0, p), 1.0, 1e-13);
    EXPECT_NEAR(entry(d.a, 0, p), 2.0, 1e-13);
    EXPECT_NEAR(entry(d.a, 4, p), 2.0, 1e-13);
    EXPECT_NEAR(entry(d.a, 8, p), 1.0, 1e-13);
  }
}

TEST(Deformation, CofactorMatchesLeviCivitaOracle) {
  const auto g = make_grid(16, 16, 17);
  const Field xi = Field::sample(g, 3, [](int c, double, double x2, double x3) {
    return c == 0 ? 0.01 * std::sin(2 * pi * x2) : (c == 2 ? 0.01 * x3 * (1 - x3) : 0.0);
  });
  const Deformation d = compute_deformation(FlowMap{xi, 0.0});
  for (int i3 = 0; i3 < g.n3(); ++i3)
    for (int i2 = 0; i2 < g.n2(); ++i2) {
      const double x2 = g.x2_nodes()[i2], x3 = g.x3_nodes()[i3];
      std::array<double, 9> M{1, 0.01 * 2 * pi * std::cos(2 * pi * x2), 0, 0, 1, 0, 0, 0, 1 + 0.01 * (1 - 2 * x3)};
      const auto cof = fbns::testing::levi_civita_cofactor(M);
      const std::size_t p = g.index(i3, i2, 0);
      for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i) EXPECT_NEAR(entry(d.a, 3 * k + i, p), cof[3 * i + k], 1e-8);
    }
}

TEST(Deformation, DegenerateJacobianRejected) {
  const auto g = make_grid(4, 4, 5);
  EXPECT_THROW(compute_deformation(linear_map(g, 0)), DegenerateJacobian);
}

TEST(Rates, IdentityWithStretchVelocity) {
  const auto g = make_grid(8, 8, 9);
  const Deformation d = compute_deformation(FlowMap::identity(g));
  const Field v = Field::sample(g, 3, [](int c, double x1, double, double) { return c == 0 ? std::sin(2 * pi * x1) / (2 * pi) : 0.0; });
  const auto r = deformation_rates(d, v);
  // v^1_{,1} = cos(2 pi x1); at x1 = 0 it is 1, which is the spec's v = (x1, 0, 0) case.
  const std::size_t p = g.index(3, 2, 0);
  EXPECT_NEAR(r.J_t.values()[p], 1.0, 1e-12);
  EXPECT_NEAR(entry(r.a_t, 0, p), 0.0, 1e-12);
  EXPECT_NEAR(entry(r.a_t, 4, p), 1.0, 1e-12);
  EXPECT_NEAR(entry(r.a_t, 8, p), 1.0, 1e-12);
}

TEST(Rates, IdentityWithShearVelocity) {
  const auto g = make_grid(8, 8, 9);
  const Deformation d = compute_deformation(FlowMap::identity(g));
  const Field v = Field::sample(g, 3, [](int c, double, double, double x3) { return c == 0 ? x3 : 0.0; });
  const auto r = deformation_rates(d, v);
  EXPECT_LT(r.J_t.max_abs(), 1e-12);
  for (int e = 0; e < 9; ++e) {
    const double expect = e == 2 ? -1.0 : 0.0;
    for (double x : r.a_t.component(e)) EXPECT_NEAR(x, expect, 1e-12);
  }
}

TEST(Rates, MatchFiniteDifferencesAlongFlow) {
  const auto g = make_grid(8, 8, 9);
  const fbns::testing::RandomDisplacement xi0(7, 0.05), w(8, 0.2);
  const Field base = xi0.sample(g);
  const Field wv = w.sample(g);
  const VelocityEvaluator vel = [&](double t, const Field&) {
    Field v = wv;
    v *= (1.0 + 0.5 * std::sin(3 * t));
    return v;
  };
  const double t0 = 0.2, h = 1e-4;
  auto state_at = [&](int steps) {
    FlowMap m{base, t0};
    const double dt = steps >= 0 ? h : -h;
    for (int i = 0; i < std::abs(steps); ++i) m = advance_flow_map(m, vel, dt);
    return compute_deformation(m);
  };
  const Deformation d0 = state_at(0), dp = state_at(1), dm = state_at(-1);
  const auto r = deformation_rates(d0, vel(t0, base));
  const Field Jt_fd = (1.0 / (2 * h)) * (dp.J - dm.J);
  const Field at_fd = (1.0 / (2 * h)) * (dp.a - dm.a);
  EXPECT_LT((Jt_fd - r.J_t).max_abs(), 1e-6 * std::max(1.0, r.J_t.max_abs()));
  EXPECT_LT((at_fd - r.a_t).max_abs(), 1e-6 * std::max(1.0, r.a_t.max_abs()));
  // A_t from the product rule of A J = a
  const Field At_fd = (1.0 / (2 * h)) * (dp.A - dm.A);
  EXPECT_LT((At_fd - r.A_t).max_abs(), 1e-6 * std::max(1.0, r.A_t.max_abs()));
}

TEST(Piola, IdentityAndLinearMaps) {
  const auto g = make_grid(8, 8, 9);
  EXPECT_LT(piola_residual(compute_deformation(FlowMap::identity(g))).max_abs(), 1e-13);
  const Field xi = Field::sample(g, 3, [](int c, double, double, double x3) { return c == 0 ? 0.3 * x3 : (c == 2 ? 0.2 * x3 : 0.0); });
  EXPECT_LT(piola_residual(compute_deformation(FlowMap{xi, 0.0})).max_abs(), 1e-12);
}

TEST(Piola, SmoothPerturbationAtDeskResolution) {
  const auto g = make_grid(32, 32, 33);
  const fbns::testing::RandomDisplacement xi(42, 0.05);
  const Deformation d = compute_deformation(FlowMap{xi.sample(g), 0.0});
  EXPECT_LT(piola_residual(d).max_abs(), 1e-8);
}

TEST(Piola, ResidualDecaysUnderRefinement) {
  const Field::PointFn bump = [](double x1, double, double x3) { return 0.05 * std::sin(2 * pi * x1) * std::exp(x3); };
  double prev = 0.0;
  bool first = true;
  for (int n3 : {5, 9, 17}) {
    const auto g = make_grid(8, 8, n3);
    Field xi(g, 3);
    xi.assign(1, Field::sample(g, bump));
    xi.assign(2, Field::sample(g, [](double x1, double x2, double x3) {
                return 0.05 * std::cos(2 * pi * x2) * std::sin(3 * x3) * (1 + 0.5 * std::sin(2 * pi * x1));
              }));
    const double r = piola_residual(compute_deformation(FlowMap{xi, 0.0})).max_abs();
    if (!first) {
      EXPECT_LE(r, 0.5 * prev + 1e-13);
    }
    prev = r;
    first = false;
  }
}

TEST(Apriori, Cases) {
  const auto g = make_grid(4, 4, 5);
  const auto id = check_apriori(compute_deformation(FlowMap::identity(g)), 2.0);
  EXPECT_TRUE(id.ok);
  EXPECT_EQ(id.j_min, 1.0);
  EXPECT_EQ(id.j_max, 1.0);
  const auto squeezed = check_apriori(compute_deformation(linear_map(g, 0.4)), 2.0);
  EXPECT_FALSE(squeezed.ok);
  EXPECT_NEAR(squeezed.j_min, 0.4, 1e-13);

  Field Deta(g, 9);
  for (int i = 0; i < 3; ++i)
    for (double& x : Deta.component(4 * i)) x = (i == 2) ? 1.5 : 1.0;
  const auto edge = check_apriori(deformation_from_gradient(Deta), 2.0);
  EXPECT_EQ(edge.j_max, 1.5);
  EXPECT_TRUE(edge.ok);
}

TEST(DeformationProperty, CofactorTimesGradientIsJIdentity) {
  const auto g = make_grid(16, 16, 17);
  for (unsigned s = 0; s < 5; ++s) {
    const fbns::testing::RandomDisplacement xi(100 + s, 0.1);
    const Deformation d = compute_deformation(FlowMap{xi.sample(g), 0.0});
    const Field prod = tensor_product(d.a, d.Deta);
    for (int e = 0; e < 9; ++e) {
      Field expect = e % 4 == 0 ? d.J : Field(g, 1);
      EXPECT_LT((prod.extract(e) - expect).max_abs(), 1e-8);
    }
    // a == J A
    for (int e = 0; e < 9; ++e) EXPECT_LT((d.a.extract(e) - d.J * d.A.extract(e)).max_abs(), 1e-10);
    for (double j : d.J.values()) EXPECT_GT(j, 0.0);
  }
}

TEST(RatesProperty, RichardsonJacobianRate) {
  const auto g = make_grid(8, 8, 9);
  const fbns::testing::RandomDisplacement w(5, 0.3);
  const Field wv = w.sample(g);
  const VelocityEvaluator vel = [&](double t, const Field&) {
    Field v = wv;
    v *= std::cos(t);
    return v;
  };
  const double h = 1e-3;
  std::vector<Field> J;
  FlowMap m = FlowMap::identity(g);
  for (int i = 0; i <= 4; ++i) {
    J.push_back(compute_deformation(m).J);
    m = advance_flow_map(m, vel, h);
  }
  // Richardson-combined centered difference at step 2
  const Field fd = (1.0 / (12 * h)) * (8.0 * (J[3] - J[1]) - (J[4] - J[0]));
  FlowMap mid = FlowMap::identity(g);
  mid = advance_flow_map(mid, vel, h);
  mid = advance_flow_map(mid, vel, h);
  const auto r = deformation_rates(compute_deformation(mid), vel(2 * h, mid.xi));
  EXPECT_LT((fd - r.J_t).max_abs(), 1e-6);
}
