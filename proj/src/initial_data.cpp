#include "fbns/initial_data.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>

#include "fbns/error.hpp"
#include "fbns/kinematics.hpp"
#include "fbns/norms.hpp"
#include "fbns/operators.hpp"

namespace fbns {
namespace {

constexpr double kVacuumTol = 1e-10;
constexpr double kUnbounded = 1e12;

// Barycentric weights of nodes x (scaled to avoid under/overflow).
std::vector<double> bary_weights(const std::vector<double>& x) {
  std::vector<double> w(x.size(), 1.0);
  for (std::size_t j = 0; j < x.size(); ++j)
    for (std::size_t k = 0; k < x.size(); ++k)
      if (k != j) w[j] *= 4.0 * (x[j] - x[k]);
  for (double& v : w) v = 1.0 / v;
  return w;
}

double bary_eval(const std::vector<double>& x, const std::vector<double>& w, const std::vector<double>& f, double t) {
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double diffr = t - x[j];
    if (diffr == 0.0) return f[j];
    const double c = w[j] / diffr;
    num += c * f[j];
    den += c;
  }
  return num / den;
}

// Double-exponential nodes and weights on (0, 1); x and 1 - x are formed
// separately so that d = x (1 - x) keeps full relative accuracy near both ends.
struct DeRule {
  std::vector<double> x, d, w;
};

const DeRule& de_rule() {
  static const DeRule rule = [] {
    DeRule r;
    const double h = 1.0 / 32.0;
    for (int k = -256; k <= 256; ++k) {
      const double t = k * h;
      const double u = 0.5 * std::numbers::pi * std::sinh(t);
      const double x = 1.0 / (1.0 + std::exp(-2.0 * u));
      const double y = 1.0 / (1.0 + std::exp(2.0 * u));
      const double d = x * y;
      if (!(d > 1e-280)) continue;
      r.x.push_back(x);
      r.d.push_back(d);
      r.w.push_back(h * 0.5 * std::numbers::pi * std::cosh(t) * 2.0 * d);
    }
    return r;
  }();
  return rule;
}

using MultiIndex = std::array<int, 3>;

std::map<MultiIndex, Field> derivatives_up_to(const Field& f, int order) {
  std::map<MultiIndex, Field> out{{{0, 0, 0}, f}};
  std::vector<MultiIndex> frontier{{0, 0, 0}};
  for (int o = 0; o < order; ++o) {
    std::vector<MultiIndex> next;
    for (const auto& b : frontier)
      for (int a = 0; a < 3; ++a) {
        MultiIndex c = b;
        ++c[a];
        if (out.count(c)) continue;
        out.emplace(c, diff(out.at(b), a + 1));
        next.push_back(c);
      }
    frontier = std::move(next);
  }
  return out;
}

bool is_boundary_plane(const GridSpec& g, int i3) { return i3 == 0 || i3 == g.n3() - 1; }

void check_bounded(const Field& f, const char* name) {
  const GridSpec& g = f.grid();
  for (int c = 0; c < f.components(); ++c)
    for (int i3 = 1; i3 < g.n3() - 1; ++i3)
      for (int i2 = 0; i2 < g.n2(); ++i2)
        for (int i1 = 0; i1 < g.n1(); ++i1) {
          const double v = f.at(c, i3, i2, i1);
          if (!std::isfinite(v) || std::abs(v) > kUnbounded)
            throw UnboundedDerivative(std::string(name) + " exceeds 1e12 in the interior (incompatible profiles?)");
        }
}

Field divide_by(const Field& num, const Field& rho0, double scale) {
  Field q(num.grid(), num.components());
  Field mask(num.grid(), 1);
  const auto r = rho0.component(0);
  for (std::size_t p = 0; p < r.size(); ++p) mask.values()[p] = r[p] > 0.0 ? 1.0 : 0.0;
  for (int c = 0; c < num.components(); ++c) {
    const auto n = num.component(c);
    auto o = q.component(c);
    for (std::size_t p = 0; p < r.size(); ++p) o[p] = r[p] > 0.0 ? n[p] / (scale * r[p]) : 0.0;
  }
  return extrapolate_masked(q, mask);
}

}  // namespace

Field distance_function(const GridSpec& g) {
  return Field::sample(g, [](double, double, double x3) { return x3 * (1.0 - x3); });
}

Field extrapolate_masked(const Field& f, const Field& mask) {
  require_same_grid(f, mask);
  const GridSpec& g = f.grid();
  const auto x3 = g.x3_nodes();
  Field out = f;
  for (int i2 = 0; i2 < g.n2(); ++i2)
    for (int i1 = 0; i1 < g.n1(); ++i1) {
      std::vector<double> xs;
      std::vector<int> known, unknown;
      for (int i3 = 0; i3 < g.n3(); ++i3) {
        if (mask.at(0, i3, i2, i1) != 0.0) {
          known.push_back(i3);
          xs.push_back(x3[i3]);
        } else {
          unknown.push_back(i3);
        }
      }
      if (unknown.empty() || known.empty()) continue;
      const auto w = bary_weights(xs);
      std::vector<double> col(known.size());
      for (int c = 0; c < f.components(); ++c) {
        for (std::size_t k = 0; k < known.size(); ++k) col[k] = f.at(c, known[k], i2, i1);
        for (int i3 : unknown) out.at(c, i3, i2, i1) = bary_eval(xs, w, col, x3[i3]);
      }
    }
  return out;
}

DensityProfile build_density(const GridSpec& g, double alpha, const Field::PointFn& envelope) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DecayViolation("alpha must be positive");
  const Field env = Field::sample(g, envelope);
  for (double e : env.values())
    if (!(e > 0.0) || !std::isfinite(e)) throw PositivityViolation("density envelope must be positive and finite");

  Field rho0(g, 1);
  const auto x3 = g.x3_nodes();
  for (int i3 = 0; i3 < g.n3(); ++i3) {
    const double d = x3[i3] * (1.0 - x3[i3]);
    const double s = is_boundary_plane(g, i3) ? 0.0 : std::pow(d, alpha);
    for (int i2 = 0; i2 < g.n2(); ++i2)
      for (int i1 = 0; i1 < g.n1(); ++i1) rho0.at(0, i3, i2, i1) = env.at(0, i3, i2, i1) * s;
  }

  DensityRecord rec;
  rec.linf = rho0.max_abs();

  // Envelope derivatives up to order 3, interpolated in x3 to the DE nodes.
  const auto E = derivatives_up_to(env, 3);
  const DeRule& de = de_rule();
  const std::vector<double> xs(x3.begin(), x3.end());
  const auto bw = bary_weights(xs);
  const double a = alpha;
  auto binom = [](int n, int k) { return (n == 2 && k == 1) ? 2.0 : 1.0; };

  double l3 = 0.0, h1 = 0.0, wsec = 0.0;
  std::vector<double> col(g.n3());
  for (int i2 = 0; i2 < g.n2(); ++i2)
    for (int i1 = 0; i1 < g.n1(); ++i1) {
      // Column samples of every envelope derivative.
      std::map<MultiIndex, std::vector<double>> cols;
      for (const auto& [beta, f] : E) {
        for (int i3 = 0; i3 < g.n3(); ++i3) col[i3] = f.at(0, i3, i2, i1);
        cols.emplace(beta, col);
      }
      for (std::size_t q = 0; q < de.x.size(); ++q) {
        const double x = de.x[q], d = de.d[q], dp = 1.0 - 2.0 * x;
        // x3 derivatives of d^alpha, unweighted (orders 0, 1) and times d
        // (orders 0 to 2), by powers that stay finite as d -> 0.
        const double da = std::pow(d, a), da1 = std::pow(d, a - 1.0);
        const std::array<double, 2> gu{da, a * dp * da1};
        const std::array<double, 3> gw{d * da, a * dp * da, a * (a - 1) * dp * dp * da1 - 2.0 * a * da};
        std::map<MultiIndex, double> e;
        for (const auto& [beta, c] : cols) e[beta] = bary_eval(xs, bw, c, x);
        auto leibniz = [&](MultiIndex b, const double* gd, int mmax) {
          double s = 0.0;
          for (int m = 0; m <= std::min(b[2], mmax); ++m) {
            const MultiIndex eb{b[0], b[1], b[2] - m};
            s += binom(b[2], m) * e.at(eb) * gd[m];
          }
          return s;
        };
        auto rho = [&](MultiIndex b) { return leibniz(b, gu.data(), 1); };
        auto d_rho = [&](MultiIndex b) { return leibniz(b, gw.data(), 2); };
        auto idx = [](int i, int j) {
          MultiIndex b{0, 0, 0};
          ++b[i];
          ++b[j];
          return b;
        };
        double grad_sum = 0.0;
        for (int i = 0; i < 3; ++i) {
          MultiIndex b{0, 0, 0};
          ++b[i];
          grad_sum += std::abs(rho(b));
        }
        double tang = 0.0;
        for (int l = 0; l < 2; ++l) {
          MultiIndex b{0, 0, 0};
          ++b[l];
          const double r1 = rho(b);
          tang += r1 * r1;
          for (int j = 0; j < 3; ++j) {
            const double r2 = rho(idx(l, j));
            tang += r2 * r2;
          }
        }
        double second = 0.0;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) {
            const MultiIndex b = idx(i, j);
            second += std::abs(d_rho(b));
            for (int l = 0; l < 2; ++l) {
              MultiIndex c = b;
              ++c[l];
              second += std::abs(d_rho(c));
            }
          }
        const double wq = de.w[q];
        l3 += wq * grad_sum * grad_sum * grad_sum;
        h1 += wq * tang;
        wsec += wq * second * second;
      }
    }
  const double area = 1.0 / static_cast<double>(g.plane());
  rec.grad_l3 = std::cbrt(l3 * area);
  rec.tangential_h1 = std::sqrt(h1 * area);
  rec.weighted_second = std::sqrt(wsec * area);
  return DensityProfile{std::move(rho0), rec};
}

NormalDerivativeRecord normal_derivative(const Field& theta) {
  const GridSpec& g = theta.grid();
  const Field d3 = diff(theta, 3);
  NormalDerivativeRecord r;
  r.min = std::numeric_limits<double>::infinity();
  r.max = -std::numeric_limits<double>::infinity();
  const std::size_t plane = g.plane();
  const auto v = d3.component(0);
  for (std::size_t q = 0; q < plane; ++q)
    for (double n : {-v[q], v[v.size() - plane + q]}) {
      if (!std::isfinite(n)) r.finite = false;
      r.min = std::min(r.min, n);
      r.max = std::max(r.max, n);
    }
  return r;
}

namespace {

void check_vacuum_profile(const Field& f, const char* name) {
  const GridSpec& g = f.grid();
  for (int i3 = 0; i3 < g.n3(); ++i3)
    for (int i2 = 0; i2 < g.n2(); ++i2)
      for (int i1 = 0; i1 < g.n1(); ++i1) {
        const double v = f.at(0, i3, i2, i1);
        if (is_boundary_plane(g, i3)) {
          if (v != 0.0) throw PositivityViolation(std::string(name) + " must vanish on the boundary");
        } else if (!(v > 0.0)) {
          throw PositivityViolation(std::string(name) + " must be positive in the interior");
        }
      }
}

void check_normal_derivative(const NormalDerivativeRecord& r) {
  if (!r.finite) throw VacuumConditionViolation("normal derivative of theta0 is not finite");
  if (r.max >= -kVacuumTol)
    throw VacuumConditionViolation("normal derivative of theta0 must be negative on the boundary (max = " +
                                   std::to_string(r.max) + ")");
}

}  // namespace

InitialData default_dataset(const GridSpec& g, double alpha) {
  DensityProfile rho = build_density(g, alpha, [](double, double, double) { return 1.0; });
  TemperatureProfile th = build_temperature(g, [](double, double, double x3) { return x3 * (1.0 - x3); });
  return InitialData{std::move(rho.rho0), Field(g, 3), std::move(th.theta0), alpha};
}

TemperatureProfile build_temperature(const GridSpec& g, const Field::PointFn& profile) {
  Field theta0 = Field::sample(g, profile);
  if (!theta0.all_finite()) throw PositivityViolation("theta0 is not finite");
  // Snap round-off at the faces so that the trace is exactly zero.
  const std::size_t plane = g.plane();
  auto v = theta0.component(0);
  for (std::size_t q = 0; q < plane; ++q) {
    for (double* x : {&v[q], &v[v.size() - plane + q]})
      if (std::abs(*x) < 1e-14) *x = 0.0;
  }
  const NormalDerivativeRecord n = normal_derivative(theta0);
  check_normal_derivative(n);
  check_vacuum_profile(theta0, "theta0");
  return TemperatureProfile{std::move(theta0), n};
}

void validate_initial_data(const InitialData& data) {
  if (!(data.alpha > 0.0)) throw DecayViolation("alpha must be positive");
  require_same_grid(data.rho0, data.theta0);
  require_same_grid(data.rho0, data.u0);
  if (!data.u0.all_finite()) throw NonFiniteState("u0 is not finite");
  check_vacuum_profile(data.rho0, "rho0");
  check_vacuum_profile(data.theta0, "theta0");
  check_normal_derivative(normal_derivative(data.theta0));
}

DerivedInitials initial_time_derivatives(const InitialData& data, const PhysParams& p, const GridSpec& g) {
  require_same_grid(data.rho0, Field(g, 1));
  const Deformation id = compute_deformation(FlowMap::identity(g));
  const Field& rho0 = data.rho0;

  const Field mom = momentum_rhs(data.u0, data.theta0, id, rho0, p);
  const Field tem = temperature_rhs(data.u0, data.theta0, id, rho0, p);
  DerivedInitials di{divide_by(mom, rho0, 1.0), Field(g, 3), divide_by(tem, rho0, p.c_v), Field(g, 1), 1.0};
  check_bounded(di.u0t, "u0t");
  check_bounded(di.theta0t, "theta0t");

  const DeformationRates rates = deformation_rates(id, data.u0);
  const Field rho0_theta_t = (1.0 / p.c_v) * tem;
  const StateRates r{di.u0t, di.theta0t, rates, &rho0_theta_t};
  di.u0tt = divide_by(momentum_rhs_rate(data.u0, data.theta0, id, r, rho0, p), rho0, 1.0);
  di.theta0tt = divide_by(temperature_rhs_rate(data.u0, data.theta0, id, r, rho0, p), rho0, p.c_v);
  check_bounded(di.u0tt, "u0tt");
  check_bounded(di.theta0tt, "theta0tt");
  di.M0 = compute_M0(di, data, g);
  return di;
}

double compute_M0(const DerivedInitials& di, const InitialData& data, const GridSpec&) {
  const Field* w = &data.rho0;
  return sobolev_norm_sq(di.u0tt, 0, w) + sobolev_norm_sq(di.u0t, 1) + sobolev_norm_sq(data.u0, 3) +
         sobolev_norm_sq(di.theta0tt, 0, w) + sobolev_norm_sq(di.theta0t, 1) + sobolev_norm_sq(data.theta0, 3) + 1.0;
}

CompatibilityReport check_compatibility(const InitialData& data, const DerivedInitials& di, const PhysParams& p) {
  const GridSpec& g = data.theta0.grid();
  const Deformation id = compute_deformation(FlowMap::identity(g));
  CompatibilityReport r;
  const Field dbar = tangential_gradient(data.theta0);
  r.theta0_trace = boundary_max_abs(data.theta0);
  r.dbar_theta0_trace = boundary_max_abs(dbar);
  r.dbar2_theta0_trace = boundary_max_abs(tangential_gradient(dbar));
  r.theta0t_trace = boundary_max_abs(di.theta0t);

  auto normal_stress = [&](const Field& w) {
    const Field S = stress(w, id, p);
    Field s3(g, 3);
    for (int i = 0; i < 3; ++i) s3.assign(i, S.extract(3 * i + 2));
    return boundary_max_abs(s3);
  };
  r.stress_trace = normal_stress(data.u0);
  r.dbar_stress_trace = std::max(normal_stress(diff(data.u0, 1)), normal_stress(diff(data.u0, 2)));

  const std::pair<const char*, double> items[] = {
      {"theta0 does not vanish on the boundary", r.theta0_trace},
      {"tangential derivative of theta0 does not vanish on the boundary", r.dbar_theta0_trace},
      {"second tangential derivative of theta0 does not vanish on the boundary", r.dbar2_theta0_trace},
      {"theta0t does not vanish on the boundary", r.theta0t_trace},
      {"S_Id[u0]^{i3} does not vanish on the boundary", r.stress_trace},
      {"S_Id[dbar u0]^{i3} does not vanish on the boundary", r.dbar_stress_trace},
  };
  for (const auto& [msg, val] : items)
    if (!(val <= kCompatibilityTol)) {
      r.pass = false;
      r.warnings.push_back(std::string(msg) + " (max " + std::to_string(val) + ")");
    }
  return r;
}

}  // namespace fbns
