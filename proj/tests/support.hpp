#pragma once

// Shared analytic fixtures for the test suites.

#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "fbns/grid.hpp"
#include "fbns/kinematics.hpp"

namespace fbns::testing {

inline constexpr double pi = std::numbers::pi;

/// xi^i(x) = amp * sum_q c_q sin(2 pi (k1 x1 + k2 x2) + phi_q) * P_q(x3), with
/// P_q a cubic, band-limited in x1, x2 and polynomial in x3. Values and first
/// derivatives are available in closed form.
class RandomDisplacement {
 public:
  struct Term {
    int comp, k1, k2;
    double c, phi;
    std::array<double, 4> poly;
  };

  RandomDisplacement(unsigned seed, double amp, int terms = 6) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> kd(-3, 3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 3; ++i)
      for (int q = 0; q < terms; ++q) {
        Term t{i, kd(rng), kd(rng), u(rng), pi * u(rng), {u(rng), u(rng), u(rng), u(rng)}};
        terms_.push_back(t);
      }
    // Scale so that the largest first derivative stays near amp.
    double s = 0.0;
    for (const auto& t : terms_) {
      double pa = 0.0;
      for (double p : t.poly) pa += std::abs(p);
      s += std::abs(t.c) * pa * (1.0 + 2 * pi * (std::abs(t.k1) + std::abs(t.k2)));
    }
    scale_ = amp * 3.0 / s;
  }

  double value(int i, double x1, double x2, double x3) const {
    double s = 0.0;
    for (const auto& t : terms_)
      if (t.comp == i) s += t.c * std::sin(phase(t, x1, x2)) * poly(t, x3);
    return scale_ * s;
  }

  /// d xi^i / d x_j
  double grad(int i, int j, double x1, double x2, double x3) const {
    double s = 0.0;
    for (const auto& t : terms_) {
      if (t.comp != i) continue;
      const double ph = phase(t, x1, x2);
      if (j == 0) s += t.c * 2 * pi * t.k1 * std::cos(ph) * poly(t, x3);
      if (j == 1) s += t.c * 2 * pi * t.k2 * std::cos(ph) * poly(t, x3);
      if (j == 2) s += t.c * std::sin(ph) * dpoly(t, x3);
    }
    return scale_ * s;
  }

  Field sample(const GridSpec& g) const {
    return Field::sample(g, 3, [this](int c, double x1, double x2, double x3) { return value(c, x1, x2, x3); });
  }

 private:
  static double phase(const Term& t, double x1, double x2) { return 2 * pi * (t.k1 * x1 + t.k2 * x2) + t.phi; }
  static double poly(const Term& t, double x) {
    return t.poly[0] + x * (t.poly[1] + x * (t.poly[2] + x * t.poly[3]));
  }
  static double dpoly(const Term& t, double x) { return t.poly[1] + x * (2 * t.poly[2] + x * 3 * t.poly[3]); }

  std::vector<Term> terms_;
  double scale_ = 1.0;
};

/// cof(M)_{ij} = 1/2 eps_{imn} eps_{jpq} M_{mp} M_{nq}
inline std::array<double, 9> levi_civita_cofactor(const std::array<double, 9>& M) {
  auto eps = [](int i, int j, int k) { return static_cast<double>((i - j) * (j - k) * (k - i)) / 2.0; };
  std::array<double, 9> c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int m = 0; m < 3; ++m)
        for (int n = 0; n < 3; ++n)
          for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q) s += eps(i, m, n) * eps(j, p, q) * M[3 * m + p] * M[3 * n + q];
      c[3 * i + j] = 0.5 * s;
    }
  return c;
}

inline FlowMap flow_map_from(const Field& xi) { return FlowMap{xi, 0.0}; }

}  // namespace fbns::testing
