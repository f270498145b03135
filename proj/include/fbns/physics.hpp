#pragma once

namespace fbns {

/// Lamé viscosities, heat conductivity, gas constant, specific heat, adiabatic
/// exponent and entropy reference constant.
struct PhysParams {
  double mu = 1.0;
  double lambda = 0.0;
  double kappa = 1.0;
  double R = 1.0;
  double c_v = 1.0;
  double gamma = 2.0;
  double A_bar = 1.0;

  /// Throws InvalidParameter naming the first violated constraint.
  void validate() const;
};

}  // namespace fbns
