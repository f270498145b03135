#include "fbns/physics.hpp"

#include <cmath>

#include "fbns/error.hpp"

namespace fbns {

void PhysParams::validate() const {
  auto finite = [](double x) { return std::isfinite(x); };
  if (!finite(mu) || !finite(lambda) || !finite(kappa) || !finite(R) || !finite(c_v) || !finite(gamma) ||
      !finite(A_bar))
    throw InvalidParameter("physical parameters must be finite");
  if (!(mu > 0)) throw InvalidParameter("mu must be positive");
  if (!(2 * mu + 3 * lambda > 0)) throw InvalidParameter("2*mu + 3*lambda must be positive");
  if (!(kappa > 0)) throw InvalidParameter("kappa must be positive");
  if (!(R > 0)) throw InvalidParameter("R must be positive");
  if (!(c_v > 0)) throw InvalidParameter("c_v must be positive");
  if (!(gamma > 1)) throw InvalidParameter("gamma must exceed 1");
  if (!(A_bar > 0)) throw InvalidParameter("A_bar must be positive");
}

}  // namespace fbns
