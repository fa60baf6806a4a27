#include "florasim/rng.hpp"

#include <cmath>

namespace florasim {

double Rng::gaussian(double sigma) {
  double u1 = uniform();
  double u2 = uniform();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  double r = std::sqrt(-2.0 * std::log(u1));
  return sigma * r * std::cos(2.0 * M_PI * u2);
}

}  // namespace florasim
