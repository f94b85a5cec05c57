#include "spinbath/rng.hpp"

#include <cmath>
#include <numbers>

namespace spinbath {

std::pair<double, double> CounterRng::gaussian_pair() {
  // r0 in (0, 1] keeps the logarithm finite.
  const double r0 = 1.0 - uniform();
  const double r1 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(r0));
  const double angle = 2.0 * std::numbers::pi * r1;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace spinbath
