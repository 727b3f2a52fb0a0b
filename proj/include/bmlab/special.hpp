#pragma once

#include <cmath>

#include "bmlab/errors.hpp"

namespace bmlab {

// Exponential integral E1(x), x > 0. Power series below 1, modified Lentz
// continued fraction above. Absolute accuracy ~1e-15.
inline double exp1(double x) {
  if (!(x > 0.0)) throw DomainError("exp1: x must be positive");
  constexpr double kEulerGamma = 0.57721566490153286061;
  if (x <= 1.0) {
    double sum = 0.0;
    double term = 1.0;
    for (int k = 1; k <= 40; ++k) {
      term *= -x / k;
      const double add = -term / k;
      sum += add;
      if (std::fabs(add) < 1e-18 * (std::fabs(sum) + 1.0)) break;
    }
    return -kEulerGamma - std::log(x) + sum;
  }
  if (x > 700.0) return 0.0;
  // E1(x) = e^{-x} * cf, cf = 1/(x+1- 1/(x+3- 4/(x+5- 9/(...))))
  const double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 200; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x) * h;
}

}  // namespace bmlab
