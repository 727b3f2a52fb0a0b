#pragma once

#include "bmlab/quadrature.hpp"

// Deterministic quadrature chain for the excursion-length calculus: the
// small-theta tail of the excursion-length measure with logarithmic weight on
// a window of radius delta, the Laplace exponent it induces, and the
// triple-log gauge reconstruction. The radial tail integral
//
//   tail(theta) = a sqrt(2 pi) (1/theta) int_0^delta (-log r) e^{-r^2/(2 theta)} r dr
//
// is evaluated after the substitution s^2 = r^2/theta as
//
//   a sqrt(2 pi) [ int_0^{delta/sqrt(theta)} (-log s) e^{-s^2/2} s ds
//                  - log(sqrt(theta)) (1 - e^{-delta^2/(2 theta)}) ],
//
// with the logarithmic endpoint handled by a log substitution. The kernel
// normalization (the sqrt(2 pi) factor) is kept exactly as displayed so the
// asymptotic slope of tail(theta) against log(1/theta) is a sqrt(pi/2).

namespace bmlab {

struct TailFunction {
  double a = 0.0;         // local-time rate, must lie in (0, 1/2)
  double delta = 0.1;     // window radius in (0, 1)
  double const_cap = 0.0; // bound for the outside-window remainder
};

// Validates the invariants and estimates const_cap by quadrature at
// theta = delta^2 (the scale where the kernel mass reaches the window edge).
TailFunction make_tail_function(double a, double delta);

// tail(theta) for 0 < theta < delta^2.
double excursion_tail(double theta, const TailFunction& tf);

struct LaplaceExponent {
  TailFunction tail;
  double rel_tol = 1e-6;  // quadrature policy
};

// Phi(lambda) = int_{e^{-lambda d}}^{1} tail(-log t / lambda) dt, d = delta^2,
// computed in the variable u = -log t / lambda. Valid for lambda >= 1;
// relative quadrature error <= 1e-4 over lambda in [1, 1e12].
double laplace_exponent(double lambda, const LaplaceExponent& le);

struct PhiWithRemainder {
  double value = 0.0;          // the window integral (lower estimate)
  double remainder_cap = 0.0;  // upper bound for the neglected contributions
};

PhiWithRemainder laplace_exponent_with_remainder(double lambda, const LaplaceExponent& le);

// a sqrt(pi/2) log|log Phi(1/eps)| / Phi(log|log Phi(1/eps)| / eps).
// Requires Phi(1/eps) > e so the outer log is positive (this is the loosest
// precondition under which every factor is well defined; it admits the whole
// eps ranges exercised downstream).
double lil_gauge(double eps, const LaplaceExponent& le);

}  // namespace bmlab
