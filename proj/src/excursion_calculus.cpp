#include "bmlab/excursion_calculus.hpp"

#include <cmath>

#include "bmlab/errors.hpp"

namespace bmlab {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310005024;
constexpr double kSqrtPiOver2 = 1.2533141373155002512;

// J(S) = int_0^min(S,40) (-log s) e^{-s^2/2} s ds. The integrand vanishes at
// both ends; the log endpoint is resolved by s = e^{-u}.
double window_integral(double S, double rel_tol) {
  const double hi = std::fmin(S, 40.0);
  const double split = std::fmin(0.05, hi);
  quad::QuadOptions opt{rel_tol, 0.0, 4000};
  double total = 0.0;
  // [0, split] with s = e^{-u}:  integrand du = u e^{-e^{-2u}/2} e^{-2u}
  const double u_lo = -std::log(split);
  total += quad::integrate_to_inf(
               [](double u) {
                 const double s2 = std::exp(-2.0 * u);
                 return u * std::exp(-0.5 * s2) * s2;
               },
               u_lo, opt)
               .value;
  if (hi > split) {
    total += quad::integrate(
                 [](double s) { return -std::log(s) * std::exp(-0.5 * s * s) * s; },
                 split, hi, opt)
                 .value;
  }
  return total;
}

double tail_formula(double theta, double a, double delta, double rel_tol) {
  const double S = delta / std::sqrt(theta);
  const double mass = -std::expm1(-delta * delta / (2.0 * theta));
  return a * kSqrt2Pi * (window_integral(S, rel_tol) - std::log(std::sqrt(theta)) * mass);
}

}  // namespace

TailFunction make_tail_function(double a, double delta) {
  if (!(a > 0.0) || !(a < 0.5))
    throw DomainError("TailFunction: rate a must lie in (0, 1/2)");
  if (!(delta > 0.0) || !(delta < 1.0))
    throw DomainError("TailFunction: window delta must lie in (0, 1)");
  TailFunction tf;
  tf.a = a;
  tf.delta = delta;
  tf.const_cap = tail_formula(delta * delta, a, delta, 1e-8);
  return tf;
}

double excursion_tail(double theta, const TailFunction& tf) {
  if (!(theta > 0.0) || !(theta < tf.delta * tf.delta))
    throw DomainError("excursion_tail: need 0 < theta < delta^2");
  return tail_formula(theta, tf.a, tf.delta, 1e-8);
}

double laplace_exponent(double lambda, const LaplaceExponent& le) {
  return laplace_exponent_with_remainder(lambda, le).value;
}

PhiWithRemainder laplace_exponent_with_remainder(double lambda,
                                                 const LaplaceExponent& le) {
  if (!(lambda >= 1.0)) throw DomainError("laplace_exponent: need lambda >= 1");
  const double d = le.tail.delta * le.tail.delta;
  // after u = -log t / lambda and w = lambda u:
  //   Phi = int_0^{lambda d} e^{-w} tail(w/lambda) dw
  const double w_hi = std::fmin(lambda * d, 45.0);
  const double a = le.tail.a;
  const double delta = le.tail.delta;
  auto integrand = [&](double w) {
    return std::exp(-w) * tail_formula(w / lambda, a, delta, 1e-8);
  };
  quad::QuadOptions opt{le.rel_tol, 0.0, 4000};
  double total = 0.0;
  const double w_split = std::fmin(1e-3, w_hi);
  {
    // [0, w_split] with w = e^{-v}; integrand decays like v e^{-v}
    const double v_lo = -std::log(w_split);
    total += quad::integrate_to_inf(
                 [&](double v) {
                   const double w = std::exp(-v);
                   return integrand(w) * w;
                 },
                 v_lo, opt)
                 .value;
  }
  if (w_hi > w_split) total += quad::integrate(integrand, w_split, w_hi, opt).value;

  PhiWithRemainder out;
  out.value = total;
  // per-theta window remainder integrates to at most const_cap; the neglected
  // t < e^{-lambda d} region contributes at most e^{-lambda d} (tail(d) + cap)
  const double edge = std::exp(-lambda * d);
  out.remainder_cap = le.tail.const_cap + edge * 2.0 * le.tail.const_cap;
  return out;
}

double lil_gauge(double eps, const LaplaceExponent& le) {
  if (!(eps > 0.0) || !(eps < 1.0)) throw DomainError("lil_gauge: eps outside (0,1)");
  const double phi1 = laplace_exponent(1.0 / eps, le);
  constexpr double kE = 2.718281828459045235;
  if (!(phi1 > kE))
    throw DomainError("lil_gauge: eps not small enough (Phi(1/eps) <= e)");
  const double lam_factor = std::log(std::fabs(std::log(phi1)));
  const double denom = laplace_exponent(lam_factor / eps, le);
  return le.tail.a * kSqrtPiOver2 * lam_factor / denom;
}

}  // namespace bmlab
