#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "bmlab/errors.hpp"

namespace bmlab {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double resid_stderr = 0.0;  // weighted RMS residual, dof-corrected
};

// Weighted least squares of y against x. Weights default to 1.
inline LinearFit weighted_linear_fit(const std::vector<double>& x,
                                     const std::vector<double>& y,
                                     const std::vector<double>& w = {}) {
  const std::size_t n = x.size();
  if (n != y.size() || (!w.empty() && w.size() != n))
    throw DomainError("weighted_linear_fit: size mismatch");
  if (n < 2) throw DomainError("weighted_linear_fit: need at least two points");
  double W = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    W += wi;
    sx += wi * x[i];
    sy += wi * y[i];
  }
  const double mx = sx / W, my = sy / W;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    sxx += wi * (x[i] - mx) * (x[i] - mx);
    sxy += wi * (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw DegenerateFitError("weighted_linear_fit: degenerate abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    ssr += wi * r * r;
  }
  if (n > 2) {
    const double s2 = ssr / (W * (1.0 - 2.0 / static_cast<double>(n)));
    f.resid_stderr = std::sqrt(s2);
    f.slope_stderr = std::sqrt(ssr / (static_cast<double>(n) - 2.0) / sxx *
                               (W / static_cast<double>(n)));
  }
  return f;
}

inline double median_of(std::vector<double> v) {
  if (v.empty()) throw DomainError("median_of: empty");
  std::size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + n / 2, v.end());
  double hi = v[n / 2];
  if (n % 2 == 1) return hi;
  std::nth_element(v.begin(), v.begin() + n / 2 - 1, v.end());
  return 0.5 * (v[n / 2 - 1] + hi);
}

}  // namespace bmlab
