#pragma once

#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

// Pure-jump subordinators from Poisson point processes of jump sizes, their
// right-continuous generalized inverses (local time), and the iterated-
// logarithm statistic of the inverse. Jump sums use the strict convention
// xi_theta = sum of sizes with arrival < theta, so the jump at theta itself is
// excluded; the inverse below is exact for that convention.

namespace bmlab {

// nu(sigma > t) = c log(1/t) for t in (theta_min, 1), zero beyond 1.
struct LogTailSpec {
  double c = 0.0;
  double theta_min = 1e-8;
};

// Gamma subordinator: density b e^{-beta s}/s, tail b E1(beta s), truncated at
// theta_min; closed-form untruncated exponent b log(1 + lambda/beta).
struct GammaSpec {
  double b = 1.0;
  double beta = 1.0;
  double theta_min = 1e-8;
};

using LevyMeasureSpec = std::variant<LogTailSpec, GammaSpec>;

// nu(sigma > theta_min): the Poisson rate of the truncated jump process.
double levy_total_rate(const LevyMeasureSpec& spec);

// Inverse-transform sampling: the jump size s with nu(sigma > s) = u for
// u in (0, total_rate).
double levy_size_quantile(const LevyMeasureSpec& spec, double u);

// Truncated Laplace exponent by quadrature:
//   Phi_trunc(lambda) = int (1 - e^{-lambda s}) nu(ds) over (theta_min, cap).
double phi_trunc(const LevyMeasureSpec& spec, double lambda);

double gamma_phi_closed(const GammaSpec& g, double lambda);

struct SubordinatorPath {
  double horizon = 0.0;
  std::vector<double> arrivals;  // ascending, in [0, horizon)
  std::vector<double> sizes;
  std::vector<double> cumsum;
  double total() const { return cumsum.empty() ? 0.0 : cumsum.back(); }
};

// Jump count ~ Poisson(T * rate), sizes i.i.d. by inverse transform, arrivals
// i.i.d. uniform on [0, T); sorted by arrival (ties broken by draw order).
SubordinatorPath sample_subordinator(const LevyMeasureSpec& spec, double T,
                                     uint64_t seed);

struct InverseLocalTime {
  double value = 0.0;
  bool censored = false;  // horizon exhausted (xi_T <= t)
};

// S(t) = sup{theta : xi_theta <= t}, exact from the sorted jump list.
InverseLocalTime inverse_local_time(const SubordinatorPath& path, double t);

// S(t) Phi(log|log Phi(1/t)| / t) / log|log Phi(1/t)|. Requires
// Phi(1/t) > e so the normalizer is positive (loosest precondition that
// admits the dyadic grids exercised downstream).
double lil_statistic(const std::function<double(double)>& phi, double t,
                     const SubordinatorPath& path);

// Per-replica running maxima of the statistic over a decreasing t grid.
std::vector<double> empirical_limsup(const LevyMeasureSpec& spec,
                                     const std::function<double(double)>& phi,
                                     const std::vector<double>& t_levels, int n,
                                     uint64_t seed, int threads = 1,
                                     double horizon = 1.0);

}  // namespace bmlab
