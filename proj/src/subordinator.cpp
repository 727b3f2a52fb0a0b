#include "bmlab/subordinator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bmlab/errors.hpp"
#include "bmlab/parallel.hpp"
#include "bmlab/quadrature.hpp"
#include "bmlab/rng.hpp"
#include "bmlab/special.hpp"

namespace bmlab {

namespace {

void validate(const LevyMeasureSpec& spec) {
  if (const auto* lt = std::get_if<LogTailSpec>(&spec)) {
    if (!(lt->c > 0.0)) throw DomainError("LogTailSpec: c must be positive");
    if (!(lt->theta_min > 0.0) || !(lt->theta_min < 1.0))
      throw DomainError("LogTailSpec: theta_min must lie in (0,1)");
  } else {
    const auto& g = std::get<GammaSpec>(spec);
    if (!(g.b > 0.0) || !(g.beta > 0.0) || !(g.theta_min > 0.0))
      throw DomainError("GammaSpec: parameters must be positive");
  }
}

double theta_min_of(const LevyMeasureSpec& spec) {
  if (const auto* lt = std::get_if<LogTailSpec>(&spec)) return lt->theta_min;
  return std::get<GammaSpec>(spec).theta_min;
}

// solve E1(x) = target on [lo, hi], E1 decreasing
double invert_exp1(double target, double lo, double hi) {
  double flo = exp1(lo);
  if (target >= flo) return lo;
  while (exp1(hi) > target) hi *= 2.0;
  for (int i = 0; i < 30; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (exp1(mid) > target)
      lo = mid;
    else
      hi = mid;
  }
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 8; ++i) {
    const double f = exp1(x) - target;
    const double df = -std::exp(-x) / x;
    double nx = x - f / df;
    if (!(nx > lo) || !(nx < hi)) nx = 0.5 * (lo + hi);
    if (exp1(nx) > target)
      lo = nx;
    else
      hi = nx;
    x = nx;
  }
  return x;
}

}  // namespace

double levy_total_rate(const LevyMeasureSpec& spec) {
  validate(spec);
  if (const auto* lt = std::get_if<LogTailSpec>(&spec))
    return lt->c * std::log(1.0 / lt->theta_min);
  const auto& g = std::get<GammaSpec>(spec);
  return g.b * exp1(g.beta * g.theta_min);
}

double levy_size_quantile(const LevyMeasureSpec& spec, double u) {
  validate(spec);
  const double M = levy_total_rate(spec);
  if (!(u > 0.0) || !(u < M)) throw DomainError("levy_size_quantile: u outside (0, rate)");
  if (const auto* lt = std::get_if<LogTailSpec>(&spec)) return std::exp(-u / lt->c);
  const auto& g = std::get<GammaSpec>(spec);
  const double x = invert_exp1(u / g.b, g.beta * g.theta_min, 64.0);
  return x / g.beta;
}

double phi_trunc(const LevyMeasureSpec& spec, double lambda) {
  validate(spec);
  if (!(lambda > 0.0)) throw DomainError("phi_trunc: lambda must be positive");
  quad::QuadOptions opt{1e-9, 0.0, 4000};
  if (const auto* lt = std::get_if<LogTailSpec>(&spec)) {
    const double c = lt->c;
    return quad::integrate(
               [c, lambda](double s) { return -std::expm1(-lambda * s) * c / s; },
               lt->theta_min, 1.0, opt)
        .value;
  }
  const auto& g = std::get<GammaSpec>(spec);
  const double hi = std::fmax(45.0 / g.beta, g.theta_min * 2.0);
  return quad::integrate(
             [&g, lambda](double s) {
               return -std::expm1(-lambda * s) * g.b * std::exp(-g.beta * s) / s;
             },
             g.theta_min, hi, opt)
      .value;
}

double gamma_phi_closed(const GammaSpec& g, double lambda) {
  return g.b * std::log1p(lambda / g.beta);
}

SubordinatorPath sample_subordinator(const LevyMeasureSpec& spec, double T,
                                     uint64_t seed) {
  validate(spec);
  if (!(T >= 0.0)) throw DomainError("sample_subordinator: negative horizon");
  SubordinatorPath path;
  path.horizon = T;
  if (T == 0.0) return path;

  const double M = levy_total_rate(spec);
  const double mu = T * M;
  if (mu > 500.0)
    throw DomainError("sample_subordinator: Poisson mean too large for the sampler");

  // jump count: multiplication method
  const double floor_p = std::exp(-mu);
  long n = -1;
  double p = 1.0;
  uint64_t draw = 0;
  while (p > floor_p) {
    p *= rng::u01_at(seed, rng::channel::counts, draw / 2, static_cast<int>(draw % 2));
    ++draw;
    ++n;
  }
  if (n <= 0) return path;

  std::vector<std::pair<double, double>> jumps(n);
  for (long j = 0; j < n; ++j) {
    const double us =
        rng::u01_at(seed, rng::channel::sizes, static_cast<uint64_t>(j) / 2, static_cast<int>(j % 2));
    const double ua =
        rng::u01_at(seed, rng::channel::arrivals, static_cast<uint64_t>(j) / 2, static_cast<int>(j % 2));
    jumps[j] = {T * ua, levy_size_quantile(spec, us * M)};
  }
  std::stable_sort(jumps.begin(), jumps.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  path.arrivals.resize(n);
  path.sizes.resize(n);
  path.cumsum.resize(n);
  double acc = 0.0;
  for (long j = 0; j < n; ++j) {
    path.arrivals[j] = jumps[j].first;
    path.sizes[j] = jumps[j].second;
    acc += jumps[j].second;
    path.cumsum[j] = acc;
  }
  return path;
}

InverseLocalTime inverse_local_time(const SubordinatorPath& path, double t) {
  if (!(t >= 0.0)) throw DomainError("inverse_local_time: t must be >= 0");
  const auto it = std::upper_bound(path.cumsum.begin(), path.cumsum.end(), t);
  const std::size_t idx = static_cast<std::size_t>(it - path.cumsum.begin());
  if (idx >= path.arrivals.size()) return {path.horizon, true};
  return {path.arrivals[idx], false};
}

double lil_statistic(const std::function<double(double)>& phi, double t,
                     const SubordinatorPath& path) {
  if (!(t > 0.0)) throw DomainError("lil_statistic: t must be positive");
  const double phi1 = phi(1.0 / t);
  constexpr double kE = 2.718281828459045235;
  if (!(phi1 > kE))
    throw DomainError("lil_statistic: t not small enough (Phi(1/t) <= e)");
  const double lam = std::log(std::fabs(std::log(phi1)));
  const double s = inverse_local_time(path, t).value;
  return s * phi(lam / t) / lam;
}

std::vector<double> empirical_limsup(const LevyMeasureSpec& spec,
                                     const std::function<double(double)>& phi,
                                     const std::vector<double>& t_levels, int n,
                                     uint64_t seed, int threads, double horizon) {
  for (std::size_t i = 0; i + 1 < t_levels.size(); ++i)
    if (!(t_levels[i] > t_levels[i + 1]))
      throw DomainError("empirical_limsup: grid must be decreasing");
  // cache the two Phi evaluations per level: they do not depend on the path
  struct LevelCtx {
    double t, lam, phi_scaled;
  };
  std::vector<LevelCtx> ctx;
  ctx.reserve(t_levels.size());
  constexpr double kE = 2.718281828459045235;
  for (double t : t_levels) {
    const double phi1 = phi(1.0 / t);
    if (!(phi1 > kE))
      throw DomainError("empirical_limsup: grid level with Phi(1/t) <= e");
    const double lam = std::log(std::fabs(std::log(phi1)));
    ctx.push_back({t, lam, phi(lam / t)});
  }
  std::vector<double> maxima(n, 0.0);
  parallel_for(n, threads, [&](std::size_t rep) {
    const SubordinatorPath path =
        sample_subordinator(spec, horizon, rng::derive_seed(seed, rep));
    double best = 0.0;
    for (const auto& lc : ctx) {
      const double s = inverse_local_time(path, lc.t).value;
      best = std::fmax(best, s * lc.phi_scaled / lc.lam);
    }
    maxima[rep] = best;
  });
  return maxima;
}

}  // namespace bmlab
