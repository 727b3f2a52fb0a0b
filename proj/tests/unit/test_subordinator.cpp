#include <doctest.h>

#include <cmath>
#include <numeric>

#include "bmlab/errors.hpp"
#include "bmlab/parallel.hpp"
#include "bmlab/rng.hpp"
#include "bmlab/special.hpp"
#include "bmlab/stats.hpp"
#include "bmlab/subordinator.hpp"

using namespace bmlab;

namespace {

// xi_theta under the strict-sum convention, evaluated directly from the jump
// list (independent route for the Galois property test)
double xi_at(const SubordinatorPath& p, double theta) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.arrivals.size(); ++i)
    if (p.arrivals[i] < theta) s += p.sizes[i];
  return s;
}

constexpr double kC04 = 0.5013256549262001;  // 0.4 * sqrt(pi/2)

}  // namespace

TEST_SUITE("subordinator") {

TEST_CASE("exponential integral reference values") {
  // mpmath references
  CHECK(exp1(0.01) == doctest::Approx(4.0379295765381138).epsilon(1e-14));
  CHECK(exp1(0.25) == doctest::Approx(1.0442826344437382).epsilon(1e-14));
  CHECK(exp1(1.0) == doctest::Approx(0.21938393439552027).epsilon(1e-14));
  CHECK(exp1(3.0) == doctest::Approx(0.013048381094197037).epsilon(1e-13));
  CHECK(exp1(10.0) == doctest::Approx(4.1569689296853243e-6).epsilon(1e-13));
  CHECK(exp1(25.0) == doctest::Approx(5.3488997553402166e-13).epsilon(1e-12));
  CHECK(exp1(1e-8) == doctest::Approx(17.843465089050833).epsilon(1e-14));
  CHECK_THROWS_AS(exp1(0.0), DomainError);
}

TEST_CASE("size quantiles invert the tails") {
  const LevyMeasureSpec lt = LogTailSpec{0.7, 1e-6};
  const double Mlt = levy_total_rate(lt);
  CHECK(Mlt == doctest::Approx(0.7 * std::log(1e6)).epsilon(1e-14));
  for (double u : {0.01 * Mlt, 0.5 * Mlt, 0.99 * Mlt}) {
    const double s = levy_size_quantile(lt, u);
    CHECK(0.7 * std::log(1.0 / s) == doctest::Approx(u).epsilon(1e-12));
  }
  const LevyMeasureSpec g = GammaSpec{1.3, 0.8, 1e-8};
  const double Mg = levy_total_rate(g);
  for (double u : {0.01 * Mg, 0.5 * Mg, 0.99 * Mg}) {
    const double s = levy_size_quantile(g, u);
    CHECK(1.3 * exp1(0.8 * s) == doctest::Approx(u).epsilon(1e-9));
  }
}

TEST_CASE("zero horizon gives the empty path") {
  const SubordinatorPath p = sample_subordinator(LogTailSpec{0.5, 1e-6}, 0.0, 4);
  CHECK(p.arrivals.empty());
  CHECK(p.total() == 0.0);
  CHECK(inverse_local_time(p, 0.5).censored);
}

TEST_CASE("two-jump inverse fixture") {
  SubordinatorPath p;
  p.horizon = 1.0;
  p.arrivals = {0.3, 0.7};
  p.sizes = {0.5, 0.2};
  p.cumsum = {0.5, 0.7};
  CHECK(inverse_local_time(p, 0.4).value == 0.3);
  CHECK(inverse_local_time(p, 0.6).value == 0.7);
  CHECK(inverse_local_time(p, 0.0).value == 0.3);  // S(0) = first arrival
  const InverseLocalTime c = inverse_local_time(p, 0.7);
  CHECK(c.censored);
  CHECK(c.value == 1.0);
}

TEST_CASE("galois property of the generalized inverse") {
  for (uint64_t seed = 0; seed < 30; ++seed) {
    const SubordinatorPath p =
        sample_subordinator(GammaSpec{1.0, 1.0, 1e-6}, 1.0, rng::derive_seed(71, seed));
    if (p.arrivals.empty()) continue;
    for (double t : {1e-7, 1e-4, 0.05, 0.4, 2.0}) {
      const InverseLocalTime inv = inverse_local_time(p, t);
      for (double theta : {0.0, 0.1, 0.3, inv.value, 0.9, 1.0}) {
        const bool lhs = xi_at(p, theta) <= t;
        const bool rhs = theta <= inv.value;
        CHECK(lhs == rhs);
      }
    }
  }
}

TEST_CASE("gamma subordinator Laplace transform at lambda = 1" *
          doctest::timeout(600)) {
  // closed form (1+lambda)^{-1} = 0.5; truncation shifts it by ~5e-9
  const int n = 100000;
  const LevyMeasureSpec spec = GammaSpec{1.0, 1.0, 1e-8};
  std::vector<double> vals(n);
  parallel_for(n, 2, [&](std::size_t rep) {
    vals[rep] = std::exp(-sample_subordinator(spec, 1.0, rng::derive_seed(72, rep)).total());
  });
  double mean = 0.0;
  for (double v : vals) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : vals) var += (v - mean) * (v - mean);
  var /= n - 1.0;
  const double se = std::sqrt(var / n);
  CHECK(std::fabs(mean - 0.5) <= 3.0 * se);
  // and the quadrature exponent agrees with ln 2 up to the truncation bite
  CHECK(phi_trunc(spec, 1.0) == doctest::Approx(0.69314717055995).epsilon(1e-10));
}

TEST_CASE("campbell identity for the logarithmic tail" * doctest::timeout(600)) {
  // mpmath references for the truncated exponent
  const LevyMeasureSpec ref = LogTailSpec{0.5, 1e-6};
  CHECK(phi_trunc(ref, 1.0) == doctest::Approx(0.39829929964865).epsilon(1e-9));
  const LevyMeasureSpec spec = LogTailSpec{kC04, 1e-8};
  CHECK(phi_trunc(spec, 0.5) == doctest::Approx(0.22250941849088).epsilon(1e-9));
  CHECK(phi_trunc(spec, 1.0) == doctest::Approx(0.39935581081829).epsilon(1e-9));
  CHECK(phi_trunc(spec, 5.0) == doctest::Approx(1.0968011817276).epsilon(1e-9));

  const int n = 100000;
  std::vector<double> totals(n);
  parallel_for(n, 2, [&](std::size_t rep) {
    totals[rep] = sample_subordinator(spec, 1.0, rng::derive_seed(73, rep)).total();
  });
  for (double lam : {0.5, 1.0, 5.0}) {
    double mean = 0.0;
    for (double xi : totals) mean += std::exp(-lam * xi);
    mean /= n;
    double var = 0.0;
    for (double xi : totals) {
      const double d = std::exp(-lam * xi) - mean;
      var += d * d;
    }
    var /= n - 1.0;
    const double se = std::sqrt(var / n);
    CHECK(std::fabs(mean - std::exp(-phi_trunc(spec, lam))) <= 3.0 * se);
  }
}

TEST_CASE("lowering theta_min only adds jumps (band coupling)") {
  // explicit band-superposition coupling sharing the coarse-band draws
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const SubordinatorPath coarse =
        sample_subordinator(LogTailSpec{0.8, 1e-6}, 1.0, rng::derive_seed(74, seed));
    // independent fine band nu restricted to (1e-8, 1e-6]: tail c log(1e-6/s)
    const SubordinatorPath fine_band =
        sample_subordinator(LogTailSpec{0.8, 0.01}, 1.0, rng::derive_seed(75, seed));
    // map the (0.01, 1] band onto (1e-8, 1e-6] by scaling sizes with 1e-6
    SubordinatorPath merged = coarse;
    for (std::size_t i = 0; i < fine_band.arrivals.size(); ++i) {
      merged.arrivals.push_back(fine_band.arrivals[i]);
      merged.sizes.push_back(fine_band.sizes[i] * 1e-6);
    }
    std::vector<std::size_t> order(merged.arrivals.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return merged.arrivals[a] < merged.arrivals[b];
    });
    SubordinatorPath fine;
    fine.horizon = 1.0;
    double acc = 0.0;
    for (std::size_t idx : order) {
      fine.arrivals.push_back(merged.arrivals[idx]);
      fine.sizes.push_back(merged.sizes[idx]);
      acc += merged.sizes[idx];
      fine.cumsum.push_back(acc);
    }
    for (double theta : {0.1, 0.3, 0.5, 0.9}) {
      CHECK(xi_at(fine, theta) >= xi_at(coarse, theta));
    }
  }
}

TEST_CASE("lil statistic: nonnegative, precondition, censoring visible") {
  const GammaSpec g{1.0, 1.0, 1e-8};
  const SubordinatorPath p = sample_subordinator(g, 1.0, 99);
  auto phi = [&g](double lam) { return gamma_phi_closed(g, lam); };
  CHECK(lil_statistic(phi, std::ldexp(1.0, -20), p) >= 0.0);
  CHECK_THROWS_AS(lil_statistic(phi, 0.9, p), DomainError);  // Phi(1/t) <= e
}

TEST_CASE("scaling invariance: dyadic value scaling composes exactly") {
  // multiplying jump sizes by k = 2^j while replacing Phi(lambda) with
  // Phi(k lambda) maps the statistic at t to the statistic at k t, exactly
  // in floating point for dyadic k
  int checked = 0;
  for (uint64_t seed = 0; seed < 1000; ++seed) {
    const GammaSpec g{1.0, 1.0, 1e-8};
    const SubordinatorPath p = sample_subordinator(g, 1.0, rng::derive_seed(76, seed));
    if (p.arrivals.empty()) continue;
    const int j = static_cast<int>(seed % 17) - 8;
    const double k = std::ldexp(1.0, j);
    SubordinatorPath scaled;
    scaled.horizon = p.horizon;
    scaled.arrivals = p.arrivals;
    for (double s : p.sizes) scaled.sizes.push_back(k * s);
    double acc = 0.0;
    for (double s : scaled.sizes) {
      acc += s;
      scaled.cumsum.push_back(acc);
    }
    const GammaSpec gs{1.0, 1.0 / k, 1e-8};  // Phi'(lambda) = Phi(k lambda)
    auto phi = [&g](double lam) { return gamma_phi_closed(g, lam); };
    auto phi_scaled = [&gs](double lam) { return gamma_phi_closed(gs, lam); };
    const double t = std::ldexp(1.0, -12 - static_cast<int>(seed % 20));
    const double lhs = lil_statistic(phi_scaled, k * t, scaled);
    const double rhs = lil_statistic(phi, t, p);
    CHECK(lhs == rhs);
    ++checked;
  }
  CHECK(checked >= 990);
}

TEST_CASE("empirical limsup: prefix maxima dominate and stay finite") {
  const GammaSpec g{1.0, 1.0, 1e-8};
  auto phi = [&g](double lam) { return gamma_phi_closed(g, lam); };
  std::vector<double> full_grid, short_grid;
  for (int k = 5; k <= 30; ++k) full_grid.push_back(std::ldexp(1.0, -k));
  for (int k = 5; k <= 15; ++k) short_grid.push_back(std::ldexp(1.0, -k));
  const auto mx_full = empirical_limsup(g, phi, full_grid, 50, 2024, 2);
  const auto mx_short = empirical_limsup(g, phi, short_grid, 50, 2024, 2);
  for (int i = 0; i < 50; ++i) {
    CHECK(mx_full[i] >= mx_short[i]);
    CHECK(std::isfinite(mx_full[i]));
    CHECK(mx_full[i] > 0.0);
  }
}

TEST_CASE("theta_min sensitivity keeps the acceptance band" * doctest::timeout(600)) {
  std::vector<double> grid;
  for (int k = 5; k <= 40; ++k) grid.push_back(std::ldexp(1.0, -k));
  for (double tmin : {1e-8, 1e-10}) {
    const GammaSpec g{1.0, 1.0, tmin};
    auto phi = [&g](double lam) { return gamma_phi_closed(g, lam); };
    const auto mx = empirical_limsup(g, phi, grid, 200, 314159, 2);
    const double med = median_of(mx);
    CHECK(med >= 0.2);
    CHECK(med <= 3.0);
  }
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(sample_subordinator(LogTailSpec{-1.0, 1e-6}, 1.0, 1), DomainError);
  CHECK_THROWS_AS(sample_subordinator(LogTailSpec{1.0, 2.0}, 1.0, 1), DomainError);
  CHECK_THROWS_AS(sample_subordinator(GammaSpec{1.0, -1.0, 1e-8}, 1.0, 1), DomainError);
  CHECK_THROWS_AS(sample_subordinator(LogTailSpec{1.0, 1e-8}, 1e6, 1), DomainError);
}

}  // TEST_SUITE
