#include <doctest.h>

#include <cmath>

#include "bmlab/errors.hpp"
#include "bmlab/gauge_measure.hpp"
#include "bmlab/parallel.hpp"
#include "bmlab/rng.hpp"

using namespace bmlab;

TEST_SUITE("gauge_measure") {

TEST_CASE("log-power gauge equals one at s = 1/e for every alpha") {
  for (double alpha : {0.5, 1.0, 2.0, 3.5}) {
    const GaugeFunction g = GaugeFunction::log_power(alpha);
    CHECK(g(std::exp(-1.0)) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("triple-log gauge nested-log fixture") {
  const GaugeFunction g = GaugeFunction::triple_log();
  const double s = std::exp(-std::exp(M_E));  // log 1/s = e^e, loglog = e, logloglog = 1
  CHECK(g(s) == doctest::Approx(0.065988035845312537).epsilon(1e-9));
}

TEST_CASE("gauges are increasing on their (documented) monotone ranges") {
  const GaugeFunction gauges[] = {GaugeFunction::log_power(1.0),
                                  GaugeFunction::log_power(2.0), GaugeFunction::linear(),
                                  GaugeFunction::triple_log()};
  for (const auto& g : gauges) {
    const double hi = g.monotone_below() * 0.999;
    double prev = 0.0;
    for (int i = 1; i <= 40; ++i) {
      const double s = hi * std::pow(1e-6, 1.0 - i / 40.0);
      const double v = g(s);
      CHECK(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("gauge domain guards") {
  const GaugeFunction g = GaugeFunction::log_power(1.0);
  CHECK_THROWS_AS(g(0.0), DomainError);
  CHECK_THROWS_AS(g(0.5), DomainError);  // above s_max = 1/e
  const GaugeFunction tl = GaugeFunction::triple_log();
  CHECK_THROWS_AS(tl(0.07), DomainError);  // above e^-e
}

TEST_CASE("tabulated gauge interpolates and validates monotonicity") {
  const GaugeFunction g =
      GaugeFunction::tabulated({{0.01, 0.1}, {0.1, 0.5}, {0.2, 0.6}});
  CHECK(g(0.1) == doctest::Approx(0.5));
  CHECK(g(0.15) == doctest::Approx(0.55));
  CHECK(g(0.005) == doctest::Approx(0.05));  // toward phi(0+) = 0
  CHECK_THROWS_AS(GaugeFunction::tabulated({{0.1, 0.5}, {0.2, 0.4}}), DomainError);
}

TEST_CASE("premeasure: Lebesgue fixture is exactly one") {
  const TimeSet unit = TimeSet::from_intervals({{0.0, 1.0}});
  const GaugeFunction lin = GaugeFunction::linear();
  for (int m = 1; m <= 10; ++m)
    CHECK(premeasure(unit, std::ldexp(1.0, -m), lin) == 1.0);
}

TEST_CASE("premeasure: single point costs one gauge value") {
  const TimeSet pt = TimeSet::from_intervals({{0.4, 0.4}});
  const GaugeFunction lin = GaugeFunction::linear();
  double prev = 1.0;
  for (int m = 2; m <= 12; ++m) {
    const double v = premeasure(pt, std::ldexp(1.0, -m), lin);
    CHECK(v == std::ldexp(1.0, -m));
    CHECK(v < prev);
    prev = v;
  }
}

TEST_CASE("premeasure: spaced points pay count times gauge") {
  // 2^m points spaced wider than delta, log-power gauge, delta = 2^{-m^2}
  const int m = 4;
  std::vector<std::pair<double, double>> iv;
  for (int i = 0; i < (1 << m); ++i) iv.push_back({0.1 * i, 0.1 * i});
  const TimeSet pts = TimeSet::from_intervals(std::move(iv));
  const double delta = std::ldexp(1.0, -m * m);
  const double v = premeasure(pts, delta, GaugeFunction::log_power(1.0));
  CHECK(v == doctest::Approx(16.0 / (16.0 * std::log(2.0))).epsilon(1e-12));
}

TEST_CASE("premeasure covers across gaps greedily") {
  const TimeSet set = TimeSet::from_intervals({{0.0, 0.1}, {0.15, 0.2}});
  // one interval of diameter 0.3 covers everything
  CHECK(premeasure(set, 0.3, GaugeFunction::linear()) == 0.3);
}

TEST_CASE("gauge ordering transfers to the premeasure") {
  // phi_2 <= phi_1 pointwise on (0, 1/e]
  const TimeSet set = TimeSet::from_intervals({{0.0, 0.3}, {0.5, 0.6}});
  const GaugeFunction g1 = GaugeFunction::log_power(1.0);
  const GaugeFunction g2 = GaugeFunction::log_power(2.0);
  for (int mm = 3; mm <= 8; ++mm) {
    const double d = std::ldexp(1.0, -mm);
    CHECK(premeasure(set, d, g2) <= premeasure(set, d, g1));
  }
}

TEST_CASE("rogers-taylor: Lebesgue fixture gives exactly one half") {
  const TimeSet unit = TimeSet::from_intervals({{0.0, 1.0}});
  const MeasureOnTimeSet mu = MeasureOnTimeSet::lebesgue_on(unit);
  std::vector<double> grid{0.25, 0.125, 0.0625, 0.03125};
  const RogersTaylorResult rt =
      rogers_taylor_lower(unit, mu, GaugeFunction::linear(), 2.0, grid);
  CHECK(rt.lower_bound == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rt.samples_in_a == rt.samples_total);
}

TEST_CASE("rogers-taylor: bound vanishes as alpha grows") {
  const TimeSet unit = TimeSet::from_intervals({{0.0, 1.0}});
  const MeasureOnTimeSet mu = MeasureOnTimeSet::lebesgue_on(unit);
  std::vector<double> grid{0.25, 0.125, 0.0625};
  const double b1 =
      rogers_taylor_lower(unit, mu, GaugeFunction::linear(), 2.0, grid).lower_bound;
  const double b2 =
      rogers_taylor_lower(unit, mu, GaugeFunction::linear(), 200.0, grid).lower_bound;
  CHECK(b2 < b1);
  CHECK(b2 == doctest::Approx(1.0 / 200.0).epsilon(1e-12));
}

TEST_CASE("rogers-taylor: an atom defeats every finite alpha") {
  const TimeSet pt = TimeSet::from_intervals({{0.5, 0.5}});
  const MeasureOnTimeSet mu = MeasureOnTimeSet::atom(0.5, 1.0);
  std::vector<double> grid{0.25, 0.125, 0.0625, 1.0 / 1024.0};
  const RogersTaylorResult rt =
      rogers_taylor_lower(pt, mu, GaugeFunction::linear(), 100.0, grid);
  CHECK(rt.samples_in_a == 0);
  CHECK(rt.lower_bound == 0.0);
}

TEST_CASE("rogers-taylor input validation") {
  const TimeSet unit = TimeSet::from_intervals({{0.0, 1.0}});
  const MeasureOnTimeSet mu = MeasureOnTimeSet::lebesgue_on(unit);
  CHECK_THROWS_AS(rogers_taylor_lower(unit, mu, GaugeFunction::linear(), 2.0, {}),
                  DomainError);
  CHECK_THROWS_AS(
      rogers_taylor_lower(unit, mu, GaugeFunction::linear(), 0.0, {0.25, 0.125}),
      DomainError);
}

TEST_CASE("measure-on-time-set queries") {
  const MeasureOnTimeSet mu =
      MeasureOnTimeSet::lebesgue_on(TimeSet::from_intervals({{0.0, 0.5}, {1.0, 1.5}}));
  CHECK(mu.mass() == doctest::Approx(1.0));
  CHECK(mu.interval_mass(0.25, 0.1) == doctest::Approx(0.1));
  CHECK(mu.interval_mass(0.4, 0.7) == doctest::Approx(0.2));  // 0.1 + 0.1
  CHECK(mu.quantile(0.25) == doctest::Approx(0.25));
  CHECK(mu.quantile(0.75) == doctest::Approx(1.25));
  const MeasureOnTimeSet atom = MeasureOnTimeSet::atom(0.3, 2.0);
  CHECK(atom.interval_mass(0.3, 0.01) == doctest::Approx(2.0));
  CHECK(atom.interval_mass(0.2, 0.05) == doctest::Approx(0.0));
  CHECK(atom.quantile(1.0) == doctest::Approx(0.3));
}

TEST_CASE("visit set: point outside the path range is empty") {
  const PlanarPath p = simulate_to_exit({0, 0}, 1.0, 1e-3, 5);
  const TimeSet vs = visit_time_set(p, {50.0, 50.0}, 0.2);
  CHECK(vs.intervals.empty());
  CHECK(vs.total_length() == 0.0);
}

TEST_CASE("visit set: nested in eta") {
  const PlanarPath p = simulate_to_exit({0, 0}, 1.0, 1e-4, 6);
  const TimeSet small = visit_time_set(p, {0.2, 0.1}, 0.15);
  const TimeSet big = visit_time_set(p, {0.2, 0.1}, 0.3);
  CHECK(small.total_length() <= big.total_length());
  // every small interval is contained in some big interval
  for (const auto& [a, b] : small.intervals) {
    bool contained = false;
    for (const auto& [c, d] : big.intervals)
      if (c <= a + 1e-12 && b <= d + 1e-12) contained = true;
    CHECK(contained);
  }
}

TEST_CASE("visit set resolution guard") {
  const PlanarPath p = simulate_to_exit({0, 0}, 1.0, 1e-3, 7);
  CHECK_THROWS_AS(visit_time_set(p, {0.2, 0.1}, 0.01), ResolutionError);
}

TEST_CASE("mean occupation of a disc matches the Green-function oracle" *
          doctest::timeout(600)) {
  // independent oracle (mpmath): integral over B(x, eta) of the unit-disc
  // Green function from the origin; x = (0.2, 0.1), eta = 0.25 -> 0.0928935
  const int n = 1000;
  const Vec2 x{0.2, 0.1};
  std::vector<double> lens(n);
  parallel_for(n, 2, [&](std::size_t rep) {
    const PlanarPath p = simulate_to_exit({0, 0}, 1.0, 1e-4, rng::derive_seed(80, rep));
    lens[rep] = visit_time_set(p, x, 0.25).total_length();
  });
  double mean = 0.0;
  for (double v : lens) mean += v;
  mean /= n;
  CHECK(mean == doctest::Approx(0.0928935063687).epsilon(0.05));
}

TEST_CASE("duality: lower bound never exceeds the premeasure upper bound") {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const PlanarPath p = simulate_to_exit({0, 0}, 1.0, 1e-4, rng::derive_seed(81, seed));
    const TimeSet vs = visit_time_set(p, {0.2, 0.1}, 0.25);
    if (vs.total_length() == 0.0) continue;
    const MeasureOnTimeSet occ = MeasureOnTimeSet::lebesgue_on(vs);
    const GaugeFunction lin = GaugeFunction::linear();
    std::vector<double> grid;
    for (int m = 3; m <= 9; ++m) grid.push_back(std::ldexp(1.0, -m));
    double min_upper = 1e300;
    for (int m = 2; m <= 9; ++m)
      min_upper = std::fmin(min_upper, premeasure(vs, std::ldexp(1.0, -m), lin));
    for (double alpha : {1.0, 2.0, 8.0}) {
      const double lower =
          rogers_taylor_lower(vs, occ, lin, alpha, grid).lower_bound;
      CHECK(lower <= min_upper * (1.0 + 1e-12));
    }
  }
}

}  // TEST_SUITE
