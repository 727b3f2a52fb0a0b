#pragma once

#include <cstdint>
#include <vector>

#include "bmlab/geometry.hpp"
#include "bmlab/path_engine.hpp"

// Recursive delayed hitting times of cubes, geometric-decay estimation of
// P(k hits before exit), the exact log-harmonic annulus escape probability,
// and greedy interval coverings of cube visit-time sets at dyadic levels.

namespace bmlab {

class GaugeFunction;

struct Cube {
  Vec2 center;
  double side = 0.0;
  int level = -1;  // >= 0 for dyadic cubes of C_m tiling U = [-0.5, 0.5]^2

  Vec2 lo() const { return {center.x - 0.5 * side, center.y - 0.5 * side}; }
  Vec2 hi() const { return {center.x + 0.5 * side, center.y + 0.5 * side}; }

  static Cube dyadic(int m, int ix, int iy);
};

struct HittingSchedule {
  Cube cube;
  std::vector<double> taus;      // consecutive entries differ by >= side
  bool truncated_at_exit = false;
};

struct GeometricFit {
  std::vector<int> ks;          // admissible k range used in the fit
  std::vector<double> probs;    // P(at least k hits before exit) for those k
  double theta_hat = 0.0;
  double stderr_ = 0.0;         // weighted residual RMS of the log-linear fit
  double intercept = 0.0;       // fitted log-intercept
};

// Delayed hitting times tau_1 = inf{t >= 0 : B_t in Q},
// tau_{k+1} = inf{t >= tau_k + side : B_t in Q}, computed on interpolated
// segments clipped to the cube. Requires path.max_step() <= side^2/10.
HittingSchedule hitting_schedule(const PlanarPath& path, const Cube& cube);

// Monte-Carlo estimate of the geometric decay rate of P(tau_k < tau) for
// Brownian motion from z killed at exit from B(0,R). probs are fit over the
// k-range with at least 30 successes; theta_hat = exp(weighted LS slope).
GeometricFit estimate_theta(Vec2 z, const Cube& cube, double R, int k_max, int n,
                            double dt, uint64_t seed, int threads = 1);

// Exact probability that planar BM from radius start_radius hits the circle
// of radius r_outer before the circle of radius r_inner.
double annulus_escape_prob(double r_inner, double r_outer, double start_radius);

// Monte-Carlo counterpart over n replicas (bridge-corrected barriers).
double annulus_escape_mc(double r_inner, double r_outer, double start_radius, double dt,
                         int n, uint64_t seed, int threads = 1);

struct CubeCount {
  int ix = 0, iy = 0;
  int count = 0;
};

struct CoveringResult {
  int level = 0;
  std::vector<CubeCount> cells;  // visited cubes, (ix, iy) ascending
  int max_count = 0;
  double time_in_unit_cube = 0.0;
};

// Greedy left-to-right cover of {t < tau : B_t in Q} with intervals of length
// 2^-m, per dyadic cube Q of level m. Requires path.max_step() <= 4^-m/10.
CoveringResult covering_count(const PlanarPath& path, int m);

// max_Q count(Q) * gauge(2^-m) for each covering result, in input order.
std::vector<double> premeasure_decay(const std::vector<CoveringResult>& counts,
                                     const GaugeFunction& gauge);

// Streaming multi-level covering accumulator (no path storage); used by the
// covering experiment at fine resolutions and by covering_count.
class CoveringAccumulator {
 public:
  CoveringAccumulator(int m_min, int m_max);
  void feed(double t0, Vec2 p0, double t1, Vec2 p1);
  std::vector<CoveringResult> finish();

 private:
  int m_min_, m_max_;
  int fine_n_;                      // 2^m_max cells per side
  std::vector<std::vector<int>> counts_;        // per level, dense 4^m
  std::vector<std::vector<double>> cover_end_;  // per level, dense 4^m
  double time_in_u_ = 0.0;
  void update_cell(int level_idx, int m, long ix, long iy, double ta, double tb);
};

}  // namespace bmlab
