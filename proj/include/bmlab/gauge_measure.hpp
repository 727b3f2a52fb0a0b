#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bmlab/geometry.hpp"
#include "bmlab/path_engine.hpp"

// Gauge functions, time sets (finite unions of closed intervals), greedy
// premeasure upper estimates and the Rogers-Taylor mass-distribution lower
// bound. All Hausdorff-type outputs are labelled bounds: the greedy cover is
// an upper estimate of the delta-premeasure, the Rogers-Taylor value a lower
// one (the grid limsup under-approximates, biasing the bound up; flagged in
// the result).

namespace bmlab {

class GaugeFunction {
 public:
  enum class Kind { log_power, triple_log, linear, tabulated };

  static GaugeFunction log_power(double alpha);  // (log 1/s)^-alpha on (0, 1/e]
  static GaugeFunction triple_log();             // logloglog(1/s)/log(1/s) on (0, e^-e)
  static GaugeFunction linear();                 // s on (0, 1)
  static GaugeFunction tabulated(std::vector<std::pair<double, double>> table);

  // exact evaluation with guarded nested logs; DomainError outside (0, s_max)
  double operator()(double s) const;
  double s_max() const { return s_max_; }
  Kind kind() const { return kind_; }
  std::string name() const;

  // largest s below which the gauge is increasing (triple_log turns over at
  // s* = exp(-exp(x0)), x0 log x0 = 1; the others are increasing everywhere)
  double monotone_below() const;

 private:
  GaugeFunction(Kind k, double alpha, double smax)
      : kind_(k), alpha_(alpha), s_max_(smax) {}
  Kind kind_;
  double alpha_ = 0.0;
  double s_max_ = 0.0;
  std::vector<std::pair<double, double>> table_;
};

inline double gauge_eval(const GaugeFunction& g, double s) { return g(s); }

// Disjoint sorted closed intervals of [0, inf). Zero-length intervals (points)
// are allowed.
struct TimeSet {
  std::vector<std::pair<double, double>> intervals;
  std::string provenance;

  double total_length() const;
  static TimeSet from_intervals(std::vector<std::pair<double, double>> iv,
                                std::string provenance = {});
};

// Nondecreasing right-continuous distribution function restricted to a
// TimeSet; piecewise linear between nodes with jumps allowed at nodes.
class MeasureOnTimeSet {
 public:
  struct Node {
    double t;
    double f_left;   // F(t-)
    double f_right;  // F(t+)
  };

  static MeasureOnTimeSet lebesgue_on(const TimeSet& set);
  static MeasureOnTimeSet atom(double t, double mass);
  // F(t) = S(t), the right-continuous inverse of a sampled subordinator
  static MeasureOnTimeSet from_nodes(std::vector<Node> nodes);

  double mass() const;
  double cdf_left(double t) const;   // F(t-)
  double cdf_right(double t) const;  // F(t+)
  // mass of the closed interval [t, t+eps]
  double interval_mass(double t, double eps) const;
  // smallest t with F(t+) >= q
  double quantile(double q) const;

 private:
  std::vector<Node> nodes_;
};

// Greedy covering of E by intervals of diameter exactly delta, left to right
// (covers may span gaps); returns count * g(delta). Upper bound on the true
// delta-premeasure infimum.
double premeasure(const TimeSet& set, double delta, const GaugeFunction& g);

struct RogersTaylorResult {
  double lower_bound = 0.0;
  double a_mass = 0.0;        // estimated mu-mass of the small-ratio set A
  int samples_in_a = 0;
  int samples_total = 0;
  bool grid_limsup_biaso = true;  // grid max under-approximates the limsup
};

// Estimates A = {t : max over the eps grid of mu[t,t+eps]/g(eps) < alpha} by
// sampling n points from mu (deterministic quantile stratification) and
// returns mu(A)/alpha.
RogersTaylorResult rogers_taylor_lower(const TimeSet& set, const MeasureOnTimeSet& mu,
                                       const GaugeFunction& g, double alpha,
                                       const std::vector<double>& eps_grid,
                                       int n_samples = 2048);

// {t : |B_t - x| <= eta} as an interval union from interpolated segment-disc
// intersections. Requires eta >= sqrt(path.max_step()).
TimeSet visit_time_set(const PlanarPath& path, Vec2 x, double eta);

}  // namespace bmlab
