#include "bmlab/cube_covering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bmlab/errors.hpp"
#include "bmlab/gauge_measure.hpp"
#include "bmlab/parallel.hpp"
#include "bmlab/rng.hpp"
#include "bmlab/stats.hpp"

namespace bmlab {

namespace {

constexpr double kUnitLo = -0.5;

void check_cube_in_ball(const Cube& cube, double R) {
  const Vec2 lo = cube.lo(), hi = cube.hi();
  const double corner =
      std::sqrt(std::fmax(lo.x * lo.x, hi.x * hi.x) + std::fmax(lo.y * lo.y, hi.y * hi.y));
  if (!(corner < R)) throw DomainError("cube not contained in the ambient ball");
}

// running hitting-time automaton with the side-length delay
struct DelayedHits {
  Vec2 lo, hi;
  double delay;
  double tau_next = 0.0;
  int hits = 0;
  std::vector<double>* taus = nullptr;  // optional recording
  int cap = std::numeric_limits<int>::max();

  // feed one segment; returns false once the cap is reached
  bool feed(double t0, Vec2 p0, double t1, Vec2 p1) {
    const auto clip = clip_segment_to_box(p0, p1 - p0, lo, hi);
    if (!clip) return hits < cap;
    const double a = t0 + clip->first * (t1 - t0);
    const double b = t0 + clip->second * (t1 - t0);
    while (hits < cap && tau_next <= b) {
      const double tau = std::fmax(a, tau_next);
      if (tau > b) break;
      ++hits;
      if (taus) taus->push_back(tau);
      tau_next = tau + delay;
    }
    return hits < cap;
  }
};

}  // namespace

Cube Cube::dyadic(int m, int ix, int iy) {
  if (m < 0 || ix < 0 || iy < 0 || ix >= (1 << m) || iy >= (1 << m))
    throw DomainError("Cube::dyadic: bad index");
  const double side = std::ldexp(1.0, -m);
  Cube c;
  c.side = side;
  c.level = m;
  c.center = {kUnitLo + (ix + 0.5) * side, kUnitLo + (iy + 0.5) * side};
  return c;
}

HittingSchedule hitting_schedule(const PlanarPath& path, const Cube& cube) {
  check_cube_in_ball(cube, path.kill_radius);
  if (path.max_step() > cube.side * cube.side / 10.0 * (1.0 + 1e-9))
    throw ResolutionError("hitting_schedule: path step exceeds side^2/10");

  HittingSchedule sched;
  sched.cube = cube;
  sched.truncated_at_exit = path.exit.has_value();
  DelayedHits hits{cube.lo(), cube.hi(), cube.side};
  hits.taus = &sched.taus;

  if (path.size() > 0) {
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
      hits.feed(path.times[i], path.point(i), path.times[i + 1], path.point(i + 1));
    if (path.exit) {
      const std::size_t last = path.size() - 1;
      hits.feed(path.times[last], path.point(last), path.exit->time, path.exit->point);
    }
  }
  return sched;
}

GeometricFit estimate_theta(Vec2 z, const Cube& cube, double R, int k_max, int n,
                            double dt, uint64_t seed, int threads) {
  if (!(norm(z) < R)) throw DomainError("estimate_theta: |z| >= R");
  if (n < 1000) throw DomainError("estimate_theta: need n >= 1000 replicas");
  if (k_max < 2) throw DomainError("estimate_theta: k_max too small");
  check_cube_in_ball(cube, R);
  if (!(dt <= cube.side * cube.side / 10.0 * (1.0 + 1e-9)))
    throw DomainError("estimate_theta: dt exceeds side^2/10");

  std::vector<int> hits_per_replica(n, 0);
  parallel_for(n, threads, [&](std::size_t rep) {
    DelayedHits hits{cube.lo(), cube.hi(), cube.side};
    hits.cap = k_max;
    killed_walk(z, R, dt, rng::derive_seed(seed, rep),
                std::numeric_limits<double>::infinity(),
                [&hits](double t0, Vec2 p0, double t1, Vec2 p1, bool) {
                  return hits.feed(t0, p0, t1, p1);
                });
    hits_per_replica[rep] = hits.hits;
  });

  std::vector<long> at_least(k_max + 1, 0);
  for (int h : hits_per_replica)
    for (int k = 1; k <= std::min(h, k_max); ++k) ++at_least[k];
  if (at_least[1] == 0) throw DegenerateFitError("estimate_theta: cube never hit");

  GeometricFit fit;
  std::vector<double> xs, ys, ws;
  const double cutoff = 30.0;
  for (int k = 1; k <= k_max; ++k) {
    if (at_least[k] < cutoff) break;
    fit.ks.push_back(k);
    fit.probs.push_back(static_cast<double>(at_least[k]) / n);
    xs.push_back(k);
    ys.push_back(std::log(fit.probs.back()));
    ws.push_back(static_cast<double>(at_least[k]));
  }
  if (fit.ks.size() < 2)
    throw DegenerateFitError("estimate_theta: not enough admissible k for the fit");
  const LinearFit lf = weighted_linear_fit(xs, ys, ws);
  fit.theta_hat = std::exp(lf.slope);
  fit.stderr_ = lf.resid_stderr;
  fit.intercept = lf.intercept;
  return fit;
}

double annulus_escape_prob(double r_inner, double r_outer, double start_radius) {
  if (!(0.0 < r_inner) || !(r_inner <= start_radius) || !(start_radius <= r_outer) ||
      !(r_inner < r_outer))
    throw DomainError("annulus_escape_prob: need 0 < r_inner <= start <= r_outer");
  return (std::log(start_radius) - std::log(r_inner)) /
         (std::log(r_outer) - std::log(r_inner));
}

double annulus_escape_mc(double r_inner, double r_outer, double start_radius, double dt,
                         int n, uint64_t seed, int threads) {
  if (!(0.0 < r_inner) || !(r_inner < start_radius) || !(start_radius < r_outer))
    throw DomainError("annulus_escape_mc: bad radii");
  std::vector<uint8_t> outer(n, 0);
  parallel_for(n, threads, [&](std::size_t rep) {
    const FirstPassage fp = first_passage_annulus(
        r_inner, r_outer, Vec2{start_radius, 0.0}, dt, rng::derive_seed(seed, rep));
    outer[rep] = fp.hit_outer ? 1 : 0;
  });
  long hits = 0;
  for (uint8_t o : outer) hits += o;
  return static_cast<double>(hits) / n;
}

// ---------------------------------------------------------------------------
// covering
// ---------------------------------------------------------------------------

CoveringAccumulator::CoveringAccumulator(int m_min, int m_max)
    : m_min_(m_min), m_max_(m_max) {
  if (m_min < 0 || m_max < m_min || m_max > 14)
    throw DomainError("CoveringAccumulator: bad level range");
  fine_n_ = 1 << m_max_;
  for (int m = m_min_; m <= m_max_; ++m) {
    const std::size_t cells = static_cast<std::size_t>(1) << (2 * m);
    counts_.emplace_back(cells, 0);
    cover_end_.emplace_back(cells, -std::numeric_limits<double>::infinity());
  }
}

void CoveringAccumulator::update_cell(int level_idx, int m, long ix, long iy, double ta,
                                      double tb) {
  const std::size_t cell = (static_cast<std::size_t>(ix) << m) | static_cast<std::size_t>(iy);
  double& ce = cover_end_[level_idx][cell];
  int& c = counts_[level_idx][cell];
  const double r = std::ldexp(1.0, -m);
  if (ta > ce) {
    ++c;
    ce = ta + r;
  }
  while (tb > ce) {
    ++c;
    ce += r;
  }
}

void CoveringAccumulator::feed(double t0, Vec2 p0, double t1, Vec2 p1) {
  const Vec2 d = p1 - p0;
  const auto clip =
      clip_segment_to_box(p0, d, Vec2{kUnitLo, kUnitLo}, Vec2{-kUnitLo, -kUnitLo});
  if (!clip) return;
  const double sa = clip->first, sb = clip->second;
  const double dt_seg = t1 - t0;
  const double ta = t0 + sa * dt_seg;
  const double tb = t0 + sb * dt_seg;
  time_in_u_ += tb - ta;

  // walk the fine grid cells crossed by the clipped sub-segment
  const double h = std::ldexp(1.0, -m_max_);
  Vec2 a{p0.x + sa * d.x, p0.y + sa * d.y};
  Vec2 b{p0.x + sb * d.x, p0.y + sb * d.y};
  auto cell_of = [&](double v) {
    long c = static_cast<long>(std::floor((v - kUnitLo) / h));
    return std::clamp(c, 0l, static_cast<long>(fine_n_ - 1));
  };
  long ix = cell_of(a.x), iy = cell_of(a.y);
  const long ix_end = cell_of(b.x), iy_end = cell_of(b.y);
  double tcur = ta;
  // at most a couple of crossings per step at sane resolutions
  for (int guard = 0; guard < 64; ++guard) {
    const bool last = (ix == ix_end && iy == iy_end);
    double tnext = tb;
    long nix = ix, niy = iy;
    if (!last) {
      // earliest boundary crossing in time
      double best = tb;
      if (b.x != a.x) {
        const long step = b.x > a.x ? 1 : -1;
        const double edge = kUnitLo + (ix + (step > 0 ? 1 : 0)) * h;
        const double s = (edge - a.x) / (b.x - a.x);
        const double t = ta + s * (tb - ta);
        if (t < best) {
          best = t;
          nix = ix + step;
          niy = iy;
        }
      }
      if (b.y != a.y) {
        const long step = b.y > a.y ? 1 : -1;
        const double edge = kUnitLo + (iy + (step > 0 ? 1 : 0)) * h;
        const double s = (edge - a.y) / (b.y - a.y);
        const double t = ta + s * (tb - ta);
        if (t < best) {
          best = t;
          nix = ix;
          niy = iy + step;
        } else if (t == best && nix != ix) {
          niy = iy + step;  // exact corner crossing
        }
      }
      tnext = std::fmin(std::fmax(best, tcur), tb);
    }
    for (int m = m_min_; m <= m_max_; ++m) {
      update_cell(m - m_min_, m, ix >> (m_max_ - m), iy >> (m_max_ - m), tcur, tnext);
    }
    if (last || tnext >= tb) break;
    tcur = tnext;
    ix = nix;
    iy = niy;
  }
}

std::vector<CoveringResult> CoveringAccumulator::finish() {
  std::vector<CoveringResult> out;
  for (int m = m_min_; m <= m_max_; ++m) {
    CoveringResult res;
    res.level = m;
    res.time_in_unit_cube = time_in_u_;
    const auto& cnt = counts_[m - m_min_];
    const long n = 1l << m;
    for (long ix = 0; ix < n; ++ix) {
      for (long iy = 0; iy < n; ++iy) {
        const int c = cnt[(static_cast<std::size_t>(ix) << m) | static_cast<std::size_t>(iy)];
        if (c > 0) {
          res.cells.push_back({static_cast<int>(ix), static_cast<int>(iy), c});
          res.max_count = std::max(res.max_count, c);
        }
      }
    }
    out.push_back(std::move(res));
  }
  return out;
}

CoveringResult covering_count(const PlanarPath& path, int m) {
  if (path.max_step() > std::ldexp(1.0, -2 * m) / 10.0 * (1.0 + 1e-9))
    throw ResolutionError("covering_count: path step exceeds 4^-m/10");
  CoveringAccumulator acc(m, m);
  for (std::size_t i = 0; i + 1 < path.size(); ++i)
    acc.feed(path.times[i], path.point(i), path.times[i + 1], path.point(i + 1));
  if (path.exit && path.size() > 0) {
    const std::size_t last = path.size() - 1;
    acc.feed(path.times[last], path.point(last), path.exit->time, path.exit->point);
  }
  return std::move(acc.finish().front());
}

std::vector<double> premeasure_decay(const std::vector<CoveringResult>& counts,
                                     const GaugeFunction& gauge) {
  std::vector<double> out;
  out.reserve(counts.size());
  for (const auto& res : counts)
    out.push_back(res.max_count * gauge(std::ldexp(1.0, -res.level)));
  return out;
}

}  // namespace bmlab
