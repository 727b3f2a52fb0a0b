#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <type_traits>
#include <stdexcept>
#include <vector>

#include "bmlab/errors.hpp"
#include "bmlab/geometry.hpp"
#include "bmlab/rng.hpp"

namespace bmlab {

struct ExitInfo {
  double time = 0.0;
  Vec2 point;
};

// Time-stamped polyline of a planar Brownian path killed at the first exit
// from the disc B(0, kill_radius). Immutable after construction; safe to share
// across threads. Recorded points are strictly inside the disc; the exit pair
// is stored separately and |exit.point| == kill_radius up to 1e-9*R.
struct PlanarPath {
  Vec2 start;
  double kill_radius = 1.0;
  double dt_nominal = 0.0;
  uint64_t seed = 0;
  std::vector<double> times;
  std::vector<double> xs, ys;
  std::optional<ExitInfo> exit;

  std::size_t size() const { return times.size(); }
  Vec2 point(std::size_t i) const { return {xs[i], ys[i]}; }
  // Coarsest step among recorded intervals (refinement can make steps uneven).
  double max_step() const {
    double m = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i) m = std::fmax(m, times[i] - times[i - 1]);
    return m > 0.0 ? m : dt_nominal;
  }
};

struct RefinementRequest {
  std::size_t interval = 0;  // index i refines (times[i], times[i+1])
  double new_step = 0.0;     // must be < parent step
};

struct FirstPassage {
  bool hit_outer = false;
  double time = 0.0;
  Vec2 point;
};

namespace detail {

class NormalBuffer {
 public:
  explicit NormalBuffer(uint64_t seed_token)
      : stream_{seed_token, rng::channel::normals} {}

  void next(double* gx, double* gy) {
    if (pos_ == kChunk) refill();
    *gx = zx_[pos_];
    *gy = zy_[pos_];
    ++pos_;
  }

 private:
  static constexpr std::size_t kChunk = 2048;
  void refill() {
    kernels::fill_normal_pairs(stream_, next_block_, kChunk, zx_, zy_);
    next_block_ += kChunk;
    pos_ = 0;
  }
  alignas(64) double zx_[kChunk];
  alignas(64) double zy_[kChunk];
  std::size_t pos_ = kChunk;
  uint64_t next_block_ = 0;
  kernels::Stream stream_;
};

inline Vec2 project_to_circle(Vec2 p, double r) {
  const double n = norm(p);
  return n > 0.0 ? (r / n) * p : Vec2{r, 0.0};
}

// Visitors may return void, or bool where false stops the walk early.
template <class Visitor>
bool invoke_visitor(Visitor&& v, double t0, Vec2 p0, double t1, Vec2 p1, bool is_exit) {
  if constexpr (std::is_void_v<decltype(v(t0, p0, t1, p1, is_exit))>) {
    v(t0, p0, t1, p1, is_exit);
    return true;
  } else {
    return v(t0, p0, t1, p1, is_exit);
  }
}

}  // namespace detail

// Streaming killed walk. visit(t0, p0, t1, p1, is_exit) is invoked for every
// interior segment and, when the walk exits, once more for the partial segment
// ending at the exit point (is_exit true). Between-sample boundary touches are
// flagged with the half-plane bridge probability exp(-2 d1 d2 / dt); flagged
// exits use the radial projection of the segment point closest to the boundary
// and a proximity-weighted touch time.
template <class Visitor>
std::optional<ExitInfo> killed_walk(Vec2 start, double R, double dt, uint64_t seed,
                                    double t_max, Visitor&& visit) {
  const double R2 = R * R;
  const double sdt = std::sqrt(dt);
  const double gate = 80.0 * R2 * dt;  // below this, evaluate the bridge test
  detail::NormalBuffer buf(seed);
  Vec2 p = start;
  double rho2_p = norm2(p);
  uint64_t step = 0;
  while (static_cast<double>(step + 1) * dt <= t_max) {
    const double t0 = static_cast<double>(step) * dt;
    const double t1 = static_cast<double>(step + 1) * dt;
    double gx, gy;
    buf.next(&gx, &gy);
    const Vec2 q{p.x + sdt * gx, p.y + sdt * gy};
    const double rho2_q = norm2(q);
    if (rho2_q >= R2) {
      const CircleRoots roots = segment_circle_roots(p, q - p, Vec2{}, R);
      const double s = roots.n > 0 ? roots.s[0] : 1.0;
      const ExitInfo exit{t0 + s * dt, detail::project_to_circle(p + s * (q - p), R)};
      detail::invoke_visitor(visit, t0, p, exit.time, exit.point, true);
      return exit;
    }
    const double a = R2 - rho2_p;
    const double b = R2 - rho2_q;
    if (a * b < gate) {
      const double d1 = R - std::sqrt(rho2_p);
      const double d2 = R - std::sqrt(rho2_q);
      const double p_touch = std::exp(-2.0 * d1 * d2 / dt);
      // slot 1 = outer barrier, matching first_passage_annulus, so a recorded
      // walk and the streaming first-passage run of the same seed coincide
      if (rng::u01_at(seed, rng::channel::aux, step, 1) < p_touch) {
        const Vec2 e = rho2_q >= rho2_p ? q : p;
        const double w = d1 / (d1 + d2);
        const ExitInfo exit{t0 + w * dt, detail::project_to_circle(e, R)};
        detail::invoke_visitor(visit, t0, p, exit.time, exit.point, true);
        return exit;
      }
    }
    if (!detail::invoke_visitor(visit, t0, p, t1, q, false)) return std::nullopt;
    p = q;
    rho2_p = rho2_q;
    ++step;
    if (step > (1ull << 40)) throw std::runtime_error("killed_walk: step budget exhausted");
  }
  return std::nullopt;
}

// Brownian path started at `start`, killed at first exit from B(0, R).
// Reproducible: identical (seed, start, R, dt) give bit-identical paths.
PlanarPath simulate_to_exit(Vec2 start, double R, double dt, uint64_t seed,
                            double t_max = std::numeric_limits<double>::infinity());

// Inserts Brownian-bridge samples at step req.new_step inside one interval.
// Endpoints are unchanged; inserted points are conditioned to stay inside the
// kill disc (resampled otherwise, consistent with the no-exit decision already
// made for that interval).
PlanarPath refine(const PlanarPath& path, RefinementRequest req, uint64_t seed);

// First passage of the annulus {r_inner < |z| < r_outer}; both barriers get
// the bridge-touch treatment. r_inner == 0 degenerates to plain disc exit.
FirstPassage first_passage_annulus(double r_inner, double r_outer, Vec2 start, double dt,
                                   uint64_t seed);

}  // namespace bmlab
