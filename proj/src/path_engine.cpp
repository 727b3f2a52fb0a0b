#include "bmlab/path_engine.hpp"

#include <algorithm>
#include <cmath>

#include "bmlab/errors.hpp"

namespace bmlab {

namespace {

void check_walk_args(Vec2 start, double R, double dt) {
  if (!(dt > 0.0)) throw DomainError("simulate_to_exit: dt must be positive");
  if (!(norm2(start) < R * R)) throw DomainError("simulate_to_exit: |start| >= R");
  if (!(dt <= R * R / 100.0)) throw DomainError("simulate_to_exit: dt > R^2/100");
}

}  // namespace

PlanarPath simulate_to_exit(Vec2 start, double R, double dt, uint64_t seed,
                            double t_max) {
  check_walk_args(start, R, dt);
  PlanarPath path;
  path.start = start;
  path.kill_radius = R;
  path.dt_nominal = dt;
  path.seed = seed;
  path.times.push_back(0.0);
  path.xs.push_back(start.x);
  path.ys.push_back(start.y);
  // interior points only; the exit pair is stored separately
  auto exit = killed_walk(start, R, dt, seed, t_max,
                          [&path](double, Vec2, double t1, Vec2 p1, bool is_exit) {
                            if (is_exit) return;
                            path.times.push_back(t1);
                            path.xs.push_back(p1.x);
                            path.ys.push_back(p1.y);
                          });
  path.exit = exit;
  return path;
}

PlanarPath refine(const PlanarPath& path, RefinementRequest req, uint64_t seed) {
  if (req.interval + 1 >= path.size())
    throw DomainError("refine: interval index out of range");
  const double t0 = path.times[req.interval];
  const double t1 = path.times[req.interval + 1];
  const double parent = t1 - t0;
  if (req.new_step == parent) return path;  // no-op refinement
  if (!(req.new_step > 0.0) || !(req.new_step < parent))
    throw DomainError("refine: new step must be positive and at most the parent step");

  const Vec2 a = path.point(req.interval);
  const Vec2 b = path.point(req.interval + 1);
  const double R2 = path.kill_radius * path.kill_radius;

  const std::size_t n_insert = static_cast<std::size_t>(std::ceil(parent / req.new_step)) - 1;
  std::vector<double> ts(n_insert);
  for (std::size_t j = 0; j < n_insert; ++j) ts[j] = t0 + static_cast<double>(j + 1) * req.new_step;

  // sequential conditional sampling; resample the interval if a point pokes
  // outside the disc (the no-exit decision for this interval already stands)
  const uint64_t base_key = kernels::mix64(seed ^ 0x5D821E4Du);
  std::vector<Vec2> pts(n_insert);
  bool ok = false;
  for (uint64_t attempt = 0; attempt < 256 && !ok; ++attempt) {
    kernels::Stream s{base_key, (attempt << 3) | rng::channel::refine};
    ok = true;
    Vec2 cur = a;
    double tcur = t0;
    for (std::size_t j = 0; j < n_insert; ++j) {
      double gx, gy;
      kernels::fill_normal_pairs(s, j, 1, &gx, &gy);
      const double h = ts[j] - tcur;
      const double rem = t1 - tcur;
      const double mean_w = h / rem;
      const double var = h * (rem - h) / rem;
      const double sd = std::sqrt(std::fmax(var, 0.0));
      Vec2 m = cur + mean_w * (b - cur);
      pts[j] = {m.x + sd * gx, m.y + sd * gy};
      if (norm2(pts[j]) >= R2) {
        ok = false;
        break;
      }
      cur = pts[j];
      tcur = ts[j];
    }
  }
  if (!ok) throw std::runtime_error("refine: bridge resampling budget exhausted");

  PlanarPath out;
  out.start = path.start;
  out.kill_radius = path.kill_radius;
  out.dt_nominal = path.dt_nominal;
  out.seed = path.seed;
  out.exit = path.exit;
  out.times.reserve(path.size() + n_insert);
  out.xs.reserve(path.size() + n_insert);
  out.ys.reserve(path.size() + n_insert);
  for (std::size_t i = 0; i <= req.interval; ++i) {
    out.times.push_back(path.times[i]);
    out.xs.push_back(path.xs[i]);
    out.ys.push_back(path.ys[i]);
  }
  for (std::size_t j = 0; j < n_insert; ++j) {
    out.times.push_back(ts[j]);
    out.xs.push_back(pts[j].x);
    out.ys.push_back(pts[j].y);
  }
  for (std::size_t i = req.interval + 1; i < path.size(); ++i) {
    out.times.push_back(path.times[i]);
    out.xs.push_back(path.xs[i]);
    out.ys.push_back(path.ys[i]);
  }
  return out;
}

FirstPassage first_passage_annulus(double r_inner, double r_outer, Vec2 start, double dt,
                                   uint64_t seed) {
  if (!(r_inner >= 0.0) || !(r_inner < r_outer))
    throw DomainError("first_passage_annulus: need 0 <= r_inner < r_outer");
  const double rho0 = norm(start);
  if ((r_inner > 0.0 && !(rho0 > r_inner)) || !(rho0 < r_outer))
    throw DomainError("first_passage_annulus: start not inside the annulus");
  if (!(dt > 0.0) || !(dt <= r_outer * r_outer / 100.0))
    throw DomainError("first_passage_annulus: bad dt");

  const double R2 = r_outer * r_outer;
  const double r2 = r_inner * r_inner;
  const double sdt = std::sqrt(dt);
  const double gate_out = 80.0 * R2 * dt;
  const double gate_in = 80.0 * dt * (r_outer + r_inner) * (r_outer + r_inner);
  // segment can reach the inner circle only if an endpoint is this close
  const double reach = r_inner + 14.0 * sdt;
  const double reach2 = reach * reach;

  detail::NormalBuffer buf(seed);
  Vec2 p = start;
  double rho2_p = norm2(p);
  uint64_t step = 0;
  for (;;) {
    const double t0 = static_cast<double>(step) * dt;
    double gx, gy;
    buf.next(&gx, &gy);
    const Vec2 q{p.x + sdt * gx, p.y + sdt * gy};
    const double rho2_q = norm2(q);
    const Vec2 d = q - p;

    double s_in = std::numeric_limits<double>::infinity();
    double s_out = std::numeric_limits<double>::infinity();
    if (r_inner > 0.0 &&
        (rho2_q <= r2 || std::fmin(rho2_p, rho2_q) < reach2)) {
      const CircleRoots roots = segment_circle_roots(p, d, Vec2{}, r_inner);
      if (roots.n > 0)
        s_in = roots.s[0];
      else if (rho2_q <= r2)
        s_in = 1.0;  // fp guard: endpoint inside but no root found
    }
    if (rho2_q >= R2) {
      const CircleRoots roots = segment_circle_roots(p, d, Vec2{}, r_outer);
      s_out = roots.n > 0 ? roots.s[0] : 1.0;
    }
    if (s_in <= s_out && s_in <= 1.0) {
      const Vec2 hit = p + s_in * d;
      return {false, t0 + s_in * dt, detail::project_to_circle(hit, r_inner)};
    }
    if (s_out <= 1.0) {
      const Vec2 hit = p + s_out * d;
      return {true, t0 + s_out * dt, detail::project_to_circle(hit, r_outer)};
    }

    // bridge touch tests; inner first, then outer (a step cannot plausibly be
    // near both barriers at once for any sane annulus)
    if (r_inner > 0.0 && (rho2_p - r2) * (rho2_q - r2) < gate_in) {
      const double d1 = std::sqrt(rho2_p) - r_inner;
      const double d2 = std::sqrt(rho2_q) - r_inner;
      if (rng::u01_at(seed, rng::channel::aux, step, 0) < std::exp(-2.0 * d1 * d2 / dt)) {
        const double A = norm2(d);
        const double s_close =
            A > 0.0 ? std::clamp(dot(Vec2{} - p, d) / A, 0.0, 1.0) : 0.0;
        const double w = d1 / (d1 + d2);
        return {false, t0 + w * dt,
                detail::project_to_circle(p + s_close * d, r_inner)};
      }
    }
    if ((R2 - rho2_p) * (R2 - rho2_q) < gate_out) {
      const double d1 = r_outer - std::sqrt(rho2_p);
      const double d2 = r_outer - std::sqrt(rho2_q);
      if (rng::u01_at(seed, rng::channel::aux, step, 1) < std::exp(-2.0 * d1 * d2 / dt)) {
        const Vec2 e = rho2_q >= rho2_p ? q : p;
        const double w = d1 / (d1 + d2);
        return {true, t0 + w * dt, detail::project_to_circle(e, r_outer)};
      }
    }

    p = q;
    rho2_p = rho2_q;
    ++step;
    if (step > (1ull << 40))
      throw std::runtime_error("first_passage_annulus: step budget exhausted");
  }
}

}  // namespace bmlab
