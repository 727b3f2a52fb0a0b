#include "bmlab/crossing_stats.hpp"

#include <algorithm>
#include <cmath>

#include "bmlab/errors.hpp"
#include "bmlab/stats.hpp"

namespace bmlab {

namespace detail {

void process_window_segment(Vec2 p, Vec2 d, double d0sq, double d1sq, Vec2 x,
                            double r_in, double eps, WindowState& st) {
  const double eps2 = eps * eps;
  const double r_in2 = r_in * r_in;
  // nothing can happen while the whole segment stays beyond eps
  if (st.region == 2 && d0sq > eps2 && d1sq > eps2 &&
      segment_point_dist2(p, d, x) > eps2)
    return;

  const CircleRoots inner = segment_circle_roots(p, d, x, r_in);
  const CircleRoots outer = segment_circle_roots(p, d, x, eps);
  int ii = 0, oo = 0;
  while (ii < inner.n || oo < outer.n) {
    const double si = ii < inner.n ? inner.s[ii] : 2.0;
    const double so = oo < outer.n ? outer.s[oo] : 2.0;
    if (si <= so) {
      ++ii;
      if (si <= 0.0) continue;  // handled at the previous segment's endpoint
      apply_region_change(st, st.region == 0 ? uint8_t{1} : uint8_t{0});
    } else {
      ++oo;
      if (so <= 0.0) continue;
      apply_region_change(st, st.region == 2 ? uint8_t{1} : uint8_t{2});
    }
  }
  // hard-sync against the endpoint in case a grazing crossing was dropped
  const uint8_t expect = region_of(d1sq, r_in2, eps2);
  while (st.region != expect) {
    uint8_t next;
    if (st.region == 1)
      next = expect;
    else
      next = 1;
    apply_region_change(st, next);
  }
}

namespace {

struct SegmentRange {
  const PlanarPath& path;

  // visits every segment including the partial exit segment
  template <class F>
  void for_each(F&& f) const {
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      f(path.times[i], path.point(i), path.times[i + 1], path.point(i + 1));
    }
    if (path.exit && path.size() > 0) {
      const std::size_t last = path.size() - 1;
      f(path.times[last], path.point(last), path.exit->time, path.exit->point);
    }
  }
};

void validate_query(const CrossingQuery& q) {
  const double r_in = q.eps * q.inner_ratio;
  if (!(q.inner_ratio > 0.0) || !(q.inner_ratio < 1.0))
    throw DomainError("CrossingQuery: inner_ratio must lie in (0,1)");
  if (!(r_in > 0.0) || !(q.eps > r_in) ||
      !(q.eps < q.kill_radius - norm(q.x)))
    throw DomainError("CrossingQuery: need 0 < eps*inner_ratio < eps < R - |x|");
}

}  // namespace

}  // namespace detail

CrossingRecord count_crossings(const PlanarPath& path, const CrossingQuery& query) {
  detail::validate_query(query);
  const double r_in = query.eps * query.inner_ratio;
  const double eps2 = query.eps * query.eps;
  const double step_limit = r_in * r_in / 10.0;

  CrossingRecord rec;
  rec.query = query;
  if (path.size() == 0) return rec;

  detail::WindowState st;
  const double d0 = norm2(path.point(0) - query.x);
  st.region = detail::region_of(d0, r_in * r_in, eps2);
  if (st.region == 0) st.armed = true;

  bool resolved = true;
  double prev_d = d0;
  detail::SegmentRange{path}.for_each([&](double t0, Vec2 p0, double t1, Vec2 p1) {
    const double d1 = norm2(p1 - query.x);
    const Vec2 d = p1 - p0;
    if (std::fmin(prev_d, d1) <= eps2 || segment_point_dist2(p0, d, query.x) <= eps2) {
      if (t1 - t0 > step_limit * (1.0 + 1e-9)) resolved = false;
      detail::process_window_segment(p0, d, prev_d, d1, query.x, r_in, query.eps, st);
    }
    prev_d = d1;
  });
  rec.count = st.count;
  rec.resolved = resolved;
  return rec;
}

LocalTimeEstimate estimate_local_time(const PlanarPath& path, Vec2 x,
                                      std::vector<double> eps_grid,
                                      std::size_t refine_budget) {
  if (eps_grid.size() < 2) throw DomainError("estimate_local_time: need >= 2 radii");
  for (std::size_t i = 0; i + 1 < eps_grid.size(); ++i)
    if (!(eps_grid[i] > eps_grid[i + 1]))
      throw DomainError("estimate_local_time: eps_grid must be strictly decreasing");
  const double eps_max = eps_grid.front();
  const double eps_min = eps_grid.back();
  const double r_in_min = eps_min * kDefaultInnerRatio;
  const double h_need = r_in_min * r_in_min / 10.0;

  // refine intervals that approach x closer than eps_max and are too coarse
  PlanarPath refined = path;
  bool budget_hit = false;
  const double reach2 = (eps_max * 1.5) * (eps_max * 1.5);
  std::size_t inserted = 0;
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i + 1 < refined.size(); ++i) {
    const double h = refined.times[i + 1] - refined.times[i];
    if (h <= h_need * (1.0 + 1e-9)) continue;
    const Vec2 p = refined.point(i);
    const Vec2 d = refined.point(i + 1) - p;
    if (segment_point_dist2(p, d, x) > reach2) continue;
    const std::size_t add = static_cast<std::size_t>(std::ceil(h / h_need)) - 1;
    if (inserted + add > refine_budget) {
      budget_hit = true;
      break;
    }
    inserted += add;
    todo.push_back(i);
  }
  for (auto it = todo.rbegin(); it != todo.rend(); ++it) {
    refined = refine(refined, RefinementRequest{*it, h_need},
                     kernels::derive_seed(path.seed, 0x7E5Cull + *it));
  }

  LocalTimeEstimate est;
  est.x = x;
  for (double eps : eps_grid) {
    CrossingQuery q{x, eps, kDefaultInnerRatio, path.kill_radius};
    const CrossingRecord rec = count_crossings(refined, q);
    if (budget_hit && !rec.resolved) continue;  // partial result only
    est.eps_grid.push_back(eps);
    est.counts.push_back(rec.count);
  }
  if (est.eps_grid.size() >= 2) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < est.eps_grid.size(); ++i) {
      lx.push_back(std::log(1.0 / est.eps_grid[i]));
      ly.push_back(static_cast<double>(est.counts[i]));
    }
    const LinearFit f = weighted_linear_fit(lx, ly);
    est.a_hat = f.slope;
    est.a_stderr = f.slope_stderr;
  }
  if (budget_hit)
    throw BudgetExceededError("estimate_local_time: refinement budget exhausted", est);
  return est;
}

std::vector<std::pair<Vec2, int>> scan_thick_points(const PlanarPath& path,
                                                    double grid_step, double eps,
                                                    int top_k) {
  if (!(grid_step > 0.0) || !(eps > 0.0) || top_k < 0)
    throw DomainError("scan_thick_points: bad arguments");
  const double r_in = eps * kDefaultInnerRatio;

  // bounding box of the path (plus exit point), expanded by eps
  double min_x = path.start.x, max_x = path.start.x;
  double min_y = path.start.y, max_y = path.start.y;
  for (std::size_t i = 0; i < path.size(); ++i) {
    min_x = std::fmin(min_x, path.xs[i]);
    max_x = std::fmax(max_x, path.xs[i]);
    min_y = std::fmin(min_y, path.ys[i]);
    max_y = std::fmax(max_y, path.ys[i]);
  }
  if (path.exit) {
    min_x = std::fmin(min_x, path.exit->point.x);
    max_x = std::fmax(max_x, path.exit->point.x);
    min_y = std::fmin(min_y, path.exit->point.y);
    max_y = std::fmax(max_y, path.exit->point.y);
  }

  // nodes whose lattice cell meets the expanded bounding box, clipped to the
  // unit disc; outward rounding keeps degenerate boxes covered
  const long i_lo = std::max(static_cast<long>(std::floor((min_x - eps) / grid_step)),
                             static_cast<long>(std::ceil(-1.0 / grid_step)));
  const long i_hi = std::min(static_cast<long>(std::ceil((max_x + eps) / grid_step)),
                             static_cast<long>(std::floor(1.0 / grid_step)));
  const long j_lo = std::max(static_cast<long>(std::floor((min_y - eps) / grid_step)),
                             static_cast<long>(std::ceil(-1.0 / grid_step)));
  const long j_hi = std::min(static_cast<long>(std::ceil((max_y + eps) / grid_step)),
                             static_cast<long>(std::floor(1.0 / grid_step)));
  if (i_hi < i_lo || j_hi < j_lo) return {};
  const long nx = i_hi - i_lo + 1;
  const long ny = j_hi - j_lo + 1;

  std::vector<Vec2> nodes(static_cast<std::size_t>(nx * ny));
  std::vector<uint8_t> valid(nodes.size(), 0);
  std::vector<detail::WindowState> st(nodes.size());
  const double eps2 = eps * eps;
  const double r_in2 = r_in * r_in;
  const Vec2 p0 = path.size() ? path.point(0) : path.start;
  for (long i = i_lo; i <= i_hi; ++i) {
    for (long j = j_lo; j <= j_hi; ++j) {
      const std::size_t idx = static_cast<std::size_t>((i - i_lo) * ny + (j - j_lo));
      const Vec2 node{static_cast<double>(i) * grid_step,
                      static_cast<double>(j) * grid_step};
      nodes[idx] = node;
      if (norm2(node) > 1.0 || !(eps < path.kill_radius - norm(node))) continue;
      valid[idx] = 1;
      const double d0 = norm2(p0 - node);
      st[idx].region = detail::region_of(d0, r_in2, eps2);
      if (st[idx].region == 0) st[idx].armed = true;
    }
  }

  const double pad = eps * 1.0000001;
  detail::SegmentRange{path}.for_each([&](double, Vec2 a, double, Vec2 b) {
    const Vec2 d = b - a;
    const long wi_lo = std::max(i_lo, static_cast<long>(std::ceil((std::fmin(a.x, b.x) - pad) / grid_step)));
    const long wi_hi = std::min(i_hi, static_cast<long>(std::floor((std::fmax(a.x, b.x) + pad) / grid_step)));
    const long wj_lo = std::max(j_lo, static_cast<long>(std::ceil((std::fmin(a.y, b.y) - pad) / grid_step)));
    const long wj_hi = std::min(j_hi, static_cast<long>(std::floor((std::fmax(a.y, b.y) + pad) / grid_step)));
    for (long i = wi_lo; i <= wi_hi; ++i) {
      for (long j = wj_lo; j <= wj_hi; ++j) {
        const std::size_t idx = static_cast<std::size_t>((i - i_lo) * ny + (j - j_lo));
        if (!valid[idx]) continue;
        const Vec2 node = nodes[idx];
        const double d0sq = norm2(a - node);
        const double d1sq = norm2(b - node);
        if (std::fmin(d0sq, d1sq) > eps2 && segment_point_dist2(a, d, node) > eps2)
          continue;
        detail::process_window_segment(a, d, d0sq, d1sq, node, r_in, eps, st[idx]);
      }
    }
  });

  std::vector<std::pair<Vec2, int>> out;
  out.reserve(nodes.size());
  for (std::size_t idx = 0; idx < nodes.size(); ++idx)
    if (valid[idx]) out.emplace_back(nodes[idx], st[idx].count);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return lex_less(a.first, b.first);
  });
  if (static_cast<std::size_t>(top_k) < out.size()) out.resize(top_k);
  return out;
}

}  // namespace bmlab
