#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bmlab/geometry.hpp"
#include "bmlab/path_engine.hpp"

// Annulus crossing counts N(x, eps): number of disjoint path stretches that
// enter the closed disc B(x, eps*inner_ratio) and afterwards reach distance
// eps from x before the path dies. Circle crossings are detected on
// interpolated polyline segments.

namespace bmlab {

inline constexpr double kDefaultInnerRatio = 0.36787944117144233;  // 1/e

struct CrossingQuery {
  Vec2 x;
  double eps = 0.0;
  double inner_ratio = kDefaultInnerRatio;
  double kill_radius = 1.0;
};

struct CrossingRecord {
  CrossingQuery query;
  int count = 0;
  // true iff every segment that came within eps of x had a time step at most
  // (eps*inner_ratio)^2 / 10
  bool resolved = true;
};

struct LocalTimeEstimate {
  Vec2 x;
  std::vector<double> eps_grid;
  std::vector<int> counts;
  double a_hat = 0.0;
  double a_stderr = 0.0;
};

class BudgetExceededError : public std::runtime_error {
 public:
  BudgetExceededError(const std::string& what, LocalTimeEstimate partial_)
      : std::runtime_error(what), partial(std::move(partial_)) {}
  LocalTimeEstimate partial;
};

CrossingRecord count_crossings(const PlanarPath& path, const CrossingQuery& query);

// Counts over a decreasing radius grid and the least-squares slope of count
// against log(1/eps). Refines the path near x (Brownian bridge insertion) when
// its step is too coarse for the finest radius, up to refine_budget inserted
// points; beyond that throws BudgetExceededError carrying the radii that were
// resolvable.
LocalTimeEstimate estimate_local_time(const PlanarPath& path, Vec2 x,
                                      std::vector<double> eps_grid,
                                      std::size_t refine_budget = (1u << 22));

// Top-k grid points by crossing count at fixed eps; grid nodes are integer
// multiples of grid_step covering B(0,1) intersected with the path bounding
// box (restricted to nodes with |node| < kill_radius - eps so the query is
// valid). Ties break lexicographically. Single sweep over the path; per-node
// results equal count_crossings exactly.
std::vector<std::pair<Vec2, int>> scan_thick_points(const PlanarPath& path,
                                                    double grid_step, double eps,
                                                    int top_k);

namespace detail {

// Carried radial-window automaton shared by count_crossings and
// scan_thick_points. region: 0 dist<=r_in, 1 between, 2 dist>=eps.
struct WindowState {
  uint8_t region = 2;
  bool armed = false;  // inside the window, waiting to reach eps
  int count = 0;
};

inline uint8_t region_of(double dist2, double r_in2, double eps2) {
  if (dist2 <= r_in2) return 0;
  if (dist2 >= eps2) return 2;
  return 1;
}

inline void apply_region_change(WindowState& st, uint8_t next) {
  if (next == 0 && !st.armed) st.armed = true;
  if (next == 2 && st.armed) {
    ++st.count;
    st.armed = false;
  }
  st.region = next;
}

// Processes one segment p -> p+d against the window; d0sq/d1sq are squared
// distances of the endpoints from x.
void process_window_segment(Vec2 p, Vec2 d, double d0sq, double d1sq, Vec2 x,
                            double r_in, double eps, WindowState& st);

}  // namespace detail

}  // namespace bmlab
