#include "bmlab/gauge_measure.hpp"

#include <algorithm>
#include <cmath>

#include "bmlab/errors.hpp"

namespace bmlab {

namespace {
constexpr double kInvE = 0.36787944117144233;       // e^-1
constexpr double kExpMinusE = 0.065988035845312537; // e^-e
// turning point of the triple-log gauge: s* = exp(-exp(x0)), x0 log x0 = 1
constexpr double kTripleLogTurn = 0.0029345530042893;
}  // namespace

GaugeFunction GaugeFunction::log_power(double alpha) {
  if (!(alpha > 0.0)) throw DomainError("log_power gauge: alpha must be positive");
  return GaugeFunction(Kind::log_power, alpha, kInvE);
}

GaugeFunction GaugeFunction::triple_log() {
  return GaugeFunction(Kind::triple_log, 0.0, kExpMinusE);
}

GaugeFunction GaugeFunction::linear() { return GaugeFunction(Kind::linear, 0.0, 1.0); }

GaugeFunction GaugeFunction::tabulated(std::vector<std::pair<double, double>> table) {
  if (table.size() < 2) throw DomainError("tabulated gauge: need >= 2 rows");
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (!(table[i].first > 0.0) || !(table[i].second >= 0.0))
      throw DomainError("tabulated gauge: entries must be positive");
    if (i > 0 && (!(table[i].first > table[i - 1].first) ||
                  !(table[i].second >= table[i - 1].second)))
      throw DomainError("tabulated gauge: table must be increasing");
  }
  GaugeFunction g(Kind::tabulated, 0.0, table.back().first);
  g.table_ = std::move(table);
  return g;
}

double GaugeFunction::operator()(double s) const {
  if (!(s > 0.0) || !(s <= s_max_))
    throw DomainError("gauge_eval: argument outside (0, s_max]");
  switch (kind_) {
    case Kind::log_power: {
      const double l = std::log(1.0 / s);  // >= 1 on the domain
      return std::pow(l, -alpha_);
    }
    case Kind::triple_log: {
      const double l1 = std::log(1.0 / s);  // > e on the domain
      const double l2 = std::log(l1);       // > 1
      const double l3 = std::log(l2);       // > 0
      return l3 / l1;
    }
    case Kind::linear:
      return s;
    case Kind::tabulated: {
      if (s <= table_.front().first) {
        // interpolate toward phi(0+) = 0
        return table_.front().second * (s / table_.front().first);
      }
      auto it = std::lower_bound(table_.begin(), table_.end(), s,
                                 [](const auto& row, double v) { return row.first < v; });
      if (it == table_.begin()) return it->second;
      const auto [s1, g1] = *(it - 1);
      const auto [s2, g2] = *it;
      const double w = (s - s1) / (s2 - s1);
      return g1 + w * (g2 - g1);
    }
  }
  return 0.0;
}

double GaugeFunction::monotone_below() const {
  return kind_ == Kind::triple_log ? kTripleLogTurn : s_max_;
}

std::string GaugeFunction::name() const {
  switch (kind_) {
    case Kind::log_power:
      return "log_power(" + std::to_string(alpha_) + ")";
    case Kind::triple_log:
      return "triple_log";
    case Kind::linear:
      return "linear";
    case Kind::tabulated:
      return "tabulated";
  }
  return {};
}

// ---------------------------------------------------------------------------

TimeSet TimeSet::from_intervals(std::vector<std::pair<double, double>> iv,
                                std::string provenance) {
  std::sort(iv.begin(), iv.end());
  TimeSet out;
  out.provenance = std::move(provenance);
  for (auto& [a, b] : iv) {
    if (!(a >= 0.0) || !(b >= a)) throw DomainError("TimeSet: bad interval");
    if (!out.intervals.empty() && a <= out.intervals.back().second) {
      out.intervals.back().second = std::fmax(out.intervals.back().second, b);
    } else {
      out.intervals.emplace_back(a, b);
    }
  }
  return out;
}

double TimeSet::total_length() const {
  double len = 0.0;
  for (const auto& [a, b] : intervals) len += b - a;
  return len;
}

// ---------------------------------------------------------------------------

MeasureOnTimeSet MeasureOnTimeSet::lebesgue_on(const TimeSet& set) {
  std::vector<Node> nodes;
  double acc = 0.0;
  for (const auto& [a, b] : set.intervals) {
    nodes.push_back({a, acc, acc});
    acc += b - a;
    nodes.push_back({b, acc, acc});
  }
  if (nodes.empty()) nodes.push_back({0.0, 0.0, 0.0});
  return from_nodes(std::move(nodes));
}

MeasureOnTimeSet MeasureOnTimeSet::atom(double t, double mass) {
  if (!(mass > 0.0)) throw DomainError("atom: mass must be positive");
  return from_nodes({{t, 0.0, mass}});
}

MeasureOnTimeSet MeasureOnTimeSet::from_nodes(std::vector<Node> nodes) {
  if (nodes.empty()) throw DomainError("MeasureOnTimeSet: no nodes");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!(nodes[i].f_right >= nodes[i].f_left))
      throw DomainError("MeasureOnTimeSet: decreasing jump");
    if (i > 0 && (!(nodes[i].t > nodes[i - 1].t) ||
                  !(nodes[i].f_left >= nodes[i - 1].f_right)))
      throw DomainError("MeasureOnTimeSet: nodes must increase");
  }
  MeasureOnTimeSet m;
  m.nodes_ = std::move(nodes);
  return m;
}

double MeasureOnTimeSet::mass() const {
  return nodes_.back().f_right - nodes_.front().f_left;
}

double MeasureOnTimeSet::cdf_right(double t) const {
  if (t < nodes_.front().t) return nodes_.front().f_left;
  if (t >= nodes_.back().t) return nodes_.back().f_right;
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t,
                             [](double v, const Node& n) { return v < n.t; });
  const Node& next = *it;
  const Node& prev = *(it - 1);
  if (t == prev.t) return prev.f_right;
  const double w = (t - prev.t) / (next.t - prev.t);
  return prev.f_right + w * (next.f_left - prev.f_right);
}

double MeasureOnTimeSet::cdf_left(double t) const {
  if (t <= nodes_.front().t) return nodes_.front().f_left;
  if (t > nodes_.back().t) return nodes_.back().f_right;
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t,
                             [](const Node& n, double v) { return n.t < v; });
  if (it != nodes_.end() && it->t == t) return it->f_left;
  const Node& next = *it;
  const Node& prev = *(it - 1);
  const double w = (t - prev.t) / (next.t - prev.t);
  return prev.f_right + w * (next.f_left - prev.f_right);
}

double MeasureOnTimeSet::interval_mass(double t, double eps) const {
  return cdf_right(t + eps) - cdf_left(t);
}

double MeasureOnTimeSet::quantile(double q) const {
  const double target = nodes_.front().f_left + q;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (n.f_right >= target) {
      if (n.f_left >= target || i == 0) return n.t;
      return n.t;  // jump at n.t covers the level
    }
    if (i + 1 < nodes_.size() && nodes_[i + 1].f_left >= target) {
      const Node& nx = nodes_[i + 1];
      if (nx.f_left == n.f_right) return nx.t;
      const double w = (target - n.f_right) / (nx.f_left - n.f_right);
      return n.t + w * (nx.t - n.t);
    }
  }
  return nodes_.back().t;
}

// ---------------------------------------------------------------------------

double premeasure(const TimeSet& set, double delta, const GaugeFunction& g) {
  if (!(delta > 0.0)) throw DomainError("premeasure: delta must be positive");
  const double gd = g(delta);
  long count = 0;
  double cover_end = -std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : set.intervals) {
    double next = a;
    if (cover_end >= a) {
      if (cover_end >= b) continue;
      next = cover_end;
    }
    // place intervals from `next` until b is covered
    const double len = b - next;
    const long k = len > 0.0 ? static_cast<long>(std::ceil(len / delta))
                             : 1;  // a point needs one interval
    count += k;
    cover_end = next + static_cast<double>(k) * delta;
  }
  return static_cast<double>(count) * gd;
}

RogersTaylorResult rogers_taylor_lower(const TimeSet& set, const MeasureOnTimeSet& mu,
                                       const GaugeFunction& g, double alpha,
                                       const std::vector<double>& eps_grid,
                                       int n_samples) {
  if (!(alpha > 0.0)) throw DomainError("rogers_taylor_lower: alpha must be positive");
  if (eps_grid.empty()) throw DomainError("rogers_taylor_lower: empty eps grid");
  for (std::size_t i = 0; i + 1 < eps_grid.size(); ++i)
    if (!(eps_grid[i] > eps_grid[i + 1]))
      throw DomainError("rogers_taylor_lower: eps grid must be decreasing");
  (void)set;

  const double total = mu.mass();
  RogersTaylorResult res;
  res.samples_total = n_samples;
  if (total <= 0.0) return res;
  int in_a = 0;
  for (int j = 0; j < n_samples; ++j) {
    const double q = (j + 0.5) / n_samples * total;
    const double t = mu.quantile(q);
    double worst = 0.0;
    for (double eps : eps_grid)
      worst = std::fmax(worst, mu.interval_mass(t, eps) / g(eps));
    if (worst < alpha) ++in_a;
  }
  res.samples_in_a = in_a;
  res.a_mass = total * static_cast<double>(in_a) / n_samples;
  res.lower_bound = res.a_mass / alpha;
  return res;
}

TimeSet visit_time_set(const PlanarPath& path, Vec2 x, double eta) {
  if (!(eta > 0.0)) throw DomainError("visit_time_set: eta must be positive");
  if (eta * eta < path.max_step() * (1.0 - 1e-9))
    throw ResolutionError("visit_time_set: eta below the path resolution scale");

  std::vector<std::pair<double, double>> iv;
  const double eta2 = eta * eta;
  bool inside = path.size() > 0 && norm2(path.point(0) - x) <= eta2;
  double open_at = 0.0;

  auto handle_segment = [&](double t0, Vec2 p0, double t1, Vec2 p1) {
    const Vec2 d = p1 - p0;
    const double d1 = norm2(p1 - x);
    if (!inside && std::fmin(norm2(p0 - x), d1) > eta2 &&
        segment_point_dist2(p0, d, x) > eta2)
      return;
    const CircleRoots roots = segment_circle_roots(p0, d, x, eta);
    for (int i = 0; i < roots.n; ++i) {
      const double s = roots.s[i];
      if (s <= 0.0) continue;
      const double t = t0 + s * (t1 - t0);
      if (inside) {
        iv.emplace_back(open_at, t);
        inside = false;
      } else {
        open_at = t;
        inside = true;
      }
    }
    // sync with the endpoint in case of a grazing double root
    const bool end_inside = d1 <= eta2;
    if (end_inside != inside) {
      if (inside) {
        iv.emplace_back(open_at, t1);
      } else {
        open_at = t1;
      }
      inside = end_inside;
    }
  };

  for (std::size_t i = 0; i + 1 < path.size(); ++i)
    handle_segment(path.times[i], path.point(i), path.times[i + 1], path.point(i + 1));
  if (path.exit && path.size() > 0) {
    const std::size_t last = path.size() - 1;
    handle_segment(path.times[last], path.point(last), path.exit->time,
                   path.exit->point);
    if (inside) {
      iv.emplace_back(open_at, path.exit->time);
      inside = false;
    }
  } else if (inside && path.size() > 0) {
    iv.emplace_back(open_at, path.times.back());
  }
  return TimeSet::from_intervals(std::move(iv), "visit_time_set");
}

}  // namespace bmlab
