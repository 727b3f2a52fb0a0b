#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

namespace bmlab {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Vec2 a) { return a.x * a.x + a.y * a.y; }
inline double norm(Vec2 a) { return std::sqrt(norm2(a)); }

// Lexicographic order (x, then y); used wherever ties must break deterministically.
inline bool lex_less(Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

struct CircleRoots {
  int n = 0;
  double s[2] = {0.0, 0.0};
};

// Parameters s in [0,1] where |p + s*d - c| = r, ascending. Tangencies are
// dropped (they do not change which side the segment is on).
inline CircleRoots segment_circle_roots(Vec2 p, Vec2 d, Vec2 c, double r) {
  const Vec2 f = p - c;
  const double A = norm2(d);
  const double B = 2.0 * dot(f, d);
  const double C = norm2(f) - r * r;
  CircleRoots out;
  if (A <= 0.0) return out;
  const double disc = B * B - 4.0 * A * C;
  if (disc <= 0.0) return out;
  const double sq = std::sqrt(disc);
  // Numerically stable pair
  const double q = -0.5 * (B + (B >= 0 ? sq : -sq));
  double r0 = q / A;
  double r1 = (q != 0.0) ? C / q : r0;
  if (r0 > r1) std::swap(r0, r1);
  if (r0 >= 0.0 && r0 <= 1.0) out.s[out.n++] = r0;
  if (r1 >= 0.0 && r1 <= 1.0 && r1 != r0) out.s[out.n++] = r1;
  return out;
}

// Squared distance from point c to segment p + s*d, s in [0,1].
inline double segment_point_dist2(Vec2 p, Vec2 d, Vec2 c) {
  const double A = norm2(d);
  double s = 0.0;
  if (A > 0.0) s = std::clamp(dot(c - p, d) / A, 0.0, 1.0);
  return norm2(p + s * d - c);
}

// Liang-Barsky clip of segment p + s*d, s in [0,1], to the closed box
// [lo.x,hi.x]x[lo.y,hi.y]. Returns the s-interval inside, or nullopt.
inline std::optional<std::pair<double, double>> clip_segment_to_box(Vec2 p, Vec2 d,
                                                                    Vec2 lo, Vec2 hi) {
  double s0 = 0.0, s1 = 1.0;
  const double pvals[4] = {-d.x, d.x, -d.y, d.y};
  const double qvals[4] = {p.x - lo.x, hi.x - p.x, p.y - lo.y, hi.y - p.y};
  for (int i = 0; i < 4; ++i) {
    if (pvals[i] == 0.0) {
      if (qvals[i] < 0.0) return std::nullopt;
      continue;
    }
    const double t = qvals[i] / pvals[i];
    if (pvals[i] < 0.0) {
      if (t > s1) return std::nullopt;
      if (t > s0) s0 = t;
    } else {
      if (t < s0) return std::nullopt;
      if (t < s1) s1 = t;
    }
  }
  return std::make_pair(s0, s1);
}

}  // namespace bmlab
