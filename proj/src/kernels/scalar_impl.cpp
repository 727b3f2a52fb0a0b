#include <bit>
#include <cmath>
#include <cstdint>

#include "bmlab/kernels/lane_math.hpp"
#include "bmlab/kernels/philox.hpp"
#include "internal.hpp"

namespace bmlab::kernels {

namespace {

struct ScalarLane {
  using D = double;
  using I = int64_t;
  using M = bool;

  static D splat(double v) { return v; }
  static I splat_i(int64_t v) { return v; }
  static D add(D a, D b) { return a + b; }
  static D sub(D a, D b) { return a - b; }
  static D mul(D a, D b) { return a * b; }
  static D div(D a, D b) { return a / b; }
  static D sqrt(D x) { return std::sqrt(x); }
  static D nearbyint(D x) { return std::nearbyint(x); }
  static I to_bits(D x) { return std::bit_cast<int64_t>(x); }
  static D from_bits(I b) { return std::bit_cast<double>(b); }
  static I shr_u(I a, int k) { return static_cast<int64_t>(static_cast<uint64_t>(a) >> k); }
  static I shl(I a, int k) { return static_cast<int64_t>(static_cast<uint64_t>(a) << k); }
  static I and_(I a, I b) { return a & b; }
  static I or_(I a, I b) { return a | b; }
  static I xor_(I a, I b) { return a ^ b; }
  static I add_i(I a, I b) { return a + b; }
  static M ge(D a, D b) { return a >= b; }
  static D select(M m, D a, D b) { return m ? a : b; }
  static M int_bit0_set(I a) { return (a & 1) != 0; }
  static D small_uint_to_double(I a) {
    return std::bit_cast<double>(a | 0x4330000000000000ll) - 0x1.0p52;
  }
  static I small_toint(D x) {
    return std::bit_cast<int64_t>(x + 6755399441055744.0) & 0xFFFFFll;
  }
};

using SM = LaneMath<ScalarLane>;

}  // namespace

void fill_normal_pairs_scalar(Stream s, uint64_t block0, std::size_t n, double* z0,
                              double* z1) {
  for (std::size_t i = 0; i < n; ++i) {
    const U01Pair u = u01_pair(s.key, s.id, block0 + i);
    SM::box_muller(u.u0, u.u1, &z0[i], &z1[i]);
  }
}

void fill_u01_scalar(Stream s, uint64_t block0, std::size_t n, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const U01Pair u = u01_pair(s.key, s.id, block0 + i);
    out[2 * i] = u.u0;
    out[2 * i + 1] = u.u1;
  }
}

void squared_distances_scalar(const double* xs, const double* ys, std::size_t n,
                              double qx, double qy, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - qx;
    const double dy = ys[i] - qy;
    out[i] = dx * dx + dy * dy;
  }
}

}  // namespace bmlab::kernels
