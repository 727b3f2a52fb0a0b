// AVX2 variants. Compiled with -mavx2 only (no FMA, -ffp-contract=off) so the
// arithmetic matches the scalar reference exactly. Philox words are held
// zero-extended in 64-bit lanes; _mm256_mul_epu32 provides the 32x32->64
// multiply the algorithm needs.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cstdint>

#include "bmlab/kernels/lane_math.hpp"
#include "bmlab/kernels/philox.hpp"
#include "internal.hpp"

namespace bmlab::kernels {

namespace {

struct Avx2Lane {
  using D = __m256d;
  using I = __m256i;
  using M = __m256d;

  static D splat(double v) { return _mm256_set1_pd(v); }
  static I splat_i(int64_t v) { return _mm256_set1_epi64x(v); }
  static D add(D a, D b) { return _mm256_add_pd(a, b); }
  static D sub(D a, D b) { return _mm256_sub_pd(a, b); }
  static D mul(D a, D b) { return _mm256_mul_pd(a, b); }
  static D div(D a, D b) { return _mm256_div_pd(a, b); }
  static D sqrt(D x) { return _mm256_sqrt_pd(x); }
  static D nearbyint(D x) {
    return _mm256_round_pd(x, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  }
  static I to_bits(D x) { return _mm256_castpd_si256(x); }
  static D from_bits(I b) { return _mm256_castsi256_pd(b); }
  static I shr_u(I a, int k) { return _mm256_srli_epi64(a, k); }
  static I shl(I a, int k) { return _mm256_slli_epi64(a, k); }
  static I and_(I a, I b) { return _mm256_and_si256(a, b); }
  static I or_(I a, I b) { return _mm256_or_si256(a, b); }
  static I xor_(I a, I b) { return _mm256_xor_si256(a, b); }
  static I add_i(I a, I b) { return _mm256_add_epi64(a, b); }
  static M ge(D a, D b) { return _mm256_cmp_pd(a, b, _CMP_GE_OQ); }
  static D select(M m, D a, D b) { return _mm256_blendv_pd(b, a, m); }
  static M int_bit0_set(I a) {
    const I bit = _mm256_and_si256(a, _mm256_set1_epi64x(1));
    return _mm256_castsi256_pd(_mm256_cmpeq_epi64(bit, _mm256_set1_epi64x(1)));
  }
  static D small_uint_to_double(I a) {
    const I bits = _mm256_or_si256(a, _mm256_set1_epi64x(0x4330000000000000ll));
    return _mm256_sub_pd(_mm256_castsi256_pd(bits), _mm256_set1_pd(0x1.0p52));
  }
  static I small_toint(D x) {
    const D shifted = _mm256_add_pd(x, _mm256_set1_pd(6755399441055744.0));
    return _mm256_and_si256(_mm256_castpd_si256(shifted), _mm256_set1_epi64x(0xFFFFFll));
  }
};

using VM = LaneMath<Avx2Lane>;

const __m256i kMask32 = _mm256_set1_epi64x(0xFFFFFFFFll);

// Four philox4x32-10 blocks in parallel; returns the two 64-bit output words.
inline void philox4x32_10_x4(__m256i blocks, uint64_t stream, uint64_t key, __m256i* x0,
                             __m256i* x1) {
  __m256i c0 = _mm256_and_si256(blocks, kMask32);
  __m256i c1 = _mm256_srli_epi64(blocks, 32);
  __m256i c2 = _mm256_set1_epi64x(static_cast<int64_t>(stream & 0xFFFFFFFFull));
  __m256i c3 = _mm256_set1_epi64x(static_cast<int64_t>(stream >> 32));
  __m256i k0 = _mm256_set1_epi64x(static_cast<int64_t>(key & 0xFFFFFFFFull));
  __m256i k1 = _mm256_set1_epi64x(static_cast<int64_t>(key >> 32));
  const __m256i m0 = _mm256_set1_epi64x(static_cast<int64_t>(detail::kPhiloxM0));
  const __m256i m1 = _mm256_set1_epi64x(static_cast<int64_t>(detail::kPhiloxM1));
  const __m256i w0 = _mm256_set1_epi64x(static_cast<int64_t>(detail::kPhiloxW0));
  const __m256i w1 = _mm256_set1_epi64x(static_cast<int64_t>(detail::kPhiloxW1));
  for (int round = 0; round < 10; ++round) {
    const __m256i p0 = _mm256_mul_epu32(c0, m0);
    const __m256i p1 = _mm256_mul_epu32(c2, m1);
    const __m256i lo0 = _mm256_and_si256(p0, kMask32);
    const __m256i hi0 = _mm256_srli_epi64(p0, 32);
    const __m256i lo1 = _mm256_and_si256(p1, kMask32);
    const __m256i hi1 = _mm256_srli_epi64(p1, 32);
    const __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(hi1, c1), k0);
    const __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(hi0, c3), k1);
    c0 = n0;
    c1 = lo1;
    c2 = n2;
    c3 = lo0;
    k0 = _mm256_and_si256(_mm256_add_epi64(k0, w0), kMask32);
    k1 = _mm256_and_si256(_mm256_add_epi64(k1, w1), kMask32);
  }
  *x0 = _mm256_or_si256(c0, _mm256_slli_epi64(c1, 32));
  *x1 = _mm256_or_si256(c2, _mm256_slli_epi64(c3, 32));
}

inline __m256d u01_from_bits_x4(__m256i x) {
  const __m256d d = Avx2Lane::small_uint_to_double(_mm256_srli_epi64(x, 12));
  return _mm256_add_pd(_mm256_mul_pd(d, _mm256_set1_pd(0x1.0p-52)),
                       _mm256_set1_pd(0x1.0p-53));
}

}  // namespace

void fill_normal_pairs_avx2(Stream s, uint64_t block0, std::size_t n, double* z0,
                            double* z1) {
  std::size_t i = 0;
  __m256i blocks = _mm256_set_epi64x(static_cast<int64_t>(block0 + 3),
                                     static_cast<int64_t>(block0 + 2),
                                     static_cast<int64_t>(block0 + 1),
                                     static_cast<int64_t>(block0));
  const __m256i four = _mm256_set1_epi64x(4);
  for (; i + 4 <= n; i += 4) {
    __m256i x0, x1;
    philox4x32_10_x4(blocks, s.id, s.key, &x0, &x1);
    const __m256d u1 = u01_from_bits_x4(x0);
    const __m256d u2 = u01_from_bits_x4(x1);
    __m256d a, b;
    VM::box_muller(u1, u2, &a, &b);
    _mm256_storeu_pd(z0 + i, a);
    _mm256_storeu_pd(z1 + i, b);
    blocks = _mm256_add_epi64(blocks, four);
  }
  if (i < n) fill_normal_pairs_scalar(s, block0 + i, n - i, z0 + i, z1 + i);
}

void fill_u01_avx2(Stream s, uint64_t block0, std::size_t n, double* out) {
  std::size_t i = 0;
  __m256i blocks = _mm256_set_epi64x(static_cast<int64_t>(block0 + 3),
                                     static_cast<int64_t>(block0 + 2),
                                     static_cast<int64_t>(block0 + 1),
                                     static_cast<int64_t>(block0));
  const __m256i four = _mm256_set1_epi64x(4);
  alignas(32) double a[4], b[4];
  for (; i + 4 <= n; i += 4) {
    __m256i x0, x1;
    philox4x32_10_x4(blocks, s.id, s.key, &x0, &x1);
    _mm256_store_pd(a, u01_from_bits_x4(x0));
    _mm256_store_pd(b, u01_from_bits_x4(x1));
    for (int lane = 0; lane < 4; ++lane) {
      out[2 * (i + lane)] = a[lane];
      out[2 * (i + lane) + 1] = b[lane];
    }
    blocks = _mm256_add_epi64(blocks, four);
  }
  if (i < n) fill_u01_scalar(s, block0 + i, n - i, out + 2 * i);
}

void squared_distances_avx2(const double* xs, const double* ys, std::size_t n, double qx,
                            double qy, double* out) {
  const __m256d vqx = _mm256_set1_pd(qx);
  const __m256d vqy = _mm256_set1_pd(qy);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vqx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vqy);
    _mm256_storeu_pd(out + i,
                     _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)));
  }
  if (i < n) squared_distances_scalar(xs + i, ys + i, n - i, qx, qy, out + i);
}

}  // namespace bmlab::kernels

#endif  // x86_64
