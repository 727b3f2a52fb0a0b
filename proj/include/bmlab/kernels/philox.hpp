#pragma once

#include <cstdint>

// Philox-4x32-10 counter RNG. Counter layout used throughout the project:
//   ctr = (block_lo, block_hi, stream_lo, stream_hi), key = (seed_lo, seed_hi).
// Every (seed, stream) pair addresses an independent 2^64-block sequence, so
// replica streams never overlap and results do not depend on replica count.

namespace bmlab::kernels {

struct Philox4x32Block {
  uint32_t w[4];
};

namespace detail {

inline constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr uint32_t kPhiloxW1 = 0xBB67AE85u;

inline Philox4x32Block philox4x32_10(uint32_t c0, uint32_t c1, uint32_t c2,
                                     uint32_t c3, uint32_t k0, uint32_t k1) {
  for (int round = 0; round < 10; ++round) {
    const uint64_t p0 = static_cast<uint64_t>(kPhiloxM0) * c0;
    const uint64_t p1 = static_cast<uint64_t>(kPhiloxM1) * c2;
    const uint32_t lo0 = static_cast<uint32_t>(p0);
    const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
    const uint32_t lo1 = static_cast<uint32_t>(p1);
    const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
    const uint32_t n0 = hi1 ^ c1 ^ k0;
    const uint32_t n1 = lo1;
    const uint32_t n2 = hi0 ^ c3 ^ k1;
    const uint32_t n3 = lo0;
    c0 = n0;
    c1 = n1;
    c2 = n2;
    c3 = n3;
    k0 += kPhiloxW0;
    k1 += kPhiloxW1;
  }
  return {{c0, c1, c2, c3}};
}

// 52 random bits -> double strictly inside (0,1). The same arithmetic is used
// by the AVX2 lane so outputs agree bit for bit.
inline double u01_from_bits(uint64_t bits) {
  const double d = static_cast<double>(bits >> 12);
  return d * 0x1.0p-52 + 0x1.0p-53;
}

}  // namespace detail

// One philox block = two uniform doubles.
struct U01Pair {
  double u0, u1;
};

inline U01Pair u01_pair(uint64_t key, uint64_t stream, uint64_t block) {
  const auto b = detail::philox4x32_10(
      static_cast<uint32_t>(block), static_cast<uint32_t>(block >> 32),
      static_cast<uint32_t>(stream), static_cast<uint32_t>(stream >> 32),
      static_cast<uint32_t>(key), static_cast<uint32_t>(key >> 32));
  const uint64_t x0 = static_cast<uint64_t>(b.w[0]) | (static_cast<uint64_t>(b.w[1]) << 32);
  const uint64_t x1 = static_cast<uint64_t>(b.w[2]) | (static_cast<uint64_t>(b.w[3]) << 32);
  return {detail::u01_from_bits(x0), detail::u01_from_bits(x1)};
}

// SplitMix64 finalizer; used to derive per-replica seed tokens from a master
// seed by a counter scheme (replica i independent of replica count).
inline uint64_t mix64(uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline uint64_t derive_seed(uint64_t master, uint64_t replica) {
  return mix64(master + replica * 0x9E3779B97F4A7C15ull);
}

}  // namespace bmlab::kernels
