#pragma once

#include <cstdint>

#include "bmlab/kernels/kernels.hpp"

// Stream discipline: a 64-bit seed token identifies one logical random object
// (a path, a subordinator replica, ...). Channels separate independent draw
// purposes within that object so that buffered batch generation on one channel
// never perturbs draws on another.

namespace bmlab::rng {

namespace channel {
inline constexpr uint64_t normals = 0;   // path increments
inline constexpr uint64_t aux = 1;       // boundary-touch uniforms, one block per step
inline constexpr uint64_t refine = 2;    // bridge refinement draws
inline constexpr uint64_t counts = 3;    // Poisson jump counts
inline constexpr uint64_t sizes = 4;     // jump sizes
inline constexpr uint64_t arrivals = 5;  // jump arrival times
inline constexpr uint64_t scratch = 6;   // tests, property generators
}  // namespace channel

inline kernels::Stream stream(uint64_t seed_token, uint64_t chan) {
  return kernels::Stream{seed_token, chan};
}

// u01 draw at (channel, block, slot 0/1); used for rare on-demand draws.
inline double u01_at(uint64_t seed_token, uint64_t chan, uint64_t block, int slot) {
  const kernels::U01Pair p = kernels::u01_pair(seed_token, chan, block);
  return slot == 0 ? p.u0 : p.u1;
}

using kernels::derive_seed;

}  // namespace bmlab::rng
