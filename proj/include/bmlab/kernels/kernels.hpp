#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "bmlab/kernels/philox.hpp"

// Batch kernels with runtime backend selection. Scalar reference
// implementations and AVX2 variants are bit-for-bit equivalent (enforced by
// tests), so simulation results do not depend on the host ISA.

namespace bmlab::kernels {

enum class Backend { scalar, avx2 };

Backend active_backend();
bool backend_available(Backend b);
// Force a backend (tests, BMLAB_KERNEL=scalar|avx2 env override at startup).
// Throws std::invalid_argument if the backend is unavailable.
void force_backend(Backend b);
std::string backend_name(Backend b);

// Identifies an independent RNG stream: key = seed token, id = channel.
struct Stream {
  uint64_t key = 0;
  uint64_t id = 0;
};

// n standard-normal pairs from philox blocks [block0, block0+n).
void fill_normal_pairs(Stream s, uint64_t block0, std::size_t n, double* z0, double* z1);

// 2n uniforms in (0,1) from philox blocks [block0, block0+n).
void fill_u01(Stream s, uint64_t block0, std::size_t n, double* out);

// out[i] = (xs[i]-qx)^2 + (ys[i]-qy)^2
void squared_distances(const double* xs, const double* ys, std::size_t n, double qx,
                       double qy, double* out);

}  // namespace bmlab::kernels
