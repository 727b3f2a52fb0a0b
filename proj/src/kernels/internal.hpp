#pragma once

#include <cstddef>
#include <cstdint>

#include "bmlab/kernels/kernels.hpp"

namespace bmlab::kernels {

void fill_normal_pairs_scalar(Stream s, uint64_t block0, std::size_t n, double* z0,
                              double* z1);
void fill_u01_scalar(Stream s, uint64_t block0, std::size_t n, double* out);
void squared_distances_scalar(const double* xs, const double* ys, std::size_t n,
                              double qx, double qy, double* out);

#if defined(__x86_64__) || defined(_M_X64)
#define BMLAB_HAVE_AVX2_BUILD 1
void fill_normal_pairs_avx2(Stream s, uint64_t block0, std::size_t n, double* z0,
                            double* z1);
void fill_u01_avx2(Stream s, uint64_t block0, std::size_t n, double* out);
void squared_distances_avx2(const double* xs, const double* ys, std::size_t n, double qx,
                            double qy, double* out);
#endif

}  // namespace bmlab::kernels
