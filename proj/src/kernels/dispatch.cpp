#include <cstdlib>
#include <stdexcept>
#include <string>

#include "bmlab/kernels/kernels.hpp"
#include "internal.hpp"

namespace bmlab::kernels {

namespace {

using NormalFn = void (*)(Stream, uint64_t, std::size_t, double*, double*);
using U01Fn = void (*)(Stream, uint64_t, std::size_t, double*);
using SqDistFn = void (*)(const double*, const double*, std::size_t, double, double,
                          double*);

struct Table {
  Backend backend;
  NormalFn normals;
  U01Fn u01;
  SqDistFn sqdist;
};

constexpr Table kScalarTable{Backend::scalar, fill_normal_pairs_scalar, fill_u01_scalar,
                             squared_distances_scalar};

#ifdef BMLAB_HAVE_AVX2_BUILD
constexpr Table kAvx2Table{Backend::avx2, fill_normal_pairs_avx2, fill_u01_avx2,
                           squared_distances_avx2};
#endif

bool cpu_has_avx2() {
#ifdef BMLAB_HAVE_AVX2_BUILD
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

const Table* pick_default() {
#ifdef BMLAB_HAVE_AVX2_BUILD
  if (const char* env = std::getenv("BMLAB_KERNEL")) {
    const std::string v = env;
    if (v == "scalar") return &kScalarTable;
    if (v == "avx2" && cpu_has_avx2()) return &kAvx2Table;
  }
  if (cpu_has_avx2()) return &kAvx2Table;
#endif
  return &kScalarTable;
}

const Table* g_table = pick_default();

}  // namespace

Backend active_backend() { return g_table->backend; }

bool backend_available(Backend b) {
  if (b == Backend::scalar) return true;
  return cpu_has_avx2();
}

void force_backend(Backend b) {
  if (!backend_available(b)) throw std::invalid_argument("kernel backend unavailable");
  if (b == Backend::scalar) {
    g_table = &kScalarTable;
    return;
  }
#ifdef BMLAB_HAVE_AVX2_BUILD
  g_table = &kAvx2Table;
#endif
}

std::string backend_name(Backend b) { return b == Backend::scalar ? "scalar" : "avx2"; }

void fill_normal_pairs(Stream s, uint64_t block0, std::size_t n, double* z0, double* z1) {
  g_table->normals(s, block0, n, z0, z1);
}

void fill_u01(Stream s, uint64_t block0, std::size_t n, double* out) {
  g_table->u01(s, block0, n, out);
}

void squared_distances(const double* xs, const double* ys, std::size_t n, double qx,
                       double qy, double* out) {
  g_table->sqdist(xs, ys, n, qx, qy, out);
}

}  // namespace bmlab::kernels
