#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <vector>

#include "bmlab/kernels/kernels.hpp"
#include "bmlab/kernels/philox.hpp"

using namespace bmlab;

TEST_SUITE("kernels") {

// Known-answer vectors for philox4x32-10 (Random123 test vectors).
TEST_CASE("philox known answers") {
  using kernels::detail::philox4x32_10;
  {
    const auto b = philox4x32_10(0, 0, 0, 0, 0, 0);
    CHECK(b.w[0] == 0x6627e8d5u);
    CHECK(b.w[1] == 0xe169c58du);
    CHECK(b.w[2] == 0xbc57ac4cu);
    CHECK(b.w[3] == 0x9b00dbd8u);
  }
  {
    const auto b = philox4x32_10(0xFFFFFFFFu, 0xFFFFFFFFu, 0xFFFFFFFFu, 0xFFFFFFFFu,
                                 0xFFFFFFFFu, 0xFFFFFFFFu);
    CHECK(b.w[0] == 0x408f276du);
    CHECK(b.w[1] == 0x41c83b0eu);
    CHECK(b.w[2] == 0xa20bc7c6u);
    CHECK(b.w[3] == 0x6d5451fdu);
  }
  {
    const auto b = philox4x32_10(0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u,
                                 0xa4093822u, 0x299f31d0u);
    CHECK(b.w[0] == 0xd16cfe09u);
    CHECK(b.w[1] == 0x94fdccebu);
    CHECK(b.w[2] == 0x5001e420u);
    CHECK(b.w[3] == 0x24126ea1u);
  }
}

TEST_CASE("u01 range and determinism") {
  const kernels::Stream s{12345, 7};
  std::vector<double> a(2000), b(2000);
  kernels::fill_u01(s, 0, 1000, a.data());
  kernels::fill_u01(s, 0, 1000, b.data());
  CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
  for (double v : a) {
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("scalar and avx2 backends agree bit for bit") {
  if (!kernels::backend_available(kernels::Backend::avx2)) return;
  const auto previous = kernels::active_backend();
  const kernels::Stream s{0xDEADBEEFCAFEull, 42};

  for (std::size_t n : {1ul, 3ul, 4ul, 7ul, 64ul, 1001ul}) {
    std::vector<double> zx_s(n), zy_s(n), zx_v(n), zy_v(n);
    kernels::force_backend(kernels::Backend::scalar);
    kernels::fill_normal_pairs(s, 977, n, zx_s.data(), zy_s.data());
    kernels::force_backend(kernels::Backend::avx2);
    kernels::fill_normal_pairs(s, 977, n, zx_v.data(), zy_v.data());
    CHECK(std::memcmp(zx_s.data(), zx_v.data(), n * sizeof(double)) == 0);
    CHECK(std::memcmp(zy_s.data(), zy_v.data(), n * sizeof(double)) == 0);

    std::vector<double> u_s(2 * n), u_v(2 * n);
    kernels::force_backend(kernels::Backend::scalar);
    kernels::fill_u01(s, 31, n, u_s.data());
    kernels::force_backend(kernels::Backend::avx2);
    kernels::fill_u01(s, 31, n, u_v.data());
    CHECK(std::memcmp(u_s.data(), u_v.data(), 2 * n * sizeof(double)) == 0);

    std::vector<double> xs(n + 1), ys(n), d_s(n), d_v(n);
    kernels::fill_u01(s, 1000, (n + 1) / 2, xs.data());
    for (std::size_t i = 0; i < n; ++i) ys[i] = xs[n - 1 - i];
    kernels::force_backend(kernels::Backend::scalar);
    kernels::squared_distances(xs.data(), ys.data(), n, 0.25, -0.5, d_s.data());
    kernels::force_backend(kernels::Backend::avx2);
    kernels::squared_distances(xs.data(), ys.data(), n, 0.25, -0.5, d_v.data());
    CHECK(std::memcmp(d_s.data(), d_v.data(), n * sizeof(double)) == 0);
  }
  kernels::force_backend(previous);
}

// The hand-rolled log/sincos pipeline must agree with libm to ~2 ulp; checked
// through the Box-Muller identity z0^2 + z1^2 = -2 log(u1).
TEST_CASE("normal generation accuracy against libm") {
  const kernels::Stream s{99, 0};
  const std::size_t n = 4096;
  std::vector<double> zx(n), zy(n);
  kernels::fill_normal_pairs(s, 0, n, zx.data(), zy.data());
  for (std::size_t i = 0; i < n; ++i) {
    const kernels::U01Pair u = kernels::u01_pair(99, 0, i);
    const double r = std::sqrt(-2.0 * std::log(u.u0));
    const double zx_ref = r * std::cos(2.0 * M_PI * u.u1);
    const double zy_ref = r * std::sin(2.0 * M_PI * u.u1);
    CHECK(zx[i] == doctest::Approx(zx_ref).epsilon(1e-12));
    CHECK(zy[i] == doctest::Approx(zy_ref).epsilon(1e-12));
  }
}

TEST_CASE("normal moments") {
  const kernels::Stream s{2024, 0};
  const std::size_t n = 200000;
  std::vector<double> zx(n), zy(n);
  kernels::fill_normal_pairs(s, 0, n, zx.data(), zy.data());
  double m1 = 0, m2 = 0, m4 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    m1 += zx[i] + zy[i];
    m2 += zx[i] * zx[i] + zy[i] * zy[i];
    m4 += zx[i] * zx[i] * zx[i] * zx[i];
  }
  const double N = 2.0 * n;
  CHECK(std::fabs(m1 / N) < 4.0 / std::sqrt(N));                 // mean 0
  CHECK(m2 / N == doctest::Approx(1.0).epsilon(0.01));           // variance 1
  CHECK(m4 / n == doctest::Approx(3.0).epsilon(0.05));           // kurtosis 3
}

TEST_CASE("streams are independent of block origin") {
  // drawing blocks [k, k+n) equals drawing them one at a time
  const kernels::Stream s{7777, 3};
  std::vector<double> a(10), b(10);
  kernels::fill_normal_pairs(s, 100, 5, a.data(), a.data() + 5);
  for (int i = 0; i < 5; ++i)
    kernels::fill_normal_pairs(s, 100 + i, 1, b.data() + i, b.data() + 5 + i);
  for (int i = 0; i < 10; ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("derive_seed is injective-ish and order independent") {
  CHECK(kernels::derive_seed(1, 0) != kernels::derive_seed(1, 1));
  CHECK(kernels::derive_seed(1, 5) == kernels::derive_seed(1, 5));
  CHECK(kernels::derive_seed(2, 5) != kernels::derive_seed(1, 5));
}

}  // TEST_SUITE
