#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "toricflow/kernels/kernels.hpp"

using namespace toricflow;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("pairwise reductions are exact on small integers") {
  for (std::size_t n : {0u, 1u, 3u, 4u, 255u, 256u, 257u, 1000u, 4099u}) {
    std::vector<double> w(n, 1.0), a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = static_cast<double>(i);
    CHECK(kernels::weighted_sum(w, a) == static_cast<double>(n * (n ? n - 1 : 0) / 2));
    CHECK(kernels::weighted_dot(kernels::scalar_table(), w, a, w) ==
          static_cast<double>(n * (n ? n - 1 : 0) / 2));
  }
}

TEST_CASE("scalar and avx2 kernels agree bit for bit") {
  const kernels::Table* simd = kernels::avx2_table();
  if (!simd) {
    MESSAGE("AVX2 not available; skipping");
    return;
  }
  const kernels::Table& ref = kernels::scalar_table();
  std::mt19937_64 rng(7);
  for (std::size_t n : {1u, 2u, 3u, 5u, 8u, 31u, 256u, 257u, 1023u, 5000u}) {
    CAPTURE(n);
    const auto w = random_vector(n, rng, 0.1, 2.0);
    const auto a = random_vector(n, rng, -1.0, 1.0);
    const auto b = random_vector(n, rng, -1.0, 1.0);
    CHECK(kernels::weighted_sum(ref, w, a) == kernels::weighted_sum(*simd, w, a));
    CHECK(kernels::weighted_dot(ref, w, a, b) == kernels::weighted_dot(*simd, w, a, b));

    std::uniform_int_distribution<std::int32_t> pick(0, static_cast<std::int32_t>(n - 1));
    std::vector<std::int32_t> ia(n), ib(n);
    for (std::size_t i = 0; i < n; ++i) {
      ia[i] = pick(rng);
      ib[i] = pick(rng);
    }
    const auto ca = random_vector(n, rng, -3.0, 3.0);
    const auto cb = random_vector(n, rng, -3.0, 3.0);
    std::vector<double> s1(n), s2(n);
    ref.stencil2(n, ia.data(), ib.data(), ca.data(), cb.data(), a.data(), s1.data());
    simd->stencil2(n, ia.data(), ib.data(), ca.data(), cb.data(), a.data(), s2.data());
    CHECK(bitwise_equal(s1, s2));

    std::vector<double> y1 = b, y2 = b;
    ref.axpy(n, -0.37, a.data(), y1.data());
    simd->axpy(n, -0.37, a.data(), y2.data());
    CHECK(bitwise_equal(y1, y2));

    ref.subtract(n, a.data(), b.data(), y1.data());
    simd->subtract(n, a.data(), b.data(), y2.data());
    CHECK(bitwise_equal(y1, y2));

    // Mix of positive definite, indefinite and singular 2x2 blocks.
    auto h00 = random_vector(n, rng, -0.5, 3.0);
    auto h11 = random_vector(n, rng, -0.5, 3.0);
    auto h01 = random_vector(n, rng, -1.0, 1.0);
    if (n > 2) {
      h00[1] = 1.0, h11[1] = 1.0, h01[1] = 1.0;
    }
    std::vector<double> u[2][3], e[2];
    for (int k = 0; k < 2; ++k) {
      for (auto& v : u[k]) v.resize(n);
      e[k].resize(n);
    }
    ref.sym2_inverse(n, h00.data(), h01.data(), h11.data(), u[0][0].data(), u[0][1].data(),
                     u[0][2].data(), e[0].data());
    simd->sym2_inverse(n, h00.data(), h01.data(), h11.data(), u[1][0].data(), u[1][1].data(),
                       u[1][2].data(), e[1].data());
    for (int c = 0; c < 3; ++c) CHECK(bitwise_equal(u[0][c], u[1][c]));
    CHECK(bitwise_equal(e[0], e[1]));
  }
}

TEST_CASE("sym2_inverse inverts and reports the smallest eigenvalue") {
  const double h00 = 3.0, h01 = 1.5, h11 = 3.0;
  double u00, u01, u11, lambda;
  kernels::scalar_table().sym2_inverse(1, &h00, &h01, &h11, &u00, &u01, &u11, &lambda);
  CHECK(lambda == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(h00 * u00 + h01 * u01 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(h00 * u01 + h01 * u11 == doctest::Approx(0.0).epsilon(1e-15));
}
