// Compiled with -mavx2 (no -mfma); only reached after a runtime CPU check.
#include "kernels_impl.hpp"

#include <immintrin.h>

#include <cmath>

namespace toricflow::kernels::avx2 {

void stencil2(std::size_t n, const std::int32_t* ia, const std::int32_t* ib, const double* ca,
              const double* cb, const double* in, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m128i ja = _mm_loadu_si128(reinterpret_cast<const __m128i*>(ia + i));
    const __m128i jb = _mm_loadu_si128(reinterpret_cast<const __m128i*>(ib + i));
    const __m256d center = _mm256_loadu_pd(in + i);
    const __m256d da = _mm256_sub_pd(_mm256_i32gather_pd(in, ja, 8), center);
    const __m256d db = _mm256_sub_pd(_mm256_i32gather_pd(in, jb, 8), center);
    const __m256d pa = _mm256_mul_pd(_mm256_loadu_pd(ca + i), da);
    const __m256d pb = _mm256_mul_pd(_mm256_loadu_pd(cb + i), db);
    _mm256_storeu_pd(out + i, _mm256_add_pd(pa, pb));
  }
  for (; i < n; ++i) {
    const double da = in[ia[i]] - in[i];
    const double db = in[ib[i]] - in[i];
    out[i] = ca[i] * da + cb[i] * db;
  }
}

namespace {

double finish(__m256d acc, std::size_t i, std::size_t n, const double* w, const double* a,
              const double* b) {
  alignas(32) double lanes[kLanes];
  _mm256_store_pd(lanes, acc);
  for (std::size_t l = 0; i + l < n; ++l) {
    lanes[l] += b ? (w[i + l] * a[i + l]) * b[i + l] : w[i + l] * a[i + l];
  }
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

}  // namespace

double weighted_sum_leaf(std::size_t n, const double* w, const double* a) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i)));
  }
  return finish(acc, i, n, w, a, nullptr);
}

double weighted_dot_leaf(std::size_t n, const double* w, const double* a, const double* b) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d wa = _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_loadu_pd(a + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(wa, _mm256_loadu_pd(b + i)));
  }
  return finish(acc, i, n, w, a, b);
}

void axpy(std::size_t n, double alpha, const double* x, double* y) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void subtract(std::size_t n, const double* a, const double* b, double* out) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] - b[i];
}

void sym2_inverse(std::size_t n, const double* h00, const double* h01, const double* h11,
                  double* u00, double* u01, double* u11, double* min_eig) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d sign = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(h00 + i);
    const __m256d b = _mm256_loadu_pd(h01 + i);
    const __m256d c = _mm256_loadu_pd(h11 + i);
    const __m256d det = _mm256_sub_pd(_mm256_mul_pd(a, c), _mm256_mul_pd(b, b));
    const __m256d inv = _mm256_div_pd(one, det);
    _mm256_storeu_pd(u00 + i, _mm256_mul_pd(c, inv));
    _mm256_storeu_pd(u01 + i, _mm256_xor_pd(_mm256_mul_pd(b, inv), sign));
    _mm256_storeu_pd(u11 + i, _mm256_mul_pd(a, inv));
    const __m256d mean = _mm256_mul_pd(_mm256_add_pd(a, c), half);
    const __m256d gap = _mm256_mul_pd(_mm256_sub_pd(a, c), half);
    const __m256d radius =
        _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(gap, gap), _mm256_mul_pd(b, b)));
    const __m256d largest = _mm256_add_pd(mean, radius);
    const __m256d stable = _mm256_div_pd(det, largest);
    const __m256d plain = _mm256_sub_pd(mean, radius);
    const __m256d positive = _mm256_cmp_pd(largest, zero, _CMP_GT_OQ);
    _mm256_storeu_pd(min_eig + i, _mm256_blendv_pd(plain, stable, positive));
  }
  if (i < n) scalar::sym2_inverse(n - i, h00 + i, h01 + i, h11 + i, u00 + i, u01 + i, u11 + i,
                                  min_eig + i);
}

}  // namespace toricflow::kernels::avx2
