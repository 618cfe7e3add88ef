#include "kernels_impl.hpp"

#include <cmath>

namespace toricflow::kernels::scalar {

void stencil2(std::size_t n, const std::int32_t* ia, const std::int32_t* ib, const double* ca,
              const double* cb, const double* in, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double da = in[ia[i]] - in[i];
    const double db = in[ib[i]] - in[i];
    out[i] = ca[i] * da + cb[i] * db;
  }
}

double weighted_sum_leaf(std::size_t n, const double* w, const double* a) {
  double acc[kLanes] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    for (std::size_t l = 0; l < kLanes; ++l) acc[l] += w[i + l] * a[i + l];
  }
  for (std::size_t l = 0; i + l < n; ++l) acc[l] += w[i + l] * a[i + l];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

double weighted_dot_leaf(std::size_t n, const double* w, const double* a, const double* b) {
  double acc[kLanes] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    for (std::size_t l = 0; l < kLanes; ++l) acc[l] += (w[i + l] * a[i + l]) * b[i + l];
  }
  for (std::size_t l = 0; i + l < n; ++l) acc[l] += (w[i + l] * a[i + l]) * b[i + l];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

void axpy(std::size_t n, double alpha, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void subtract(std::size_t n, const double* a, const double* b, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void sym2_inverse(std::size_t n, const double* h00, const double* h01, const double* h11,
                  double* u00, double* u01, double* u11, double* min_eig) {
  for (std::size_t i = 0; i < n; ++i) {
    const double a = h00[i];
    const double b = h01[i];
    const double c = h11[i];
    const double det = a * c - b * b;
    const double inv = 1.0 / det;
    u00[i] = c * inv;
    u01[i] = -(b * inv);
    u11[i] = a * inv;
    const double mean = (a + c) * 0.5;
    const double half_gap = (a - c) * 0.5;
    const double radius = std::sqrt(half_gap * half_gap + b * b);
    const double largest = mean + radius;
    // det / largest avoids the cancellation in mean - radius for PD input.
    min_eig[i] = largest > 0.0 ? det / largest : mean - radius;
  }
}

}  // namespace toricflow::kernels::scalar
