#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference
// implementation; SIMD variants are selected at runtime and must produce
// bit-identical results (same per-lane operation order, no FMA contraction).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace toricflow::kernels {

/// Number of interleaved accumulators used by every reduction leaf.
inline constexpr std::size_t kLanes = 4;
/// Reductions split ranges pairwise until a leaf holds at most this many
/// elements; the leaf sums lane-interleaved into kLanes accumulators.
inline constexpr std::size_t kLeafSize = 256;

struct Table {
  std::string_view name;

  // out[i] = ca[i] * (in[ia[i]] - in[i]) + cb[i] * (in[ib[i]] - in[i])
  void (*stencil2)(std::size_t n, const std::int32_t* ia, const std::int32_t* ib,
                   const double* ca, const double* cb, const double* in, double* out);

  // Leaf reductions; see kLanes for the summation order.
  double (*weighted_sum_leaf)(std::size_t n, const double* w, const double* a);
  double (*weighted_dot_leaf)(std::size_t n, const double* w, const double* a,
                              const double* b);

  // y[i] += alpha * x[i]
  void (*axpy)(std::size_t n, double alpha, const double* x, double* y);

  // out[i] = a[i] - b[i]
  void (*subtract)(std::size_t n, const double* a, const double* b, double* out);

  // Batched inverse of symmetric 2x2 matrices [[h00, h01], [h01, h11]] plus
  // the smallest eigenvalue of each input matrix.
  void (*sym2_inverse)(std::size_t n, const double* h00, const double* h01,
                       const double* h11, double* u00, double* u01, double* u11,
                       double* min_eig);
};

const Table& scalar_table();

/// AVX2 variants, or nullptr when not compiled in or unsupported by the CPU.
const Table* avx2_table();

/// The table used by the library. Chosen once: AVX2 when available, unless
/// the environment variable TOOL_SIMD=scalar forces the reference kernels.
const Table& active();

// Convenience wrappers over active().

void stencil2(std::span<const std::int32_t> ia, std::span<const std::int32_t> ib,
              std::span<const double> ca, std::span<const double> cb,
              std::span<const double> in, std::span<double> out);

/// Sum of w[i] * a[i], pairwise over leaves of kLeafSize.
double weighted_sum(std::span<const double> w, std::span<const double> a);
double weighted_sum(const Table& t, std::span<const double> w, std::span<const double> a);

/// Sum of w[i] * a[i] * b[i], pairwise over leaves of kLeafSize.
double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b);
double weighted_dot(const Table& t, std::span<const double> w, std::span<const double> a,
                    std::span<const double> b);

void axpy(double alpha, std::span<const double> x, std::span<double> y);
void subtract(std::span<const double> a, std::span<const double> b, std::span<double> out);

}  // namespace toricflow::kernels
