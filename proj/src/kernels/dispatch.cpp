#include <cstdlib>
#include <string_view>

#include "kernels_impl.hpp"

namespace toricflow::kernels {

const Table& scalar_table() {
  static const Table table{
      "scalar",          &scalar::stencil2, &scalar::weighted_sum_leaf,
      &scalar::weighted_dot_leaf, &scalar::axpy, &scalar::subtract,
      &scalar::sym2_inverse,
  };
  return table;
}

const Table* avx2_table() {
#if defined(TORICFLOW_HAVE_AVX2)
  static const Table table{
      "avx2",          &avx2::stencil2, &avx2::weighted_sum_leaf,
      &avx2::weighted_dot_leaf, &avx2::axpy, &avx2::subtract,
      &avx2::sym2_inverse,
  };
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &table : nullptr;
#else
  return nullptr;
#endif
}

const Table& active() {
  static const Table& chosen = [] () -> const Table& {
    const char* forced = std::getenv("TOOL_SIMD");
    if (forced && std::string_view(forced) == "scalar") return scalar_table();
    if (const Table* simd = avx2_table()) return *simd;
    return scalar_table();
  }();
  return chosen;
}

namespace {

template <class Leaf>
double pairwise(std::size_t begin, std::size_t end, const Leaf& leaf) {
  const std::size_t len = end - begin;
  if (len <= kLeafSize) return leaf(begin, len);
  // Split on a lane boundary so every leaf starts lane-aligned.
  const std::size_t half = (len / 2) / kLanes * kLanes;
  return pairwise(begin, begin + half, leaf) + pairwise(begin + half, end, leaf);
}

}  // namespace

void stencil2(std::span<const std::int32_t> ia, std::span<const std::int32_t> ib,
              std::span<const double> ca, std::span<const double> cb,
              std::span<const double> in, std::span<double> out) {
  active().stencil2(out.size(), ia.data(), ib.data(), ca.data(), cb.data(), in.data(),
                    out.data());
}

double weighted_sum(const Table& t, std::span<const double> w, std::span<const double> a) {
  return pairwise(0, a.size(), [&](std::size_t b, std::size_t n) {
    return t.weighted_sum_leaf(n, w.data() + b, a.data() + b);
  });
}

double weighted_sum(std::span<const double> w, std::span<const double> a) {
  return weighted_sum(active(), w, a);
}

double weighted_dot(const Table& t, std::span<const double> w, std::span<const double> a,
                    std::span<const double> b) {
  return pairwise(0, a.size(), [&](std::size_t s, std::size_t n) {
    return t.weighted_dot_leaf(n, w.data() + s, a.data() + s, b.data() + s);
  });
}

double weighted_dot(std::span<const double> w, std::span<const double> a,
                    std::span<const double> b) {
  return weighted_dot(active(), w, a, b);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(y.size(), alpha, x.data(), y.data());
}

void subtract(std::span<const double> a, std::span<const double> b, std::span<double> out) {
  active().subtract(out.size(), a.data(), b.data(), out.data());
}

}  // namespace toricflow::kernels
