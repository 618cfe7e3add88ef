#pragma once

#include "toricflow/kernels/kernels.hpp"

namespace toricflow::kernels {

namespace scalar {
void stencil2(std::size_t n, const std::int32_t* ia, const std::int32_t* ib, const double* ca,
              const double* cb, const double* in, double* out);
double weighted_sum_leaf(std::size_t n, const double* w, const double* a);
double weighted_dot_leaf(std::size_t n, const double* w, const double* a, const double* b);
void axpy(std::size_t n, double alpha, const double* x, double* y);
void subtract(std::size_t n, const double* a, const double* b, double* out);
void sym2_inverse(std::size_t n, const double* h00, const double* h01, const double* h11,
                  double* u00, double* u01, double* u11, double* min_eig);
}  // namespace scalar

#if defined(TORICFLOW_HAVE_AVX2)
namespace avx2 {
void stencil2(std::size_t n, const std::int32_t* ia, const std::int32_t* ib, const double* ca,
              const double* cb, const double* in, double* out);
double weighted_sum_leaf(std::size_t n, const double* w, const double* a);
double weighted_dot_leaf(std::size_t n, const double* w, const double* a, const double* b);
void axpy(std::size_t n, double alpha, const double* x, double* y);
void subtract(std::size_t n, const double* a, const double* b, double* out);
void sym2_inverse(std::size_t n, const double* h00, const double* h01, const double* h11,
                  double* u00, double* u01, double* u11, double* min_eig);
}  // namespace avx2
#endif

}  // namespace toricflow::kernels
