#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "toricflow/grid.hpp"

namespace toricflow {

/// A linear difference operator in difference form:
///   out[i] = ca[i] * (in[ia[i]] - in[i]) + cb[i] * (in[ib[i]] - in[i])
/// for regular rows, plus fitted rows with arbitrary support that override
/// the regular table (their regular entries point at the node itself with
/// zero weight). Difference form makes the operator vanish exactly on
/// constants.
struct Stencil {
  struct FittedRow {
    std::size_t node = 0;
    std::vector<std::int32_t> support;
    std::vector<double> weights;
  };

  std::vector<std::int32_t> ia, ib;
  std::vector<double> ca, cb;
  std::vector<FittedRow> fitted;

  std::size_t size() const { return ca.size(); }
  void apply(std::span<const double> in, std::span<double> out) const;
};

/// First and second difference operators along each axis of a grid.
///
/// Along an axis a node uses the centred 3-point stencil when both
/// neighbours exist, otherwise the one-sided 3-point stencil (forward
/// preferred). Nodes where no 3-point line stencil fits (e.g. near acute
/// simplex corners) get the minimum-norm least-squares stencil from a local
/// quadratic fit over nearby nodes. Every stencil is exact on quadratics.
class DifferenceOperators {
 public:
  explicit DifferenceOperators(const Grid& grid);

  int dim() const { return static_cast<int>(first_.size()); }
  std::size_t size() const { return first_.front().size(); }
  const Stencil& first(int axis) const { return first_[axis]; }
  const Stencil& second(int axis) const { return second_[axis]; }

  /// 1/2 (D_j D_k + D_k D_j) in, by nested first differences.
  /// `scratch` must hold at least 2 * size() values.
  void mixed(int j, int k, std::span<const double> in, std::span<double> out,
             std::span<double> scratch) const;

  /// Number of (node, operator) pairs that fell back to a fitted stencil.
  std::size_t fitted_rows() const;

 private:
  std::vector<Stencil> first_;
  std::vector<Stencil> second_;
};

}  // namespace toricflow
