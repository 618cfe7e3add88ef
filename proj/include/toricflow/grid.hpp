#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "toricflow/polytope.hpp"

namespace toricflow {

/// Cell-centred lattice over a polytope's bounding box, restricted to the
/// centres strictly inside the polytope. Nodes are stored in lexicographic
/// order of their lattice index with the last axis varying fastest.
class Grid {
 public:
  int dim() const { return static_cast<int>(n_per_axis_.size()); }
  std::size_t size() const { return weights_.size(); }
  std::span<const int> n_per_axis() const { return n_per_axis_; }
  std::span<const double> spacing() const { return spacing_; }
  double min_spacing() const;

  /// Coordinate `axis` of every node.
  std::span<const double> coords(int axis) const { return coords_[axis]; }
  std::vector<double> point(std::size_t node) const;
  std::span<const double> weights() const { return weights_; }

  /// Lattice coordinate of a node along an axis.
  int lattice(std::size_t node, int axis) const { return lattice_[axis][node]; }
  /// Node at the given lattice coordinates, or -1 when that cell centre was
  /// dropped or lies outside the lattice.
  std::int64_t node_at(std::span<const int> lattice) const;
  /// Node reached from `node` by moving `steps` cells along `axis`, or -1.
  std::int64_t neighbor(std::size_t node, int axis, int steps) const;

  bool same_layout(const Grid& other) const;

 private:
  friend Grid build_grid(const DelzantPolytope&, int);

  std::vector<int> n_per_axis_;
  std::vector<double> spacing_;
  std::vector<std::vector<double>> coords_;
  std::vector<std::vector<int>> lattice_;
  std::vector<double> weights_;
  std::vector<std::int64_t> lattice_to_node_;
};

/// n cells per axis over the bounding box; keeps the centres with every
/// l_k > 0. Throws InvalidInput for n < 2 and NumericalError when no centre
/// survives.
Grid build_grid(const DelzantPolytope& polytope, int n);

/// Midpoint rule: sum of w_i * field_i.
double integrate(const Grid& grid, std::span<const double> field);

/// Quadrature moments: volume, first moments int x_i, second moments
/// int x_i x_j (row-major d x d).
struct Moments {
  double volume = 0.0;
  std::vector<double> first;
  std::vector<double> second;

  double second_at(int i, int j) const { return second[i * first.size() + j]; }
};

Moments moments(const DelzantPolytope& polytope, const Grid& grid);

}  // namespace toricflow
