#include "toricflow/grid.hpp"

#include <algorithm>
#include <string>

#include "toricflow/error.hpp"
#include "toricflow/kernels/kernels.hpp"

namespace toricflow {

double Grid::min_spacing() const { return *std::min_element(spacing_.begin(), spacing_.end()); }

std::vector<double> Grid::point(std::size_t node) const {
  std::vector<double> x(dim());
  for (int a = 0; a < dim(); ++a) x[a] = coords_[a][node];
  return x;
}

std::int64_t Grid::node_at(std::span<const int> lattice) const {
  std::int64_t flat = 0;
  for (int a = 0; a < dim(); ++a) {
    if (lattice[a] < 0 || lattice[a] >= n_per_axis_[a]) return -1;
    flat = flat * n_per_axis_[a] + lattice[a];
  }
  return lattice_to_node_[static_cast<std::size_t>(flat)];
}

std::int64_t Grid::neighbor(std::size_t node, int axis, int steps) const {
  int cell[16];
  for (int a = 0; a < dim(); ++a) cell[a] = lattice_[a][node];
  cell[axis] += steps;
  return node_at(std::span<const int>(cell, dim()));
}

bool Grid::same_layout(const Grid& other) const {
  return n_per_axis_ == other.n_per_axis_ && spacing_ == other.spacing_ &&
         size() == other.size() && coords_ == other.coords_;
}

Grid build_grid(const DelzantPolytope& polytope, int n) {
  if (n < 2) throw InvalidInput("grid needs n >= 2 cells per axis, got " + std::to_string(n));
  const int dim = polytope.dim();
  if (dim > 16) throw Unsupported("grids are limited to 16 dimensions");
  const BoundingBox& box = polytope.bounding_box();

  Grid g;
  g.n_per_axis_.assign(dim, n);
  g.spacing_.resize(dim);
  for (int a = 0; a < dim; ++a) g.spacing_[a] = (box.upper[a] - box.lower[a]) / n;
  g.coords_.assign(dim, {});
  g.lattice_.assign(dim, {});

  std::size_t total = 1;
  for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(n);
  g.lattice_to_node_.assign(total, -1);

  double cell_volume = 1.0;
  for (double h : g.spacing_) cell_volume *= h;
  const double margin = 1e-9 * g.min_spacing();

  std::vector<int> cell(dim, 0);
  std::vector<double> x(dim);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    for (int a = dim - 1; a >= 0; --a) {
      cell[a] = static_cast<int>(rest % n);
      rest /= n;
    }
    for (int a = 0; a < dim; ++a) {
      const double extent = box.upper[a] - box.lower[a];
      x[a] = box.lower[a] + extent * (2.0 * cell[a] + 1.0) / (2.0 * n);
    }
    bool inside = true;
    for (const Facet& f : polytope.facets()) {
      if (!(f.eval(x) > margin)) {
        inside = false;
        break;
      }
    }
    if (!inside) continue;
    g.lattice_to_node_[flat] = static_cast<std::int64_t>(g.weights_.size());
    for (int a = 0; a < dim; ++a) {
      g.coords_[a].push_back(x[a]);
      g.lattice_[a].push_back(cell[a]);
    }
    g.weights_.push_back(cell_volume);
  }
  if (g.weights_.empty())
    throw NumericalError("no cell centre of the " + std::to_string(n) +
                         "-per-axis grid lies strictly inside the polytope");
  return g;
}

double integrate(const Grid& grid, std::span<const double> field) {
  if (field.size() != grid.size())
    throw InvalidInput("field has " + std::to_string(field.size()) + " values but the grid has " +
                       std::to_string(grid.size()) + " nodes");
  return kernels::weighted_sum(grid.weights(), field);
}

Moments moments(const DelzantPolytope& polytope, const Grid& grid) {
  if (polytope.dim() != grid.dim()) throw InvalidInput("grid was not built on this polytope");
  const int d = grid.dim();
  const std::vector<double> ones(grid.size(), 1.0);
  Moments m;
  m.volume = integrate(grid, ones);
  m.first.resize(d);
  m.second.resize(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d; ++i) {
    m.first[i] = integrate(grid, grid.coords(i));
    for (int j = i; j < d; ++j) {
      const double v = kernels::weighted_dot(grid.weights(), grid.coords(i), grid.coords(j));
      m.second[i * d + j] = v;
      m.second[j * d + i] = v;
    }
  }
  return m;
}

}  // namespace toricflow
