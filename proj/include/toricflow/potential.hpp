#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "toricflow/grid.hpp"
#include "toricflow/polytope.hpp"
#include "toricflow/stencil.hpp"

namespace toricflow {

class Domain;

/// Per-node symmetric d x d matrices, stored as one array per upper-triangle
/// entry.
class HessianField {
 public:
  HessianField() = default;
  explicit HessianField(std::shared_ptr<const Grid> grid);

  int dim() const { return dim_; }
  std::size_t size() const { return size_; }
  const Grid& grid() const { return *grid_; }

  std::span<double> component(int j, int k) { return entries_[slot(j, k)]; }
  std::span<const double> component(int j, int k) const { return entries_[slot(j, k)]; }
  Eigen::MatrixXd at(std::size_t node) const;

 private:
  std::size_t slot(int j, int k) const;

  std::shared_ptr<const Grid> grid_;
  int dim_ = 0;
  std::size_t size_ = 0;
  std::vector<std::vector<double>> entries_;
};

/// Polytope, grid and everything derived from them that potentials on the
/// pair share: difference operators, quadrature moments and the Guillemin
/// part sampled at the nodes. Immutable; the operators are built on first
/// use so that a too-coarse grid only fails where derivatives are needed.
class Domain {
 public:
  static std::shared_ptr<const Domain> create(DelzantPolytope polytope, int n);

  const DelzantPolytope& polytope() const { return polytope_; }
  const Grid& grid() const { return *grid_; }
  const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }
  int n() const { return n_; }
  std::size_t size() const { return grid_->size(); }
  const Moments& moments() const { return moments_; }
  const DifferenceOperators& operators() const;

  /// u_G at every node.
  std::span<const double> guillemin_values() const { return guillemin_values_; }
  /// Exact Guillemin Hessian at every node.
  const HessianField& guillemin_hessian() const { return *guillemin_hessian_; }

  /// Factor domains (same n) when the polytope is a product and the product
  /// grid is the tensor grid of the factor grids; nullptr otherwise.
  const Domain* first_factor() const { return first_.get(); }
  const Domain* second_factor() const { return second_.get(); }
  bool is_tensor_product() const { return first_ != nullptr; }

  /// Same polytope facets and same grid.
  bool compatible(const Domain& other) const;

 private:
  Domain(DelzantPolytope polytope, int n);

  DelzantPolytope polytope_;
  int n_;
  std::shared_ptr<const Grid> grid_;
  Moments moments_;
  std::vector<double> guillemin_values_;
  std::unique_ptr<HessianField> guillemin_hessian_;
  std::shared_ptr<const Domain> first_, second_;
  mutable std::once_flag operators_once_;
  mutable std::unique_ptr<DifferenceOperators> operators_;
};

/// Value and exact Hessian of u_G = 1/2 sum_k l_k log l_k at a point.
struct GuilleminEval {
  double value = 0.0;
  Eigen::MatrixXd hessian;
};

/// Throws DomainError when some l_k(x) <= 0.
GuilleminEval guillemin_eval(const DelzantPolytope& polytope, std::span<const double> x);

/// Node values of the smooth correction f with the grid size they belong to.
/// Values are in grid iteration order (lexicographic, last axis fastest).
struct SmoothPart {
  std::vector<int> n_per_axis;
  std::vector<double> values;
};

/// u = u_G + f: the Guillemin part is implied by the domain, f is stored at
/// the grid nodes.
class SymplecticPotential {
 public:
  SymplecticPotential(std::shared_ptr<const Domain> domain, std::vector<double> correction);

  static SymplecticPotential guillemin(std::shared_ptr<const Domain> domain);

  const Domain& domain() const { return *domain_; }
  const std::shared_ptr<const Domain>& domain_ptr() const { return domain_; }
  std::span<const double> correction() const { return correction_; }
  std::vector<double>& mutable_correction() { return correction_; }
  SmoothPart smooth_part() const;
  /// u at a node (Guillemin value plus correction).
  double value(std::size_t node) const;

 private:
  std::shared_ptr<const Domain> domain_;
  std::vector<double> correction_;
};

/// Samples fn at every node of a grid.
std::vector<double> sample(const Grid& grid, const std::function<double(std::span<const double>)>& fn);

/// Potential on P1 x P2 with correction (f_1-correction lifted) + (f_2-correction
/// lifted) + f. Both factor potentials must use the same n as f.
SymplecticPotential make_product_potential(const SymplecticPotential& u1,
                                           const SymplecticPotential& u2, const SmoothPart& f);

/// Exact Guillemin Hessian plus the finite-difference Hessian of f.
HessianField hessian_field(const SymplecticPotential& u);

/// Adds the difference Hessian of `correction` to `out` (which must already
/// hold the Guillemin Hessian). `scratch` holds at least 3 * nodes values.
void add_difference_hessian(const DifferenceOperators& ops, std::span<const double> correction,
                            HessianField& out, std::span<double> scratch);

struct PositivityReport {
  bool is_positive = false;
  double min_eigenvalue = 0.0;
  std::size_t worst_index = 0;
  std::vector<double> worst_node;
};

PositivityReport positivity_report(const HessianField& hessian);

/// Smallest eigenvalue of a symmetric matrix: closed form for d <= 3,
/// bisection on positive definiteness of H - lambda I otherwise.
double min_eigenvalue(const Eigen::MatrixXd& h);

}  // namespace toricflow
