#pragma once

#include <memory>
#include <span>
#include <vector>

#include "toricflow/grid.hpp"
#include "toricflow/potential.hpp"

namespace toricflow {

/// Node values of a scalar function on a grid (scalar curvature, residuals).
using ScalarField = std::vector<double>;

/// theta(x) = constant + sum_i linear[i] * x_i, evaluated exactly.
struct AffineFunction {
  double constant = 0.0;
  std::vector<double> linear;

  double operator()(std::span<const double> x) const;
  ScalarField sample(const Grid& grid) const;
};

/// Scalar curvature of the toric metric, S = -sum_{j,k} d^2 U^{jk} / dx_j dx_k with
/// U = (D^2 u)^{-1}, differentiated with the grid's difference operators.
/// Throws NumericalError naming the node when a Hessian is singular.
ScalarField scalar_curvature(const SymplecticPotential& u);

/// Discrete L2 projection of s onto affine functions (normal equations built
/// from the grid moments). Throws NumericalError if the normal matrix is
/// singular.
AffineFunction project_affine(std::span<const double> s, const Grid& grid, const Moments& m);

/// Integral of (S - theta)^2 with theta = project_affine(S).
double calabi_energy(const SymplecticPotential& u);

/// Workspace for evaluating many corrections on one domain without
/// reallocating: Hessian, positivity margin, curvature, extremal affine
/// function, residual and Calabi energy.
class CurvatureEvaluator {
 public:
  explicit CurvatureEvaluator(std::shared_ptr<const Domain> domain);

  const Domain& domain() const { return *domain_; }

  /// Assembles the Hessian of u_G + f and its smallest eigenvalue per node.
  /// Returns the global minimum; `worst` receives its node.
  double hessian(std::span<const double> f, std::size_t* worst = nullptr);

  /// Curvature of the Hessian assembled by the last hessian() call, then
  /// theta, the residual S - theta and the energy.
  void curvature();

  const HessianField& hessian_field() const { return hess_; }
  std::span<const double> scalar() const { return scalar_; }
  std::span<const double> residual() const { return residual_; }
  const AffineFunction& theta() const { return theta_; }
  double energy() const { return energy_; }

 private:
  void invert();

  std::shared_ptr<const Domain> domain_;
  HessianField hess_;
  HessianField inverse_;
  std::vector<double> min_eig_;
  std::vector<double> scratch_;
  std::vector<double> buffer_;
  std::vector<double> scalar_;
  std::vector<double> residual_;
  AffineFunction theta_;
  double energy_ = 0.0;
};

}  // namespace toricflow
