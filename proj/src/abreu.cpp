#include "toricflow/abreu.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>
#include <string>

#include "toricflow/error.hpp"
#include "toricflow/kernels/kernels.hpp"
#include "toricflow/parallel.hpp"

namespace toricflow {

double AffineFunction::operator()(std::span<const double> x) const {
  double v = constant;
  for (std::size_t i = 0; i < linear.size(); ++i) v += linear[i] * x[i];
  return v;
}

ScalarField AffineFunction::sample(const Grid& grid) const {
  ScalarField out(grid.size(), constant);
  for (int a = 0; a < grid.dim(); ++a) kernels::axpy(linear[a], grid.coords(a), out);
  return out;
}

AffineFunction project_affine(std::span<const double> s, const Grid& grid, const Moments& m) {
  const int d = grid.dim();
  if (s.size() != grid.size()) throw InvalidInput("scalar field size does not match the grid");
  if (static_cast<int>(m.first.size()) != d) throw InvalidInput("moments belong to another grid");
  Eigen::MatrixXd normal(d + 1, d + 1);
  Eigen::VectorXd rhs(d + 1);
  normal(0, 0) = m.volume;
  rhs(0) = integrate(grid, s);
  for (int i = 0; i < d; ++i) {
    normal(0, i + 1) = normal(i + 1, 0) = m.first[i];
    rhs(i + 1) = kernels::weighted_dot(grid.weights(), s, grid.coords(i));
    for (int j = 0; j < d; ++j) normal(i + 1, j + 1) = m.second_at(i, j);
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(normal);
  if (lu.rank() < d + 1)
    throw NumericalError("affine projection: normal matrix is singular (degenerate grid with " +
                         std::to_string(grid.size()) + " nodes)");
  Eigen::VectorXd c = lu.solve(rhs);
  c += lu.solve(rhs - normal * c);
  AffineFunction theta;
  theta.constant = c(0);
  theta.linear.assign(c.data() + 1, c.data() + d + 1);
  return theta;
}

CurvatureEvaluator::CurvatureEvaluator(std::shared_ptr<const Domain> domain)
    : domain_(std::move(domain)),
      hess_(domain_->grid_ptr()),
      inverse_(domain_->grid_ptr()),
      min_eig_(domain_->size()),
      scratch_(3 * domain_->size()),
      buffer_(domain_->size()),
      scalar_(domain_->size()),
      residual_(domain_->size()) {}

double CurvatureEvaluator::hessian(std::span<const double> f, std::size_t* worst) {
  const int d = hess_.dim();
  const std::size_t n = hess_.size();
  const HessianField& g = domain_->guillemin_hessian();
  for (int j = 0; j < d; ++j)
    for (int k = j; k < d; ++k) {
      auto src = g.component(j, k);
      std::copy(src.begin(), src.end(), hess_.component(j, k).begin());
    }
  add_difference_hessian(domain_->operators(), f, hess_, scratch_);
  invert();
  double lowest = std::numeric_limits<double>::infinity();
  std::size_t at = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(min_eig_[i] >= lowest)) {
      lowest = min_eig_[i];
      at = i;
      if (std::isnan(lowest)) break;
    }
  }
  if (worst) *worst = at;
  return lowest;
}

void CurvatureEvaluator::invert() {
  const int d = hess_.dim();
  const std::size_t n = hess_.size();
  if (d == 1) {
    auto h = hess_.component(0, 0);
    auto u = inverse_.component(0, 0);
    for (std::size_t i = 0; i < n; ++i) {
      u[i] = 1.0 / h[i];
      min_eig_[i] = h[i];
    }
    return;
  }
  if (d == 2) {
    kernels::active().sym2_inverse(n, hess_.component(0, 0).data(), hess_.component(0, 1).data(),
                                   hess_.component(1, 1).data(), inverse_.component(0, 0).data(),
                                   inverse_.component(0, 1).data(),
                                   inverse_.component(1, 1).data(), min_eig_.data());
    return;
  }
  parallel_for(n, 512, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Eigen::MatrixXd h = hess_.at(i);
      min_eig_[i] = min_eigenvalue(h);
      const Eigen::MatrixXd u = h.inverse();
      for (int j = 0; j < d; ++j)
        for (int k = j; k < d; ++k) inverse_.component(j, k)[i] = u(j, k);
    }
  });
}

void CurvatureEvaluator::curvature() {
  const int d = hess_.dim();
  const std::size_t n = hess_.size();
  for (int j = 0; j < d; ++j)
    for (int k = j; k < d; ++k) {
      auto u = inverse_.component(j, k);
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(u[i])) {
          std::ostringstream os;
          os.precision(17);
          os << "singular Hessian at node " << i << " (x =";
          for (double c : domain_->grid().point(i)) os << ' ' << c;
          os << ")";
          throw NumericalError(os.str());
        }
      }
    }
  const DifferenceOperators& ops = domain_->operators();
  auto mixed_scratch = std::span<double>(scratch_).subspan(0, 2 * n);
  std::fill(scalar_.begin(), scalar_.end(), 0.0);
  for (int j = 0; j < d; ++j) {
    ops.second(j).apply(inverse_.component(j, j), buffer_);
    kernels::axpy(-1.0, buffer_, scalar_);
    for (int k = j + 1; k < d; ++k) {
      ops.mixed(j, k, inverse_.component(j, k), buffer_, mixed_scratch);
      kernels::axpy(-2.0, buffer_, scalar_);
    }
  }
  const Grid& grid = domain_->grid();
  theta_ = project_affine(scalar_, grid, domain_->moments());
  std::copy(scalar_.begin(), scalar_.end(), residual_.begin());
  for (double& r : residual_) r -= theta_.constant;
  for (int a = 0; a < d; ++a) kernels::axpy(-theta_.linear[a], grid.coords(a), residual_);
  energy_ = kernels::weighted_dot(grid.weights(), residual_, residual_);
}

ScalarField scalar_curvature(const SymplecticPotential& u) {
  CurvatureEvaluator eval(u.domain_ptr());
  eval.hessian(u.correction());
  eval.curvature();
  return ScalarField(eval.scalar().begin(), eval.scalar().end());
}

double calabi_energy(const SymplecticPotential& u) {
  CurvatureEvaluator eval(u.domain_ptr());
  eval.hessian(u.correction());
  eval.curvature();
  return eval.energy();
}

}  // namespace toricflow
