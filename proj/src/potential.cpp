#include "toricflow/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "toricflow/error.hpp"
#include "toricflow/kernels/kernels.hpp"
#include "toricflow/parallel.hpp"

namespace toricflow {

HessianField::HessianField(std::shared_ptr<const Grid> grid)
    : grid_(std::move(grid)), dim_(grid_->dim()), size_(grid_->size()) {
  entries_.assign(static_cast<std::size_t>(dim_) * (dim_ + 1) / 2,
                  std::vector<double>(size_, 0.0));
}

std::size_t HessianField::slot(int j, int k) const {
  if (j > k) std::swap(j, k);
  // Row-major upper triangle.
  return static_cast<std::size_t>(j * dim_ - j * (j - 1) / 2 + (k - j));
}

Eigen::MatrixXd HessianField::at(std::size_t node) const {
  Eigen::MatrixXd m(dim_, dim_);
  for (int j = 0; j < dim_; ++j)
    for (int k = j; k < dim_; ++k) m(j, k) = m(k, j) = entries_[slot(j, k)][node];
  return m;
}

GuilleminEval guillemin_eval(const DelzantPolytope& polytope, std::span<const double> x) {
  const int d = polytope.dim();
  if (static_cast<int>(x.size()) != d) throw InvalidInput("point dimension mismatch");
  GuilleminEval out;
  out.hessian = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t k = 0; k < polytope.facets().size(); ++k) {
    const Facet& f = polytope.facets()[k];
    const double l = f.eval(x);
    if (!(l > 0.0)) {
      std::ostringstream os;
      os.precision(17);
      os << "facet " << k << " has l = " << l << " <= 0 at x = (";
      for (int i = 0; i < d; ++i) os << (i ? ", " : "") << x[i];
      os << "); the Guillemin potential is only defined in the open polytope";
      throw DomainError(os.str());
    }
    out.value += 0.5 * l * std::log(l);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) out.hessian(i, j) += 0.5 * f.normal[i] * f.normal[j] / l;
  }
  return out;
}

Domain::Domain(DelzantPolytope polytope, int n)
    : polytope_(std::move(polytope)),
      n_(n),
      grid_(std::make_shared<const Grid>(build_grid(polytope_, n))) {
  moments_ = toricflow::moments(polytope_, *grid_);
  const std::size_t size = grid_->size();
  const int d = grid_->dim();
  guillemin_values_.resize(size);
  guillemin_hessian_ = std::make_unique<HessianField>(grid_);
  for (std::size_t i = 0; i < size; ++i) {
    const GuilleminEval g = guillemin_eval(polytope_, grid_->point(i));
    guillemin_values_[i] = g.value;
    for (int j = 0; j < d; ++j)
      for (int k = j; k < d; ++k) guillemin_hessian_->component(j, k)[i] = g.hessian(j, k);
  }

  if (const ProductSplit* split = polytope_.product_split()) {
    auto first = create(*split->first, n);
    auto second = create(*split->second, n);
    const Grid& g1 = first->grid();
    const Grid& g2 = second->grid();
    bool tensor = g1.size() * g2.size() == size;
    const int d1 = g1.dim();
    for (std::size_t i = 0; tensor && i < size; ++i) {
      const std::size_t a = i / g2.size();
      const std::size_t b = i % g2.size();
      for (int axis = 0; axis < d1; ++axis)
        tensor = tensor && grid_->coords(axis)[i] == g1.coords(axis)[a];
      for (int axis = 0; axis < g2.dim(); ++axis)
        tensor = tensor && grid_->coords(d1 + axis)[i] == g2.coords(axis)[b];
    }
    if (tensor) {
      first_ = std::move(first);
      second_ = std::move(second);
    }
  }
}

std::shared_ptr<const Domain> Domain::create(DelzantPolytope polytope, int n) {
  return std::shared_ptr<const Domain>(new Domain(std::move(polytope), n));
}

const DifferenceOperators& Domain::operators() const {
  std::call_once(operators_once_,
                 [this] { operators_ = std::make_unique<DifferenceOperators>(*grid_); });
  return *operators_;
}

bool Domain::compatible(const Domain& other) const {
  return this == &other ||
         (n_ == other.n_ && polytope_.same_shape(other.polytope_) &&
          grid_->same_layout(*other.grid_));
}

SymplecticPotential::SymplecticPotential(std::shared_ptr<const Domain> domain,
                                         std::vector<double> correction)
    : domain_(std::move(domain)), correction_(std::move(correction)) {
  if (correction_.size() != domain_->size())
    throw InvalidInput("smooth part has " + std::to_string(correction_.size()) +
                       " values but the grid has " + std::to_string(domain_->size()) + " nodes");
  for (double v : correction_)
    if (!std::isfinite(v)) throw InvalidInput("smooth part has a non-finite value");
}

SymplecticPotential SymplecticPotential::guillemin(std::shared_ptr<const Domain> domain) {
  const std::size_t n = domain->size();
  return SymplecticPotential(std::move(domain), std::vector<double>(n, 0.0));
}

SmoothPart SymplecticPotential::smooth_part() const {
  const auto n = domain_->grid().n_per_axis();
  return SmoothPart{std::vector<int>(n.begin(), n.end()), correction_};
}

double SymplecticPotential::value(std::size_t node) const {
  return domain_->guillemin_values()[node] + correction_[node];
}

std::vector<double> sample(const Grid& grid,
                           const std::function<double(std::span<const double>)>& fn) {
  std::vector<double> out(grid.size());
  std::vector<double> x(grid.dim());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (int a = 0; a < grid.dim(); ++a) x[a] = grid.coords(a)[i];
    out[i] = fn(x);
  }
  return out;
}

SymplecticPotential make_product_potential(const SymplecticPotential& u1,
                                           const SymplecticPotential& u2, const SmoothPart& f) {
  const int n = u1.domain().n();
  if (u2.domain().n() != n) throw InvalidInput("factor potentials use different grid sizes");
  const int dim = u1.domain().grid().dim() + u2.domain().grid().dim();
  if (static_cast<int>(f.n_per_axis.size()) != dim ||
      std::any_of(f.n_per_axis.begin(), f.n_per_axis.end(), [n](int m) { return m != n; }))
    throw InvalidInput("smooth part was sampled on a different grid than the product grid");
  auto domain = Domain::create(build_product(u1.domain().polytope(), u2.domain().polytope()), n);
  if (!domain->is_tensor_product())
    throw Unsupported("product grid is not the tensor grid of the factor grids");
  if (f.values.size() != domain->size())
    throw InvalidInput("smooth part size does not match the product grid");
  const std::size_t n2 = u2.domain().size();
  std::vector<double> correction(domain->size());
  for (std::size_t i = 0; i < correction.size(); ++i)
    correction[i] = u1.correction()[i / n2] + u2.correction()[i % n2] + f.values[i];
  return SymplecticPotential(std::move(domain), std::move(correction));
}

void add_difference_hessian(const DifferenceOperators& ops, std::span<const double> correction,
                            HessianField& out, std::span<double> scratch) {
  const int d = out.dim();
  const std::size_t n = out.size();
  auto buffer = scratch.subspan(0, n);
  auto mixed_scratch = scratch.subspan(n, 2 * n);
  for (int j = 0; j < d; ++j) {
    ops.second(j).apply(correction, buffer);
    auto hjj = out.component(j, j);
    for (std::size_t i = 0; i < n; ++i) hjj[i] += buffer[i];
    for (int k = j + 1; k < d; ++k) {
      ops.mixed(j, k, correction, buffer, mixed_scratch);
      auto hjk = out.component(j, k);
      for (std::size_t i = 0; i < n; ++i) hjk[i] += buffer[i];
    }
  }
}

HessianField hessian_field(const SymplecticPotential& u) {
  const Domain& domain = u.domain();
  HessianField h = domain.guillemin_hessian();
  std::vector<double> scratch(3 * domain.size());
  add_difference_hessian(domain.operators(), u.correction(), h, scratch);
  return h;
}

namespace {

// Positive definiteness of m - shift I by LDL^T without pivoting.
bool positive_definite(const Eigen::MatrixXd& m, double shift) {
  const Eigen::Index d = m.rows();
  Eigen::MatrixXd a = m - shift * Eigen::MatrixXd::Identity(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const double pivot = a(k, k);
    if (!(pivot > 0.0)) return false;
    for (Eigen::Index i = k + 1; i < d; ++i) {
      const double factor = a(i, k) / pivot;
      for (Eigen::Index j = k + 1; j <= i; ++j) a(i, j) -= factor * a(j, k);
    }
  }
  return true;
}

double min_eigenvalue_3(const Eigen::MatrixXd& m) {
  const double p1 = m(0, 1) * m(0, 1) + m(0, 2) * m(0, 2) + m(1, 2) * m(1, 2);
  if (p1 == 0.0) return std::min({m(0, 0), m(1, 1), m(2, 2)});
  const double q = m.trace() / 3.0;
  const double p2 = (m(0, 0) - q) * (m(0, 0) - q) + (m(1, 1) - q) * (m(1, 1) - q) +
                    (m(2, 2) - q) * (m(2, 2) - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  const Eigen::Matrix3d b = (m - q * Eigen::MatrixXd::Identity(3, 3)) / p;
  const double r = std::clamp(b.determinant() / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double largest = q + 2.0 * p * std::cos(phi);
  const double smallest = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  const double middle = 3.0 * q - largest - smallest;
  // det / (largest * middle) is the accurate route when the matrix is positive.
  if (largest > 0.0 && middle > 0.0 && smallest > 0.0) return m.determinant() / (largest * middle);
  return smallest;
}

}  // namespace

double min_eigenvalue(const Eigen::MatrixXd& h) {
  const Eigen::Index d = h.rows();
  switch (d) {
    case 1:
      return h(0, 0);
    case 2: {
      double u[3], e;
      kernels::scalar_table().sym2_inverse(1, &h(0, 0), &h(0, 1), &h(1, 1), &u[0], &u[1], &u[2],
                                           &e);
      return e;
    }
    case 3:
      return min_eigenvalue_3(h);
    default:
      break;
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < d; ++i) {
    double radius = 0.0;
    for (Eigen::Index j = 0; j < d; ++j)
      if (j != i) radius += std::abs(h(i, j));
    lo = std::min(lo, h(i, i) - radius);
    hi = std::min(hi, h(i, i));
  }
  const double scale = std::max(std::abs(lo), std::abs(hi)) + 1e-300;
  for (int iter = 0; iter < 200 && hi - lo > 1e-15 * scale; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (positive_definite(h, mid)) lo = mid;
    else hi = mid;
  }
  return lo;
}

PositivityReport positivity_report(const HessianField& hessian) {
  const std::size_t n = hessian.size();
  std::vector<double> eig(n);
  if (hessian.dim() == 1) {
    auto c = hessian.component(0, 0);
    std::copy(c.begin(), c.end(), eig.begin());
  } else if (hessian.dim() == 2) {
    std::vector<double> u(3 * n);
    kernels::active().sym2_inverse(n, hessian.component(0, 0).data(),
                                   hessian.component(0, 1).data(),
                                   hessian.component(1, 1).data(), u.data(), u.data() + n,
                                   u.data() + 2 * n, eig.data());
  } else {
    parallel_for(n, 512, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) eig[i] = min_eigenvalue(hessian.at(i));
    });
  }
  PositivityReport report;
  report.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    // NaN counts as the worst possible value.
    if (!(eig[i] >= report.min_eigenvalue)) {
      report.min_eigenvalue = eig[i];
      report.worst_index = i;
      if (std::isnan(eig[i])) break;
    }
  }
  report.is_positive = report.min_eigenvalue > 0.0;
  report.worst_node = hessian.grid().point(report.worst_index);
  return report;
}

}  // namespace toricflow
