#include "toricflow/separable.hpp"

#include <cmath>
#include <string>

#include "toricflow/error.hpp"
#include "toricflow/kernels/kernels.hpp"

namespace toricflow {

namespace {

struct Factors {
  const Domain& first;
  const Domain& second;
};

Factors factors_of(const Domain& domain) {
  if (!domain.polytope().is_product())
    throw Unsupported("separable operations need a product polytope");
  if (!domain.is_tensor_product())
    throw Unsupported("product grid is not the tensor grid of its factor grids");
  return {*domain.first_factor(), *domain.second_factor()};
}

void check_size(const Domain& domain, std::span<const double> f) {
  if (f.size() != domain.size())
    throw InvalidInput("field has " + std::to_string(f.size()) + " values but the grid has " +
                       std::to_string(domain.size()) + " nodes");
}

}  // namespace

std::vector<double> fiber_average(const Domain& domain, std::span<const double> f, Block block) {
  const Factors fac = factors_of(domain);
  check_size(domain, f);
  const std::size_t n1 = fac.first.size();
  const std::size_t n2 = fac.second.size();
  auto w1 = fac.first.grid().weights();
  auto w2 = fac.second.grid().weights();
  if (block == Block::kFirst) {
    // Rows of the tensor layout are contiguous fibres over the second factor.
    std::vector<double> out(n1);
    const double vol2 = fac.second.moments().volume;
    for (std::size_t a = 0; a < n1; ++a) out[a] = kernels::weighted_sum(w2, f.subspan(a * n2, n2)) / vol2;
    return out;
  }
  const double vol1 = fac.first.moments().volume;
  std::vector<double> column(n1);
  std::vector<double> out(n2);
  for (std::size_t b = 0; b < n2; ++b) {
    for (std::size_t a = 0; a < n1; ++a) column[a] = f[a * n2 + b];
    out[b] = kernels::weighted_sum(w1, column) / vol1;
  }
  return out;
}

std::vector<double> lift(const Domain& domain, const SeparablePart& parts) {
  const Factors fac = factors_of(domain);
  const std::size_t n2 = fac.second.size();
  if (parts.g1.size() != fac.first.size() || parts.g2.size() != n2)
    throw InvalidInput("separable parts do not match the factor grids");
  std::vector<double> out(domain.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = parts.g1[i / n2] + parts.g2[i % n2];
  return out;
}

SeparablePart separable_parts(const Domain& domain, std::span<const double> f) {
  SeparablePart parts{fiber_average(domain, f, Block::kFirst),
                      fiber_average(domain, f, Block::kSecond)};
  const double half_mean = 0.5 * integrate(domain.grid(), f) / domain.moments().volume;
  for (double& v : parts.g1) v -= half_mean;
  for (double& v : parts.g2) v -= half_mean;
  return parts;
}

SeparableProjection project_separable(const SymplecticPotential& u) {
  SeparablePart parts = separable_parts(u.domain(), u.correction());
  SymplecticPotential v(u.domain_ptr(), lift(u.domain(), parts));
  return {std::move(v), std::move(parts)};
}

double l2_distance(const SymplecticPotential& u, const SymplecticPotential& w) {
  if (!u.domain().compatible(w.domain()))
    throw InvalidInput("l2_distance: potentials live on different polytopes or grids");
  std::vector<double> diff(u.domain().size());
  kernels::subtract(u.correction(), w.correction(), diff);
  return kernels::weighted_dot(u.domain().grid().weights(), diff, diff);
}

double separability_defect(const Domain& domain, std::span<const double> f) {
  const std::vector<double> projected = lift(domain, separable_parts(domain, f));
  std::vector<double> diff(domain.size());
  kernels::subtract(f, projected, diff);
  return kernels::weighted_dot(domain.grid().weights(), diff, diff);
}

double membership_defect_tolerance(std::span<const double> f, const Grid& grid) {
  return 1e-10 * (1.0 + kernels::weighted_dot(grid.weights(), f, f));
}

double membership_integral_tolerance(double reference_integral) {
  return 1e-10 * (1.0 + std::abs(reference_integral));
}

namespace {

MembershipReport check_membership(const Domain& domain, std::span<const double> correction,
                                  const SeparablePart& parts, const SeparablePart& reference) {
  const Factors fac = factors_of(domain);
  if (reference.g1.size() != fac.first.size() || reference.g2.size() != fac.second.size())
    throw InvalidInput("reference parts do not match the factor grids");
  MembershipReport report;
  report.separability_residual = separability_defect(domain, correction);
  const double ref1 = integrate(fac.first.grid(), reference.g1);
  const double ref2 = integrate(fac.second.grid(), reference.g2);
  report.integral_gap_1 = std::abs(integrate(fac.first.grid(), parts.g1) - ref1);
  report.integral_gap_2 = std::abs(integrate(fac.second.grid(), parts.g2) - ref2);
  report.is_member =
      report.separability_residual <= membership_defect_tolerance(correction, domain.grid()) &&
      report.integral_gap_1 <= membership_integral_tolerance(ref1) &&
      report.integral_gap_2 <= membership_integral_tolerance(ref2);
  return report;
}

}  // namespace

MembershipReport in_M(const SymplecticPotential& w, const SeparablePart& reference) {
  const SeparablePart parts = separable_parts(w.domain(), w.correction());
  return check_membership(w.domain(), w.correction(), parts, reference);
}

MembershipReport in_M(const Domain& domain, const SeparablePart& parts,
                      const SeparablePart& reference) {
  const std::vector<double> lifted = lift(domain, parts);
  return check_membership(domain, lifted, parts, reference);
}

}  // namespace toricflow
