#pragma once

#include <span>
#include <vector>

#include "toricflow/potential.hpp"

namespace toricflow {

/// Separable correction g1(x) + g2(y): g1 on the first factor's grid, g2 on
/// the second's.
struct SeparablePart {
  std::vector<double> g1;
  std::vector<double> g2;
};

/// Which factor of P1 x P2 a fiber average lives on.
enum class Block { kFirst = 1, kSecond = 2 };

/// Average of f over the fibres of the other factor, normalized by that
/// factor's quadrature volume: block 1 gives x -> avg_y f(x, y).
/// Throws InvalidInput without a product split and Unsupported on a
/// non-tensor grid.
std::vector<double> fiber_average(const Domain& domain, std::span<const double> f, Block block);

/// g1(x) + g2(y) at every node of the product grid.
std::vector<double> lift(const Domain& domain, const SeparablePart& parts);

/// Separable parts of f: the fibre averages with the mean of f split evenly
/// between them, g1 = f1 - mean/2 and g2 = f2 - mean/2. Their lift is the
/// discrete L2 projection of f onto separable functions.
SeparablePart separable_parts(const Domain& domain, std::span<const double> f);

struct SeparableProjection {
  SymplecticPotential v;
  SeparablePart parts;
};

/// v = u_G + g1 + g2 for the separable parts of u's correction.
SeparableProjection project_separable(const SymplecticPotential& u);

/// Integral of (f_u - f_w)^2; the Guillemin parts must agree and cancel.
double l2_distance(const SymplecticPotential& u, const SymplecticPotential& w);

/// Integral of (f - lift(separable_parts(f)))^2; zero iff f is separable.
double separability_defect(const Domain& domain, std::span<const double> f);

struct MembershipReport {
  bool is_member = false;
  double separability_residual = 0.0;
  double integral_gap_1 = 0.0;
  double integral_gap_2 = 0.0;
};

/// Membership of w in the class of separable potentials whose parts have
/// the same factor integrals as `reference`. Parts are read off w's
/// correction with separable_parts().
MembershipReport in_M(const SymplecticPotential& w, const SeparablePart& reference);

/// Same check for explicitly given parts (g1, g2) on `domain`; a lift has
/// zero separability residual, so only the integral constraints can fail.
/// Use this when a constant moved between g1 and g2 matters.
MembershipReport in_M(const Domain& domain, const SeparablePart& parts,
                      const SeparablePart& reference);

/// Absolute tolerances used by in_M, exposed for reports.
double membership_defect_tolerance(std::span<const double> f, const Grid& grid);
double membership_integral_tolerance(double reference_integral);

}  // namespace toricflow
