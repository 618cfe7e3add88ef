#include "toricflow/selftest.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <string>

#include "toricflow/kernels/kernels.hpp"
#include "toricflow/separable.hpp"

namespace toricflow {

namespace {

struct Check {
  std::ostream& out;
  bool all_ok = true;

  void report(const char* name, bool ok, const char* metric, double value) {
    char line[160];
    std::snprintf(line, sizeof line, "%s %s (%s %.3e)\n", ok ? "ok  " : "FAIL", name, metric, value);
    out << line;
    all_ok = all_ok && ok;
  }
};

double curvature_error(const CurvatureFn& curvature, const DelzantPolytope& p, double exact) {
  double worst = 0.0;
  for (int n : {8, 16, 32, 64}) {
    auto domain = Domain::create(p, n);
    const SymplecticPotential u(domain, std::vector<double>(domain->size(), 0.0));
    for (double s : curvature(u)) worst = std::max(worst, std::isfinite(s) ? std::abs(s - exact) : INFINITY);
  }
  return worst;
}

// Smooth nonseparable perturbation vanishing to first order on the boundary.
std::vector<double> random_perturbation(const Grid& grid, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  const double a = c(rng), b = c(rng), e = c(rng);
  return sample(grid, [&](std::span<const double> x) {
    const double bump = x[0] * (1 - x[0]) * x[1] * (1 - x[1]);
    return 0.02 * bump * (a + b * x[0] * x[1] + e * std::sin(3.0 * x[0] - 2.0 * x[1]));
  });
}

std::vector<double> random_factor_function(const Grid& grid, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  const double a = c(rng), b = c(rng), k = 1.0 + 3.0 * std::abs(c(rng));
  return sample(grid, [&](std::span<const double> x) { return a * x[0] * x[0] + b * std::cos(k * x[0]); });
}

}  // namespace

bool selftest(std::ostream& out, const CurvatureFn& curvature) {
  Check check{out};
  const DelzantPolytope interval = DelzantPolytope::interval(0.0, 1.0);
  const DelzantPolytope square = build_product(interval, interval);

  const double e_interval = curvature_error(curvature, interval, 4.0);
  check.report("scalar_curvature interval", e_interval <= 1e-9, "max |S - 4|", e_interval);
  const double e_simplex = curvature_error(curvature, DelzantPolytope::simplex(2), 12.0);
  check.report("scalar_curvature simplex2", e_simplex <= 1e-9, "max |S - 12|", e_simplex);
  const double e_square = curvature_error(curvature, square, 8.0);
  check.report("scalar_curvature square", e_square <= 1e-9, "max |S - 8|", e_square);

  std::mt19937_64 rng(20240611);
  const auto domain = Domain::create(square, 16);
  const Domain& factor = *domain->first_factor();

  double idem = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const SymplecticPotential u(domain, random_perturbation(domain->grid(), rng));
    const SeparableProjection once = project_separable(u);
    const SeparableProjection twice = project_separable(once.v);
    for (std::size_t i = 0; i < domain->size(); ++i)
      idem = std::max(idem, std::abs(twice.v.correction()[i] - once.v.correction()[i]));
  }
  check.report("project_separable idempotence", idem <= 1e-12, "max node change", idem);

  const SymplecticPotential u(domain, random_perturbation(domain->grid(), rng));
  const SeparableProjection proj = project_separable(u);
  const double d_uv = l2_distance(u, proj.v);
  const double i1 = integrate(factor.grid(), proj.parts.g1);
  const double i2 = integrate(factor.grid(), proj.parts.g2);
  const double vol = factor.moments().volume;
  double gap = -INFINITY, pythagoras = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    SeparablePart w{random_factor_function(factor.grid(), rng), random_factor_function(factor.grid(), rng)};
    const double s1 = (i1 - integrate(factor.grid(), w.g1)) / vol;
    const double s2 = (i2 - integrate(factor.grid(), w.g2)) / vol;
    for (double& g : w.g1) g += s1;
    for (double& g : w.g2) g += s2;
    const SymplecticPotential competitor(domain, lift(*domain, w));
    const double d_uw = l2_distance(u, competitor);
    const double d_vw = l2_distance(proj.v, competitor);
    gap = std::max(gap, d_uv - d_uw);
    pythagoras = std::max(pythagoras, std::abs(d_uw - d_uv - d_vw) / std::max(d_uw, 1e-300));
  }
  check.report("minimizer property", gap <= 1e-12, "max d(u,v) - d(u,w)", gap);
  check.report("pythagoras identity", pythagoras <= 1e-12, "max relative residual", pythagoras);

  if (const kernels::Table* simd = kernels::avx2_table()) {
    std::uniform_real_distribution<double> c(-1.0, 1.0);
    std::vector<double> a(1031), w(1031);
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = c(rng);
      w[i] = c(rng) + 1.5;
    }
    const double ref = kernels::weighted_dot(kernels::scalar_table(), w, a, a);
    const double got = kernels::weighted_dot(*simd, w, a, a);
    check.report("simd kernels bitwise", ref == got, "difference", std::abs(ref - got));
  } else {
    out << "skip simd kernels bitwise (no AVX2)\n";
  }
  return check.all_ok;
}

}  // namespace toricflow
