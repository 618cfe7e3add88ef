#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "toricflow/error.hpp"
#include "toricflow/separable.hpp"

using namespace toricflow;

namespace {

std::shared_ptr<const Domain> square(int n) {
  return Domain::create(build_product(DelzantPolytope::interval(0, 1), DelzantPolytope::interval(0, 1)), n);
}

SymplecticPotential on(const std::shared_ptr<const Domain>& d, double (*fn)(double, double)) {
  return SymplecticPotential(d, sample(d->grid(), [fn](std::span<const double> x) { return fn(x[0], x[1]); }));
}

}  // namespace

TEST_CASE("fiber averages") {
  auto d = square(16);
  const auto xy = sample(d->grid(), [](std::span<const double> x) { return x[0] * x[1]; });
  const auto f1 = fiber_average(*d, xy, Block::kFirst);
  const auto& xs = d->first_factor()->grid().coords(0);
  REQUIRE(f1.size() == 16);
  for (std::size_t i = 0; i < f1.size(); ++i) CHECK(f1[i] == doctest::Approx(xs[i] / 2).epsilon(1e-15));

  const std::vector<double> c(d->size(), 2.5);
  for (double v : fiber_average(*d, c, Block::kSecond)) CHECK(v == doctest::Approx(2.5).epsilon(1e-15));

  const auto gx = sample(d->grid(), [](std::span<const double> x) { return std::sin(x[0]); });
  const auto a1 = fiber_average(*d, gx, Block::kFirst);
  const auto a2 = fiber_average(*d, gx, Block::kSecond);
  for (std::size_t i = 0; i < 16; ++i) CHECK(a1[i] == doctest::Approx(std::sin(xs[i])).epsilon(1e-15));
  const double mean = integrate(d->first_factor()->grid(), a1);
  for (double v : a2) CHECK(v == doctest::Approx(mean).epsilon(1e-14));
}

TEST_CASE("non-product domains are unsupported") {
  auto d = Domain::create(DelzantPolytope::simplex(2), 8);
  const std::vector<double> f(d->size(), 0.0);
  CHECK_THROWS_AS(fiber_average(*d, f, Block::kFirst), Unsupported);
  CHECK_THROWS_AS(separability_defect(*d, f), Unsupported);
}

TEST_CASE("projection of delta * xy") {
  auto d = square(16);
  const double delta = 0.03;
  const SymplecticPotential u(d, sample(d->grid(), [&](std::span<const double> x) { return delta * x[0] * x[1]; }));
  const SeparableProjection p = project_separable(u);
  for (std::size_t i = 0; i < d->size(); ++i) {
    const double x = d->grid().coords(0)[i], y = d->grid().coords(1)[i];
    CHECK(p.v.correction()[i] == doctest::Approx(delta * (x / 2 + y / 2 - 0.25)).epsilon(1e-14));
  }
  CHECK(positivity_report(hessian_field(p.v)).is_positive);
}

TEST_CASE("distances and defects against the quadrature oracle") {
  auto d = square(128);
  const SymplecticPotential zero(d, std::vector<double>(d->size(), 0.0));
  const auto xy = on(d, [](double x, double y) { return x * y; });
  CHECK(l2_distance(xy, xy) == 0.0);
  CHECK(l2_distance(xy, zero) == doctest::Approx(1.0 / 9.0).epsilon(1e-4));
  const auto centred = on(d, [](double x, double y) { return x * y - x / 2 - y / 2; });
  CHECK(l2_distance(centred, zero) == doctest::Approx(5.0 / 72.0).epsilon(1e-4));
  // Distance to the separable subspace: int (x - 1/2)^2 (y - 1/2)^2 = 1/144.
  CHECK(separability_defect(*d, xy.correction()) == doctest::Approx(1.0 / 144.0).epsilon(1e-4));
  CHECK(separability_defect(*d, centred.correction()) ==
        doctest::Approx(separability_defect(*d, xy.correction())).epsilon(1e-12));

  const auto sep = on(d, [](double x, double y) { return std::cos(3 * x) + y * y * y; });
  double norm = 0.0;
  for (double v : sep.correction()) norm += v * v;
  CHECK(separability_defect(*d, sep.correction()) <= 1e-12 * norm / d->size());
}

TEST_CASE("idempotence, minimizer and Pythagoras") {
  auto d = square(12);
  const auto u = on(d, [](double x, double y) {
    return 0.02 * x * (1 - x) * y * (1 - y) * (1 + std::exp(x - 2 * y));
  });
  const SeparableProjection p = project_separable(u);
  const SeparableProjection q = project_separable(p.v);
  for (std::size_t i = 0; i < d->size(); ++i) CHECK(std::abs(q.v.correction()[i] - p.v.correction()[i]) <= 1e-12);

  const Grid& g1 = d->first_factor()->grid();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> c(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = c(rng), b = c(rng);
    SeparablePart w{sample(g1, [&](std::span<const double> x) { return a * x[0] * x[0]; }),
                    sample(g1, [&](std::span<const double> x) { return b * std::sin(2 * x[0]); })};
    const double s1 = integrate(g1, p.parts.g1) - integrate(g1, w.g1);
    const double s2 = integrate(g1, p.parts.g2) - integrate(g1, w.g2);
    for (double& v : w.g1) v += s1;
    for (double& v : w.g2) v += s2;
    CHECK(in_M(*d, w, p.parts).is_member);
    const SymplecticPotential comp(d, lift(*d, w));
    const double duv = l2_distance(u, p.v), duw = l2_distance(u, comp), dvw = l2_distance(p.v, comp);
    CHECK(duv <= duw + 1e-12);
    CHECK(std::abs(duw - duv - dvw) <= 1e-12 * duw);
  }
}

TEST_CASE("membership") {
  auto d = square(10);
  const auto u = on(d, [](double x, double y) { return 0.01 * x * (1 - x) * y * (1 - y) * (1 + x + y); });
  const SeparableProjection p = project_separable(u);
  CHECK(in_M(p.v, p.parts).is_member);
  CHECK_FALSE(in_M(u, p.parts).is_member);

  SeparablePart shifted = p.parts;
  for (double& v : shifted.g1) v += 1.0;
  const MembershipReport r = in_M(*d, shifted, p.parts);
  CHECK_FALSE(r.is_member);
  CHECK(r.integral_gap_1 == doctest::Approx(1.0));

  SeparablePart bumped = p.parts;
  const auto& xs = d->first_factor()->grid().coords(0);
  for (std::size_t i = 0; i < xs.size(); ++i) bumped.g1[i] += xs[i] - 0.5;
  CHECK(in_M(*d, bumped, p.parts).is_member);
}

TEST_CASE("product with a simplex factor") {
  const auto p = build_product(DelzantPolytope::interval(0, 1), DelzantPolytope::simplex(2));
  auto d = Domain::create(p, 6);
  REQUIRE(d->is_tensor_product());
  const std::vector<double> f = sample(d->grid(), [](std::span<const double> x) { return x[0] + x[1] * x[2]; });
  const SeparablePart parts = separable_parts(*d, f);
  CHECK(separability_defect(*d, f) <= 1e-28);
  const auto back = lift(*d, parts);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(back[i] == doctest::Approx(f[i]).epsilon(1e-13));
}
