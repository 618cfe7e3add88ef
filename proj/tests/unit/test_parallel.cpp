#include <doctest.h>

#include <atomic>
#include <vector>

#include "toricflow/abreu.hpp"
#include "toricflow/parallel.hpp"

using namespace toricflow;

TEST_CASE("parallel_for covers the range exactly once") {
  for (std::size_t n : {0u, 1u, 7u, 1000u, 4097u}) {
    std::vector<std::atomic<int>> hits(n);
    parallel_for(n, 16, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) hits[i]++;
    });
    for (auto& h : hits) CHECK(h.load() == 1);
  }
}

TEST_CASE("threaded node loops give identical curvature") {
  // Run under TOOL_THREADS > 1 by ctest; the result must not depend on it.
  const auto p = build_product(DelzantPolytope::interval(0, 1), DelzantPolytope::simplex(2));
  auto d = Domain::create(p, 14);
  const auto f = sample(d->grid(), [](std::span<const double> x) { return 0.01 * x[0] * x[0] * x[1]; });
  const SymplecticPotential u(d, f);
  const ScalarField a = scalar_curvature(u);
  const ScalarField b = scalar_curvature(u);
  CHECK(a == b);
  CHECK(thread_cap() >= 1);
}
