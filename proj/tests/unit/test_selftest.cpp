#include <doctest.h>

#include <sstream>

#include "toricflow/selftest.hpp"

using namespace toricflow;

TEST_CASE("selftest catches a sign flip in the curvature operator") {
  std::ostringstream out;
  const bool ok = selftest(out, [](const SymplecticPotential& u) {
    ScalarField s = scalar_curvature(u);
    for (double& v : s) v = -v;
    return s;
  });
  CHECK_FALSE(ok);
  CHECK(out.str().find("FAIL scalar_curvature interval") != std::string::npos);
}
