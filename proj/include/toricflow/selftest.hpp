#pragma once

#include <functional>
#include <iosfwd>

#include "toricflow/abreu.hpp"

namespace toricflow {

using CurvatureFn = std::function<ScalarField(const SymplecticPotential&)>;

/// Closed-form and structural checks; one line per check, the failing check
/// named. Returns true iff all pass. `curvature` is swappable so tests can
/// verify that a broken operator is caught.
bool selftest(std::ostream& out, const CurvatureFn& curvature = scalar_curvature);

}  // namespace toricflow
