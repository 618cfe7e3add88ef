#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "toricflow/error.hpp"
#include "toricflow/flow.hpp"

using namespace toricflow;

namespace {

// Independent 1D stepper on [0,1]: cell centres, centred second differences
// inside and forward/backward one-sided ones at the two end nodes.
struct Oracle1D {
  int n;
  double h;
  std::vector<double> x, f;

  explicit Oracle1D(int n_) : n(n_), h(1.0 / n_), x(n_), f(n_) {
    for (int i = 0; i < n; ++i) x[i] = (i + 0.5) * h;
  }

  std::vector<double> d2(const std::vector<double>& v) const {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
      const int c = std::clamp(i, 1, n - 2);
      out[i] = (v[c - 1] - 2 * v[c] + v[c + 1]) / (h * h);
    }
    return out;
  }

  // Returns S - theta.
  std::vector<double> residual() const {
    const auto fpp = d2(f);
    std::vector<double> U(n);
    for (int i = 0; i < n; ++i) U[i] = 1.0 / (1.0 / (2 * x[i] * (1 - x[i])) + fpp[i]);
    auto S = d2(U);
    for (double& s : S) s = -s;
    double m0 = 0, m1 = 0, m2 = 0, b0 = 0, b1 = 0;
    for (int i = 0; i < n; ++i) {
      m0 += h;
      m1 += h * x[i];
      m2 += h * x[i] * x[i];
      b0 += h * S[i];
      b1 += h * S[i] * x[i];
    }
    const double det = m0 * m2 - m1 * m1;
    const double c0 = (b0 * m2 - b1 * m1) / det, c1 = (m0 * b1 - m1 * b0) / det;
    for (int i = 0; i < n; ++i) S[i] -= c0 + c1 * x[i];
    return S;
  }

  double energy() const {
    double e = 0;
    for (double r : residual()) e += h * r * r;
    return e;
  }

  void step(double dt) {
    const auto r = residual();
    for (int i = 0; i < n; ++i) f[i] -= dt * r[i];
  }
};

std::shared_ptr<const Domain> unit_interval(int n) { return Domain::create(DelzantPolytope::interval(0, 1), n); }

std::vector<double> bump(const Grid& g) {
  return sample(g, [](std::span<const double> x) {
    const double b = x[0] * (1 - x[0]);
    return 0.01 * b * b;
  });
}

}  // namespace

TEST_CASE("params validation and defaults") {
  auto d = unit_interval(64);
  const FlowParams p = FlowParams::defaults_for(d->grid());
  CHECK(p.dt_init == doctest::Approx(0.2 * std::pow(1.0 / 64, 4)));
  CHECK(p.dt_min <= p.dt_init);
  FlowParams bad = p;
  bad.dt_growth = 1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad = p;
  bad.dt_min = 2 * p.dt_init;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad = p;
  bad.tol_energy = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
}

TEST_CASE("flow matches the independent coarse stepper") {
  const int n = 16;
  auto d = unit_interval(n);
  Oracle1D oracle(n);
  const auto f0 = bump(d->grid());
  oracle.f = f0;
  for (int i = 0; i < n; ++i) REQUIRE(oracle.x[i] == d->grid().coords(0)[i]);

  FlowParams params = FlowParams::defaults_for(d->grid());
  FlowState state(SymplecticPotential(d, f0), params);
  CHECK(state.energy() == doctest::Approx(oracle.energy()).epsilon(1e-10));
  double last = state.energy();
  for (int k = 0; k < 300; ++k) {
    const double dt = state.dt();
    REQUIRE(step(state, params) == StepOutcome::kAccepted);
    oracle.step(dt);
    CHECK(state.energy() < last);
    last = state.energy();
  }
  double worst = 0;
  for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(state.potential().correction()[i] - oracle.f[i]));
  CHECK(worst <= 1e-12);
  CHECK(state.energy() == doctest::Approx(oracle.energy()).epsilon(1e-8));
}

TEST_CASE("extremal start converges at step zero") {
  auto d = unit_interval(32);
  const SymplecticPotential fs(d, std::vector<double>(d->size(), 0.0));
  const FlowReport r = run(fs, nullptr, FlowParams::defaults_for(d->grid()));
  CHECK(r.status == FlowStatus::kConverged);
  CHECK(r.monitors.accepted_steps == 0);
  CHECK(r.monitors.final_energy <= 1e-9);
}

TEST_CASE("oversized steps are rejected and halved") {
  auto d = unit_interval(32);
  FlowParams params = FlowParams::defaults_for(d->grid());
  params.dt_init *= 16;
  params.dt_min = params.dt_init * 1e-6;
  params.max_steps = 200;
  const FlowReport r = run(SymplecticPotential(d, bump(d->grid())), nullptr, params);
  CHECK(r.status == FlowStatus::kMaxStepsReached);
  CHECK(r.monitors.rejected_steps > 0);
  CHECK(r.monitors.max_energy_increase <= 0.0);
  CHECK(r.monitors.final_energy < r.monitors.initial_energy);
}

TEST_CASE("step floor is terminal") {
  auto d = unit_interval(32);
  FlowParams params = FlowParams::defaults_for(d->grid());
  params.dt_init *= 16;
  params.dt_min = params.dt_init;  // no room to halve
  const FlowReport r = run(SymplecticPotential(d, bump(d->grid())), nullptr, params);
  CHECK(r.status == FlowStatus::kStepFloor);
  CHECK(r.monitors.accepted_steps > 0);
}

TEST_CASE("a step that breaks positivity ends the run") {
  auto d = unit_interval(32);
  FlowParams params = FlowParams::defaults_for(d->grid());
  params.dt_init = 1.0;
  params.dt_min = 0.5;
  const FlowReport r = run(SymplecticPotential(d, bump(d->grid())), nullptr, params);
  CHECK(r.status == FlowStatus::kPositivityLost);
}

TEST_CASE("non-positive start is rejected") {
  auto d = unit_interval(16);
  const auto concave = sample(d->grid(), [](std::span<const double> x) { return -3.0 * x[0] * x[0]; });
  CHECK_THROWS_AS(FlowState(SymplecticPotential(d, concave), FlowParams::defaults_for(d->grid())), InvalidInput);
}

TEST_CASE("short 1D run converges and conserves moments") {
  auto d = unit_interval(16);
  const FlowReport r = run(SymplecticPotential(d, bump(d->grid())), nullptr, FlowParams::defaults_for(d->grid()));
  CHECK(r.status == FlowStatus::kConverged);
  CHECK(r.monitors.final_energy < 1e-8);
  CHECK(r.monitors.max_energy_increase <= 0.0);
  CHECK(r.monitors.moment_drift_per_1000 <= 1e-9);
  for (std::size_t k = 1; k < r.series.size(); ++k) CHECK(r.series[k].energy <= r.series[k - 1].energy);
}

TEST_CASE("theorem experiment on a coarse square") {
  const auto I = DelzantPolytope::interval(0, 1);
  auto d = Domain::create(build_product(I, I), 12);
  const SmoothPart zero{{12, 12}, std::vector<double>(d->size(), 0.0)};
  const TheoremResult trivial = theorem_experiment(I, I, zero, FlowParams::defaults_for(d->grid()));
  CHECK(trivial.verdict);
  CHECK(trivial.report.monitors.accepted_steps == 0);

  const SmoothPart pert{{12, 12}, sample(d->grid(), [](std::span<const double> x) {
                          return 0.01 * x[0] * (1 - x[0]) * x[1] * (1 - x[1]) * (1 + x[0] + x[1]);
                        })};
  const TheoremResult r = theorem_experiment(I, I, pert, FlowParams::defaults_for(d->grid()));
  CHECK(r.verdict);
  CHECK(r.final_defect <= 0.01 * r.initial_defect);

  SmoothPart huge = pert;
  for (double& v : huge.values) v *= -2000.0;
  CHECK_THROWS_AS(theorem_experiment(I, I, huge, FlowParams::defaults_for(d->grid())), InvalidInput);
}

TEST_CASE("coupled flows share one dt schedule") {
  auto d = unit_interval(16);
  const SymplecticPotential a(d, bump(d->grid()));
  std::vector<double> g = bump(d->grid());
  for (double& v : g) v *= 0.5;
  const SymplecticPotential b(d, g);
  std::size_t calls = 0;
  const auto reports = run_coupled({a, b}, FlowParams::defaults_for(d->grid()),
                                   [&](std::span<const FlowState> s) {
                                     ++calls;
                                     CHECK(s[0].t() == s[1].t());
                                   });
  REQUIRE(reports.size() == 2);
  CHECK(calls == static_cast<std::size_t>(reports[0].monitors.accepted_steps));
  CHECK(reports[0].status == FlowStatus::kConverged);
}
