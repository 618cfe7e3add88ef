#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "toricflow/abreu.hpp"
#include "toricflow/separable.hpp"

namespace toricflow {

/// Step control for the explicit modified Calabi flow.
struct FlowParams {
  double dt_init = 0.0;
  double dt_min = 0.0;
  double dt_growth = 1.2;
  double t_max = 10.0;
  std::size_t max_steps = 1'000'000;
  double tol_energy = 1e-8;
  double tol_defect = 1e-6;
  double positivity_margin = 0.0;
  /// Record every k-th accepted step in the series (monitors still see every
  /// step); the first and last states are always recorded.
  std::size_t series_stride = 1;

  /// dt_init = 0.2 h^4 for the smallest spacing h, dt_min = 1e-6 dt_init.
  static FlowParams defaults_for(const Grid& grid);
  /// Throws InvalidInput on inconsistent values.
  void validate() const;
};

enum class FlowStatus {
  kConverged,
  kTmaxReached,
  kMaxStepsReached,
  kStepFloor,
  kPositivityLost,
};

std::string_view to_string(FlowStatus status);

/// One row of the monitor time series. `distance` is NaN without a
/// reference, `defect` is NaN on non-product domains.
struct FlowSample {
  std::size_t step = 0;
  double t = 0.0;
  double energy = 0.0;
  double distance = 0.0;
  double defect = 0.0;
  double min_eigenvalue = 0.0;
  double dt = 0.0;
};

/// Quantities tracked over every accepted step, independent of the series
/// stride.
struct FlowMonitors {
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;
  /// max over accepted steps of (E_new - E_old) / E_old.
  double max_energy_increase = 0.0;
  double initial_energy = 0.0;
  double final_energy = 0.0;
  double initial_defect = 0.0;
  double final_defect = 0.0;
  double max_defect = 0.0;
  double initial_distance = 0.0;
  double final_distance = 0.0;
  /// Affine moments (int f, int f x_i) of the initial correction.
  std::vector<double> initial_moments;
  /// max over accepted steps k of |m(t_k) - m(0)| / scale / max(1, k / 1000),
  /// where scale_i = int |f_0| |phi_i|.
  double moment_drift_per_1000 = 0.0;
};

struct FlowReport {
  FlowStatus status = FlowStatus::kTmaxReached;
  FlowParams params;
  std::vector<FlowSample> series;
  FlowMonitors monitors;
  std::shared_ptr<const SymplecticPotential> final_potential;
  AffineFunction final_theta;
  std::optional<SeparablePart> final_parts;
};

/// Flow time, current potential, step size and cached curvature data.
class FlowState {
 public:
  /// Evaluates u0; throws InvalidInput when its Hessian is not positive with
  /// the requested margin.
  FlowState(SymplecticPotential u0, const FlowParams& params);

  double t() const { return t_; }
  double dt() const { return dt_; }
  const SymplecticPotential& potential() const { return u_; }
  const AffineFunction& theta() const { return theta_; }
  double energy() const { return energy_; }
  double min_eigenvalue() const { return min_eig_; }
  /// S - theta at the current potential.
  std::span<const double> residual() const { return residual_; }

  /// Forms f - dt (S - theta) and evaluates it. True when the candidate is
  /// positive (beyond the margin) and does not raise the energy.
  bool propose(double dt, const FlowParams& params);
  /// Whether the last rejected proposal failed positivity (vs energy).
  bool last_rejection_was_positivity() const { return rejected_for_positivity_; }
  /// Adopts the last accepted proposal.
  void commit();
  void set_dt(double dt) { dt_ = dt; }

 private:
  double t_ = 0.0;
  double dt_ = 0.0;
  SymplecticPotential u_;
  std::shared_ptr<CurvatureEvaluator> eval_;
  AffineFunction theta_;
  double energy_ = 0.0;
  double min_eig_ = 0.0;
  std::vector<double> residual_;

  std::vector<double> candidate_;
  double candidate_dt_ = 0.0;
  double candidate_energy_ = 0.0;
  double candidate_min_eig_ = 0.0;
  bool rejected_for_positivity_ = false;
};

enum class StepOutcome { kAccepted, kStepFloor, kPositivityLost };

/// One accepted forward-Euler step of df/dt = theta - S, halving dt until
/// the candidate is accepted; on acceptance dt <- min(dt * growth, dt_init).
StepOutcome step(FlowState& state, const FlowParams& params);

/// Runs from u0 until converged, t_max, max_steps or a terminal failure.
FlowReport run(const SymplecticPotential& u0, const SymplecticPotential* reference,
               const FlowParams& params);

/// Several flows advanced with one shared dt schedule: a step is accepted
/// only when every flow accepts it. `on_accept` sees the states after each
/// accepted step. Converged means every flow is below tol_energy.
std::vector<FlowReport> run_coupled(
    const std::vector<SymplecticPotential>& starts, const FlowParams& params,
    const std::function<void(std::span<const FlowState>)>& on_accept = {});

struct TheoremResult {
  bool verdict = false;
  bool final_positive = false;
  double initial_defect = 0.0;
  double final_defect = 0.0;
  FlowReport report;
  SeparablePart final_parts;
};

/// Flows u0 = Guillemin(P1 x P2) + perturbation and checks the limit is
/// separable: converged, final defect <= max(tol_defect, 0.01 * initial) and
/// positive at the end. Throws InvalidInput when u0 is not a valid potential.
TheoremResult theorem_experiment(const DelzantPolytope& p1, const DelzantPolytope& p2,
                                 const SmoothPart& perturbation, const FlowParams& params);

struct ContractionReport {
  /// Mutual L2 distance after every accepted step, starting with the
  /// initial distance.
  std::vector<double> distances;
  double slack = 0.0;
  std::size_t violations = 0;
  double worst_excess = 0.0;
  std::vector<FlowReport> flows;

  double violation_fraction() const;
};

/// Coupled flows from u0 and project_separable(u0); a step violates
/// contraction when the distance grows by more than
/// 1e-8 * (1 + initial distance).
ContractionReport contraction_experiment(const SymplecticPotential& u0, const FlowParams& params);

/// Affine moments int f and int f x_i.
std::vector<double> affine_moments(const Domain& domain, std::span<const double> f);

}  // namespace toricflow
