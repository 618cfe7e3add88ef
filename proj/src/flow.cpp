#include "toricflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "toricflow/error.hpp"
#include "toricflow/kernels/kernels.hpp"

namespace toricflow {

namespace {

constexpr double kEnergySlack = 1e-12;
constexpr double kContractionSlack = 1e-8;
const double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

FlowParams FlowParams::defaults_for(const Grid& grid) {
  FlowParams p;
  const double h = grid.min_spacing();
  p.dt_init = 0.2 * h * h * h * h;
  p.dt_min = 1e-6 * p.dt_init;
  return p;
}

void FlowParams::validate() const {
  auto fail = [](const std::string& what) { throw InvalidInput("flow params: " + what); };
  if (!(dt_init > 0.0)) fail("dt_init must be positive");
  if (!(dt_min > 0.0) || dt_min > dt_init) fail("need 0 < dt_min <= dt_init");
  if (!(dt_growth > 1.0)) fail("dt_growth must exceed 1");
  if (!(t_max > 0.0)) fail("t_max must be positive");
  if (max_steps == 0) fail("max_steps must be positive");
  if (!(tol_energy > 0.0) || !(tol_defect > 0.0)) fail("tolerances must be positive");
  if (!(positivity_margin >= 0.0)) fail("positivity_margin must be nonnegative");
  if (series_stride == 0) fail("series_stride must be positive");
}

std::string_view to_string(FlowStatus status) {
  switch (status) {
    case FlowStatus::kConverged: return "converged";
    case FlowStatus::kTmaxReached: return "t_max_reached";
    case FlowStatus::kMaxStepsReached: return "max_steps_reached";
    case FlowStatus::kStepFloor: return "step_floor";
    case FlowStatus::kPositivityLost: return "positivity_lost";
  }
  return "unknown";
}

std::vector<double> affine_moments(const Domain& domain, std::span<const double> f) {
  const Grid& grid = domain.grid();
  std::vector<double> m{integrate(grid, f)};
  for (int a = 0; a < grid.dim(); ++a)
    m.push_back(kernels::weighted_dot(grid.weights(), f, grid.coords(a)));
  return m;
}

FlowState::FlowState(SymplecticPotential u0, const FlowParams& params)
    : dt_(params.dt_init),
      u_(std::move(u0)),
      eval_(std::make_shared<CurvatureEvaluator>(u_.domain_ptr())) {
  std::size_t worst = 0;
  min_eig_ = eval_->hessian(u_.correction(), &worst);
  if (!(min_eig_ > params.positivity_margin)) {
    std::string where;
    for (double c : u_.domain().grid().point(worst)) where += ' ' + std::to_string(c);
    throw InvalidInput("initial potential is not a valid symplectic potential: smallest Hessian "
                       "eigenvalue " + std::to_string(min_eig_) + " at x =" + where);
  }
  eval_->curvature();
  theta_ = eval_->theta();
  energy_ = eval_->energy();
  residual_.assign(eval_->residual().begin(), eval_->residual().end());
  candidate_.resize(residual_.size());
}

bool FlowState::propose(double dt, const FlowParams& params) {
  auto f = u_.correction();
  std::copy(f.begin(), f.end(), candidate_.begin());
  kernels::axpy(-dt, residual_, candidate_);
  candidate_dt_ = dt;
  candidate_min_eig_ = eval_->hessian(candidate_);
  if (!(candidate_min_eig_ > params.positivity_margin)) {
    rejected_for_positivity_ = true;
    return false;
  }
  eval_->curvature();
  candidate_energy_ = eval_->energy();
  rejected_for_positivity_ = false;
  return candidate_energy_ <= energy_ * (1.0 + kEnergySlack);
}

void FlowState::commit() {
  u_.mutable_correction().swap(candidate_);
  t_ += candidate_dt_;
  theta_ = eval_->theta();
  energy_ = candidate_energy_;
  min_eig_ = candidate_min_eig_;
  auto r = eval_->residual();
  std::copy(r.begin(), r.end(), residual_.begin());
}

StepOutcome step(FlowState& state, const FlowParams& params) {
  double dt = state.dt();
  while (true) {
    if (dt < params.dt_min) {
      state.set_dt(dt);
      return state.last_rejection_was_positivity() ? StepOutcome::kPositivityLost
                                                   : StepOutcome::kStepFloor;
    }
    if (state.propose(dt, params)) break;
    dt *= 0.5;
  }
  state.commit();
  state.set_dt(std::min(dt * params.dt_growth, params.dt_init));
  return StepOutcome::kAccepted;
}

namespace {

// Per-flow bookkeeping for the drivers.
class Monitor {
 public:
  Monitor(const FlowState& s, const SymplecticPotential* reference, const FlowParams& params)
      : reference_(reference), product_(s.potential().domain().is_tensor_product()) {
    report_.params = params;
    const Domain& domain = s.potential().domain();
    auto f = s.potential().correction();
    report_.monitors.initial_energy = s.energy();
    report_.monitors.initial_moments = affine_moments(domain, f);
    std::vector<double> abs_f(f.size());
    std::transform(f.begin(), f.end(), abs_f.begin(), [](double v) { return std::abs(v); });
    moment_scale_ = affine_moments(domain, abs_f);
    for (int a = 0; a < domain.grid().dim(); ++a) {
      // int |f| |x_a|
      std::vector<double> abs_x(f.size());
      auto x = domain.grid().coords(a);
      std::transform(x.begin(), x.end(), abs_x.begin(), [](double v) { return std::abs(v); });
      moment_scale_[a + 1] = kernels::weighted_dot(domain.grid().weights(), abs_f, abs_x);
    }
    const FlowSample first = sample(s, 0, 0.0);
    report_.monitors.initial_defect = first.defect;
    report_.monitors.max_defect = first.defect;
    report_.monitors.initial_distance = first.distance;
    report_.series.push_back(first);
  }

  void accepted(const FlowState& s, double previous_energy, double dt) {
    FlowMonitors& m = report_.monitors;
    ++m.accepted_steps;
    if (previous_energy > 0.0)
      m.max_energy_increase =
          std::max(m.max_energy_increase, (s.energy() - previous_energy) / previous_energy);
    const std::vector<double> moments = affine_moments(s.potential().domain(), s.potential().correction());
    const double per = std::max(1.0, static_cast<double>(m.accepted_steps) / 1000.0);
    for (std::size_t i = 0; i < moments.size(); ++i) {
      const double scale = moment_scale_[i] > 0.0 ? moment_scale_[i] : 1.0;
      const double drift = std::abs(moments[i] - m.initial_moments[i]) / scale / per;
      m.moment_drift_per_1000 = std::max(m.moment_drift_per_1000, drift);
    }
    last_ = sample(s, m.accepted_steps, dt);
    if (product_) m.max_defect = std::max(m.max_defect, last_.defect);
    if (m.accepted_steps % report_.params.series_stride == 0) report_.series.push_back(last_);
  }

  void rejected(std::size_t count) { report_.monitors.rejected_steps += count; }

  FlowReport finish(const FlowState& s, FlowStatus status) {
    if (report_.series.back().step != report_.monitors.accepted_steps) report_.series.push_back(last_);
    FlowMonitors& m = report_.monitors;
    const FlowSample& end = report_.series.back();
    m.final_energy = s.energy();
    m.final_defect = end.defect;
    m.final_distance = end.distance;
    report_.status = status;
    report_.final_potential = std::make_shared<const SymplecticPotential>(s.potential());
    report_.final_theta = s.theta();
    if (product_)
      report_.final_parts = separable_parts(s.potential().domain(), s.potential().correction());
    return std::move(report_);
  }

 private:
  FlowSample sample(const FlowState& s, std::size_t step_index, double dt) const {
    FlowSample row;
    row.step = step_index;
    row.t = s.t();
    row.energy = s.energy();
    row.min_eigenvalue = s.min_eigenvalue();
    row.dt = dt;
    row.distance = reference_ ? l2_distance(s.potential(), *reference_) : kNaN;
    row.defect = product_
                     ? separability_defect(s.potential().domain(), s.potential().correction())
                     : kNaN;
    return row;
  }

  const SymplecticPotential* reference_;
  bool product_;
  FlowReport report_;
  FlowSample last_;
  std::vector<double> moment_scale_;
};

std::vector<FlowReport> drive(std::vector<FlowState>& states,
                              const std::vector<const SymplecticPotential*>& references,
                              const FlowParams& params,
                              const std::function<void(std::span<const FlowState>)>& on_accept) {
  std::vector<Monitor> monitors;
  for (std::size_t i = 0; i < states.size(); ++i)
    monitors.emplace_back(states[i], references[i], params);

  FlowStatus status = FlowStatus::kTmaxReached;
  std::size_t steps = 0;
  double dt = params.dt_init;
  std::vector<double> previous(states.size());
  while (true) {
    if (std::all_of(states.begin(), states.end(),
                    [&](const FlowState& s) { return s.energy() < params.tol_energy; })) {
      status = FlowStatus::kConverged;
      break;
    }
    if (states.front().t() >= params.t_max) {
      status = FlowStatus::kTmaxReached;
      break;
    }
    if (steps >= params.max_steps) {
      status = FlowStatus::kMaxStepsReached;
      break;
    }
    std::size_t rejections = 0;
    bool positivity = false;
    bool accepted = false;
    while (dt >= params.dt_min) {
      accepted = true;
      for (FlowState& s : states) {
        if (!s.propose(dt, params)) {
          accepted = false;
          positivity = s.last_rejection_was_positivity();
          break;
        }
      }
      if (accepted) break;
      ++rejections;
      dt *= 0.5;
    }
    for (Monitor& m : monitors) m.rejected(rejections);
    if (!accepted) {
      status = positivity ? FlowStatus::kPositivityLost : FlowStatus::kStepFloor;
      break;
    }
    for (std::size_t i = 0; i < states.size(); ++i) {
      previous[i] = states[i].energy();
      states[i].commit();
    }
    ++steps;
    for (std::size_t i = 0; i < states.size(); ++i) monitors[i].accepted(states[i], previous[i], dt);
    if (on_accept) on_accept(states);
    dt = std::min(dt * params.dt_growth, params.dt_init);
    for (FlowState& s : states) s.set_dt(dt);
  }

  std::vector<FlowReport> reports;
  for (std::size_t i = 0; i < states.size(); ++i) reports.push_back(monitors[i].finish(states[i], status));
  return reports;
}

}  // namespace

FlowReport run(const SymplecticPotential& u0, const SymplecticPotential* reference,
               const FlowParams& params) {
  params.validate();
  if (reference && !u0.domain().compatible(reference->domain()))
    throw InvalidInput("reference potential lives on a different polytope or grid");
  std::vector<FlowState> states{FlowState(u0, params)};
  return std::move(drive(states, {reference}, params, {}).front());
}

std::vector<FlowReport> run_coupled(
    const std::vector<SymplecticPotential>& starts, const FlowParams& params,
    const std::function<void(std::span<const FlowState>)>& on_accept) {
  params.validate();
  if (starts.empty()) throw InvalidInput("run_coupled needs at least one flow");
  std::vector<FlowState> states;
  for (const auto& u : starts) states.emplace_back(u, params);
  return drive(states, std::vector<const SymplecticPotential*>(starts.size(), nullptr), params,
               on_accept);
}

TheoremResult theorem_experiment(const DelzantPolytope& p1, const DelzantPolytope& p2,
                                 const SmoothPart& perturbation, const FlowParams& params) {
  if (perturbation.n_per_axis.empty()) throw InvalidInput("perturbation has no grid size");
  const int n = perturbation.n_per_axis.front();
  auto u1 = SymplecticPotential::guillemin(Domain::create(p1, n));
  auto u2 = SymplecticPotential::guillemin(Domain::create(p2, n));
  const SymplecticPotential u0 = make_product_potential(u1, u2, perturbation);
  const PositivityReport pos = positivity_report(hessian_field(u0));
  if (!(pos.min_eigenvalue > params.positivity_margin))
    throw InvalidInput("rejected input: perturbed potential fails positivity (min eigenvalue " +
                       std::to_string(pos.min_eigenvalue) + ")");

  TheoremResult result;
  result.report = run(u0, nullptr, params);
  const FlowMonitors& m = result.report.monitors;
  result.initial_defect = m.initial_defect;
  result.final_defect = m.final_defect;
  result.final_positive = result.report.series.back().min_eigenvalue > params.positivity_margin;
  result.final_parts = *result.report.final_parts;
  result.verdict = result.report.status == FlowStatus::kConverged &&
                   result.final_defect <= std::max(params.tol_defect, 0.01 * result.initial_defect) &&
                   result.final_positive;
  return result;
}

double ContractionReport::violation_fraction() const {
  const std::size_t steps = distances.size() > 1 ? distances.size() - 1 : 0;
  return steps ? static_cast<double>(violations) / static_cast<double>(steps) : 0.0;
}

ContractionReport contraction_experiment(const SymplecticPotential& u0, const FlowParams& params) {
  ContractionReport out;
  const SymplecticPotential projected = project_separable(u0).v;
  out.distances.push_back(l2_distance(u0, projected));
  out.slack = kContractionSlack * (1.0 + out.distances.front());
  out.flows = run_coupled({u0, projected}, params, [&](std::span<const FlowState> s) {
    const double d = l2_distance(s[0].potential(), s[1].potential());
    const double excess = d - out.distances.back();
    if (excess > out.slack) {
      ++out.violations;
      out.worst_excess = std::max(out.worst_excess, excess);
    }
    out.distances.push_back(d);
  });
  return out;
}

}  // namespace toricflow
