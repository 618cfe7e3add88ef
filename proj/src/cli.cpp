#include "toricflow/cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>

#include <CLI11.hpp>

#include "toricflow/error.hpp"
#include "toricflow/flow.hpp"
#include "toricflow/io.hpp"
#include "toricflow/selftest.hpp"

namespace toricflow::cli {

namespace fs = std::filesystem;
using io::Json;

namespace {

struct Options {
  std::string builtin;
  std::string polytope_file;
  std::string config_file;
  std::string potential_file;
  std::string out;
  std::string series;
  std::optional<int> grid;
  std::optional<double> amplitude;
  std::optional<double> tol_energy;
  std::optional<double> tol_defect;
  std::optional<double> t_max;
  std::optional<double> dt_init;
  std::optional<long long> max_steps;
  std::optional<long long> series_stride;
};

Json load_config(const Options& o) {
  if (!fs::exists(o.config_file)) throw InvalidInput("config not found: " + o.config_file);
  return io::read_json(o.config_file, "config");
}

// Polytope from --builtin / --polytope, falling back to a config's spec.
Json polytope_spec(const Options& o, const Json* config) {
  if (!o.builtin.empty() && !o.polytope_file.empty())
    throw InvalidInput("--builtin and --polytope are mutually exclusive");
  if (!o.builtin.empty()) return Json{{"builtin", o.builtin}};
  if (!o.polytope_file.empty()) return io::read_json(o.polytope_file, "polytope file");
  if (config && config->contains("polytope")) return (*config)["polytope"];
  throw InvalidInput("no polytope given (use --builtin or --polytope)");
}

FlowParams resolve_params(const Options& o, const Json& overrides, const Grid& grid) {
  Json merged = overrides;
  if (o.tol_energy) merged["tol_energy"] = *o.tol_energy;
  if (o.tol_defect) merged["tol_defect"] = *o.tol_defect;
  if (o.t_max) merged["t_max"] = *o.t_max;
  if (o.dt_init) merged["dt_init"] = *o.dt_init;
  if (o.max_steps) merged["max_steps"] = *o.max_steps;
  if (o.series_stride) merged["series_stride"] = *o.series_stride;
  return io::parse_flow_params(merged, FlowParams::defaults_for(grid));
}

DelzantPolytope require_product(const DelzantPolytope& p) {
  std::optional<DelzantPolytope> product = detect_product(p);
  if (!product) throw Unsupported("polytope is not a product P1 x P2");
  return *product;
}

Json positivity_json(const PositivityReport& r) {
  return Json{{"is_positive", r.is_positive}, {"min_eigenvalue", r.min_eigenvalue}, {"worst_node", r.worst_node}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

fs::path series_path(const Options& o) {
  if (!o.series.empty()) return o.series;
  return fs::path(o.out).replace_filename("series.csv");
}

int exit_for(FlowStatus status) { return status == FlowStatus::kConverged ? 0 : 1; }

int scalar_curvature_cmd(const Options& o, std::ostream& out) {
  std::optional<SymplecticPotential> u;
  if (!o.potential_file.empty()) {
    u = io::load_potential(o.potential_file);
  } else {
    const DelzantPolytope p = io::parse_polytope(polytope_spec(o, nullptr));
    auto domain = Domain::create(p, o.grid.value_or(32));
    io::Perturbation pert;
    pert.amplitude = o.amplitude.value_or(0.0);
    u.emplace(domain, pert.sample(p, domain->grid()));
  }
  const Domain& domain = u->domain();
  CurvatureEvaluator eval(u->domain_ptr());
  eval.hessian(u->correction());
  eval.curvature();
  const Grid& grid = domain.grid();
  std::string csv;
  for (int i = 0; i < grid.dim(); ++i) csv += "x_" + std::to_string(i + 1) + ",";
  csv += "S,theta,residual\n";
  for (std::size_t node = 0; node < grid.size(); ++node) {
    for (int i = 0; i < grid.dim(); ++i) csv += io::format_double(grid.coords(i)[node]) + ",";
    const double s = eval.scalar()[node];
    const double r = eval.residual()[node];
    csv += io::format_double(s) + "," + io::format_double(s - r) + "," + io::format_double(r) + "\n";
  }
  if (o.out.empty() || o.out == "-")
    out << csv;
  else
    io::write_text(o.out, csv);
  return 0;
}

int project_cmd(const Options& o, std::ostream& out) {
  std::optional<SymplecticPotential> u;
  Json config;
  if (!o.potential_file.empty()) {
    const SymplecticPotential loaded = io::load_potential(o.potential_file);
    const DelzantPolytope p = require_product(loaded.domain().polytope());
    auto domain = Domain::create(p, loaded.domain().n());
    u.emplace(domain, std::vector<double>(loaded.correction().begin(), loaded.correction().end()));
    config["potential"] = o.potential_file;
  } else {
    const DelzantPolytope p = require_product(io::parse_polytope(polytope_spec(o, nullptr)));
    auto domain = Domain::create(p, o.grid.value_or(32));
    io::Perturbation pert;
    pert.amplitude = o.amplitude.value_or(0.0);
    u.emplace(domain, pert.sample(p, domain->grid()));
    config["perturbation"] = pert.to_json();
  }
  config["polytope"] = io::polytope_to_json(u->domain().polytope());
  config["grid_n"] = u->domain().n();

  const SeparableProjection proj = project_separable(*u);
  const Json report{{"config", config},
                    {"smooth_part", io::smooth_part_to_json(proj.v.smooth_part())},
                    {"parts", {{"g1", proj.parts.g1}, {"g2", proj.parts.g2}}},
                    {"defect", separability_defect(u->domain(), u->correction())},
                    {"distance", l2_distance(*u, proj.v)},
                    {"positivity_u", positivity_json(positivity_report(hessian_field(*u)))},
                    {"positivity_v", positivity_json(positivity_report(hessian_field(proj.v)))}};
  if (o.out.empty() || o.out == "-")
    out << dump(report);
  else
    io::write_text(o.out, dump(report));
  return 0;
}

int flow_cmd(const Options& o) {
  const Json raw = load_config(o);
  io::FlowConfig cfg = io::parse_flow_config(raw, fs::path(o.config_file).parent_path());
  if (o.grid) cfg.grid_n = *o.grid;
  if (o.amplitude) cfg.perturbation.amplitude = *o.amplitude;
  if (!o.builtin.empty() || !o.polytope_file.empty()) cfg.polytope_spec = polytope_spec(o, nullptr);

  DelzantPolytope p = io::parse_polytope(cfg.polytope_spec);
  if (std::optional<DelzantPolytope> product = detect_product(p)) p = *product;
  auto domain = Domain::create(p, cfg.grid_n);
  const FlowParams params = resolve_params(o, cfg.params, domain->grid());

  std::optional<SymplecticPotential> reference;
  if (cfg.reference) {
    reference = io::load_potential(*cfg.reference);
    if (!reference->domain().compatible(*domain))
      throw InvalidInput("reference potential is on a different polytope or grid");
    reference.emplace(domain, std::vector<double>(reference->correction().begin(), reference->correction().end()));
  }
  const SymplecticPotential u0(domain, cfg.perturbation.sample(p, domain->grid()));
  const FlowReport report = run(u0, reference ? &*reference : nullptr, params);

  Json config{{"polytope", io::polytope_to_json(p)},
              {"grid_n", cfg.grid_n},
              {"perturbation", cfg.perturbation.to_json()},
              {"params", io::flow_params_to_json(params)}};
  if (cfg.reference) config["reference"] = cfg.reference->string();
  bool verdict = report.status == FlowStatus::kConverged;
  if (domain->is_tensor_product()) {
    const FlowMonitors& m = report.monitors;
    verdict = verdict && m.final_defect <= std::max(params.tol_defect, 0.01 * m.initial_defect);
  }
  Json j = io::flow_report_to_json(report);
  j["config"] = config;
  j["verdict"] = verdict;
  io::write_text(o.out, dump(j));
  io::write_text(series_path(o), io::series_to_csv(report.series));
  return exit_for(report.status);
}

int verify_theorem_cmd(const Options& o) {
  Json raw = Json::object();
  if (!o.config_file.empty()) raw = load_config(o);
  const DelzantPolytope p = require_product(io::parse_polytope(polytope_spec(o, &raw)));
  const int n = o.grid.value_or(raw.value("grid_n", 32));
  io::Perturbation pert;
  pert.amplitude = 0.01;
  if (raw.contains("perturbation")) pert = io::parse_perturbation(raw["perturbation"]);
  if (o.amplitude) pert.amplitude = *o.amplitude;

  auto domain = Domain::create(p, n);
  const FlowParams params = resolve_params(o, raw.value("params", Json::object()), domain->grid());
  const ProductSplit& split = *p.product_split();
  const SmoothPart perturbation{std::vector<int>(p.dim(), n), pert.sample(p, domain->grid())};
  const TheoremResult result = theorem_experiment(*split.first, *split.second, perturbation, params);

  Json j = io::flow_report_to_json(result.report);
  j["config"] = {{"polytope", io::polytope_to_json(p)},
                 {"grid_n", n},
                 {"perturbation", pert.to_json()},
                 {"params", io::flow_params_to_json(params)}};
  j["verdict"] = result.verdict;
  j["final_positive"] = result.final_positive;
  j["initial_defect"] = result.initial_defect;
  j["final_defect"] = result.final_defect;
  j["final_parts"] = {{"g1", result.final_parts.g1}, {"g2", result.final_parts.g2}};
  io::write_text(o.out, dump(j));
  io::write_text(series_path(o), io::series_to_csv(result.report.series));
  return result.verdict ? 0 : 1;
}

void add_polytope_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--builtin", o.builtin, "Built-in polytope: interval, square, box, simplex2, simplex");
  cmd->add_option("--polytope", o.polytope_file, "Polytope spec (JSON)");
  cmd->add_option("--grid", o.grid, "Grid points per axis")->check(CLI::Range(2, 1 << 20));
  cmd->add_option("--amplitude", o.amplitude, "Amplitude of the default bump perturbation");
}

void add_flow_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--tol-energy", o.tol_energy, "Convergence threshold on the Calabi energy");
  cmd->add_option("--tol-defect", o.tol_defect, "Separability defect tolerance");
  cmd->add_option("--t-max", o.t_max, "Flow time limit");
  cmd->add_option("--dt-init", o.dt_init, "Initial and maximal time step");
  cmd->add_option("--max-steps", o.max_steps, "Accepted step limit");
  cmd->add_option("--series-stride", o.series_stride, "Record every k-th accepted step");
  cmd->add_option("--series", o.series, "Series CSV path (default: series.csv next to --out)");
}

}  // namespace

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Toric Calabi flow experiments", "toricflow"};
  app.require_subcommand(1);
  Options o;

  auto* sc = app.add_subcommand("scalar-curvature", "Write S, theta and S - theta at every node as CSV");
  add_polytope_options(sc, o);
  sc->add_option("--potential", o.potential_file, "Potential file (JSON)");
  sc->add_option("--out", o.out, "Output CSV (default: stdout)");

  auto* pr = app.add_subcommand("project", "Project a product potential onto separable potentials");
  add_polytope_options(pr, o);
  pr->add_option("--potential", o.potential_file, "Potential file (JSON)");
  pr->add_option("--out", o.out, "Output JSON report (default: stdout)");

  auto* fl = app.add_subcommand("flow", "Run the modified Calabi flow from a config");
  add_polytope_options(fl, o);
  add_flow_options(fl, o);
  fl->add_option("--config", o.config_file, "Flow config (JSON)")->required();
  fl->add_option("--out", o.out, "Report JSON (default: report.json)");

  auto* vt = app.add_subcommand("verify-theorem", "Flow a perturbed product potential and test separability of the limit");
  add_polytope_options(vt, o);
  add_flow_options(vt, o);
  vt->add_option("--config", o.config_file, "Flow config supplying defaults (JSON)");
  vt->add_option("--out", o.out, "Report JSON (default: report.json)");

  auto* st = app.add_subcommand("selftest", "Run the built-in closed-form checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*sc) return scalar_curvature_cmd(o, out);
    if (*pr) return project_cmd(o, out);
    if ((*fl || *vt) && o.out.empty()) o.out = "report.json";
    if (*fl) return flow_cmd(o);
    if (*vt) return verify_theorem_cmd(o);
    if (*st) return selftest(out) ? 0 : 1;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace toricflow::cli
