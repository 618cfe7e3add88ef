#include "toricflow/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "toricflow/error.hpp"

namespace toricflow::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("bad value for \"") + key + "\": " + e.what());
  }
}

}  // namespace

DelzantPolytope builtin_polytope(std::string_view name, const Json& params) {
  if (name == "interval") return DelzantPolytope::interval(get_or(params, "a", 0.0), get_or(params, "b", 1.0));
  if (name == "square" || name == "box") {
    const auto lower = get_or(params, "lower", std::vector<double>{0.0, 0.0});
    const auto upper = get_or(params, "upper", std::vector<double>(lower.size(), 1.0));
    return DelzantPolytope::box(lower, upper);
  }
  if (name == "simplex2") return DelzantPolytope::simplex(2, get_or(params, "scale", 1.0));
  if (name == "simplex")
    return DelzantPolytope::simplex(get_or(params, "dim", 2), get_or(params, "scale", 1.0));
  throw InvalidInput("unknown builtin polytope \"" + std::string(name) + "\"");
}

DelzantPolytope parse_polytope(const Json& spec) {
  if (!spec.is_object()) throw InvalidInput("polytope spec must be a JSON object");
  if (spec.contains("builtin")) {
    if (!spec["builtin"].is_string()) throw InvalidInput("\"builtin\" must be a string");
    return builtin_polytope(spec["builtin"].get<std::string>(),
                            spec.value("params", Json::object()));
  }
  if (spec.contains("product")) {
    const Json& parts = spec["product"];
    if (!parts.is_array() || parts.size() != 2)
      throw InvalidInput("\"product\" must list exactly two polytope specs");
    return build_product(parse_polytope(parts[0]), parse_polytope(parts[1]));
  }
  if (!spec.contains("dim") || !spec.contains("facets"))
    throw InvalidInput("polytope spec needs \"builtin\", \"product\" or \"dim\" + \"facets\"");
  const int dim = get_or(spec, "dim", 0);
  std::vector<Facet> facets;
  if (!spec["facets"].is_array()) throw InvalidInput("\"facets\" must be an array");
  for (const Json& f : spec["facets"]) {
    if (!f.is_object() || !f.contains("normal"))
      throw InvalidInput("each facet needs a \"normal\"");
    facets.push_back(Facet{get_or(f, "normal", std::vector<int>{}), get_or(f, "offset", 0.0)});
  }
  return DelzantPolytope(dim, std::move(facets));
}

Json polytope_to_json(const DelzantPolytope& polytope) {
  if (const ProductSplit* split = polytope.product_split())
    return Json{{"product", {polytope_to_json(*split->first), polytope_to_json(*split->second)}}};
  Json facets = Json::array();
  for (const Facet& f : polytope.facets()) facets.push_back({{"normal", f.normal}, {"offset", f.offset}});
  return Json{{"dim", polytope.dim()}, {"facets", facets}};
}

Json read_json(const std::filesystem::path& path, std::string_view what) {
  std::ifstream in(path);
  if (!in) throw InvalidInput(std::string(what) + " not found: " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InvalidInput(std::string(what) + " is not valid JSON: " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << text;
}

SmoothPart parse_smooth_part(const Json& j) {
  if (!j.is_object()) throw InvalidInput("smooth part must be a JSON object");
  SmoothPart part;
  part.n_per_axis = get_or(j, "n_per_axis", std::vector<int>{});
  part.values = get_or(j, "values", std::vector<double>{});
  if (part.n_per_axis.empty()) throw InvalidInput("smooth part needs \"n_per_axis\"");
  return part;
}

Json smooth_part_to_json(const SmoothPart& part) {
  return Json{{"n_per_axis", part.n_per_axis}, {"values", part.values}};
}

std::string smooth_part_to_csv(const SmoothPart& part) {
  std::string out = "# n_per_axis";
  for (int n : part.n_per_axis) out += ' ' + std::to_string(n);
  out += '\n';
  for (double v : part.values) out += format_double(v) + '\n';
  return out;
}

SmoothPart parse_smooth_part_csv(std::istream& in) {
  SmoothPart part;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# n_per_axis", 0) != 0)
    throw InvalidInput("smooth part CSV must start with \"# n_per_axis\"");
  std::istringstream header(line.substr(12));
  for (int n; header >> n;) part.n_per_axis.push_back(n);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      std::size_t used = 0;
      part.values.push_back(std::stod(line, &used));
    } catch (const std::exception&) {
      throw InvalidInput("bad value in smooth part CSV: \"" + line + "\"");
    }
  }
  return part;
}

SymplecticPotential load_potential(const std::filesystem::path& path) {
  const Json j = read_json(path, "potential file");
  if (!j.contains("polytope")) throw InvalidInput("potential file needs \"polytope\"");
  const DelzantPolytope polytope = parse_polytope(j["polytope"]);
  SmoothPart part;
  if (j.contains("smooth_part")) {
    part = parse_smooth_part(j["smooth_part"]);
  } else if (j.contains("smooth_part_csv")) {
    const auto csv = path.parent_path() / j["smooth_part_csv"].get<std::string>();
    std::ifstream in(csv);
    if (!in) throw InvalidInput("smooth part CSV not found: " + csv.string());
    part = parse_smooth_part_csv(in);
  } else {
    throw InvalidInput("potential file needs \"smooth_part\" or \"smooth_part_csv\"");
  }
  if (static_cast<int>(part.n_per_axis.size()) != polytope.dim())
    throw InvalidInput("smooth part n_per_axis does not match the polytope dimension");
  for (int n : part.n_per_axis)
    if (n != part.n_per_axis.front()) throw InvalidInput("grids use the same n on every axis");
  auto domain = Domain::create(polytope, part.n_per_axis.front());
  if (part.values.empty()) part.values.assign(domain->size(), 0.0);
  return SymplecticPotential(std::move(domain), std::move(part.values));
}

double Perturbation::operator()(const DelzantPolytope& polytope, std::span<const double> x) const {
  const int d = polytope.dim();
  if (kind == "polynomial") {
    double total = 0.0;
    for (const auto& t : terms) {
      double term = t[0];
      for (int i = 0; i < d; ++i) term *= std::pow(x[i], t[i + 1]);
      total += term;
    }
    return amplitude * total;
  }
  double bump = 1.0;
  for (const Facet& f : polytope.facets()) bump *= f.eval(x);
  double affine = coeffs.empty() ? 1.0 : coeffs[0];
  for (int i = 0; i < d; ++i)
    affine += (coeffs.empty() ? 1.0 : coeffs[i + 1]) * x[i];
  return amplitude * std::pow(bump, power) * affine;
}

std::vector<double> Perturbation::sample(const DelzantPolytope& polytope, const Grid& grid) const {
  if (kind == "polynomial") {
    for (const auto& t : terms)
      if (static_cast<int>(t.size()) != polytope.dim() + 1)
        throw InvalidInput("polynomial terms need [c, p_1, ..., p_d]");
  } else if (!coeffs.empty() && static_cast<int>(coeffs.size()) != polytope.dim() + 1) {
    throw InvalidInput("bump coeffs need d + 1 entries");
  }
  return toricflow::sample(grid, [&](std::span<const double> x) { return (*this)(polytope, x); });
}

Json Perturbation::to_json() const {
  Json j{{"kind", kind}, {"amplitude", amplitude}};
  if (kind == "polynomial") {
    j["coeffs"] = terms;
  } else {
    j["coeffs"] = coeffs;
    j["power"] = power;
  }
  return j;
}

Perturbation parse_perturbation(const Json& j) {
  Perturbation p;
  p.kind = get_or(j, "kind", std::string("bump"));
  p.amplitude = get_or(j, "amplitude", 0.0);
  if (p.kind == "polynomial") {
    p.terms = get_or(j, "coeffs", std::vector<std::vector<double>>{});
  } else if (p.kind == "bump") {
    p.coeffs = get_or(j, "coeffs", std::vector<double>{});
    p.power = get_or(j, "power", 1);
    if (p.power < 1) throw InvalidInput("bump power must be at least 1");
  } else {
    throw InvalidInput("unknown perturbation kind \"" + p.kind + "\"");
  }
  return p;
}

FlowParams parse_flow_params(const Json& j, FlowParams p) {
  if (!j.is_object()) throw InvalidInput("\"params\" must be an object");
  p.dt_init = get_or(j, "dt_init", p.dt_init);
  p.dt_min = get_or(j, "dt_min", std::min(p.dt_min, p.dt_init));
  p.dt_growth = get_or(j, "dt_growth", p.dt_growth);
  p.t_max = get_or(j, "t_max", p.t_max);
  p.max_steps = get_or(j, "max_steps", p.max_steps);
  p.tol_energy = get_or(j, "tol_energy", p.tol_energy);
  p.tol_defect = get_or(j, "tol_defect", p.tol_defect);
  p.positivity_margin = get_or(j, "positivity_margin", p.positivity_margin);
  p.series_stride = get_or(j, "series_stride", p.series_stride);
  p.validate();
  return p;
}

Json flow_params_to_json(const FlowParams& p) {
  return Json{{"dt_init", p.dt_init},
              {"dt_min", p.dt_min},
              {"dt_growth", p.dt_growth},
              {"t_max", p.t_max},
              {"max_steps", p.max_steps},
              {"tol_energy", p.tol_energy},
              {"tol_defect", p.tol_defect},
              {"positivity_margin", p.positivity_margin},
              {"series_stride", p.series_stride}};
}

FlowConfig parse_flow_config(const Json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw InvalidInput("flow config must be a JSON object");
  if (!j.contains("polytope")) throw InvalidInput("flow config needs \"polytope\"");
  FlowConfig c;
  c.polytope_spec = j["polytope"];
  c.grid_n = get_or(j, "grid_n", c.grid_n);
  if (j.contains("perturbation")) c.perturbation = parse_perturbation(j["perturbation"]);
  c.params = j.value("params", Json::object());
  if (j.contains("reference")) c.reference = base_dir / j["reference"].get<std::string>();
  return c;
}

namespace {

Json nullable(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json flow_report_to_json(const FlowReport& r) {
  const FlowMonitors& m = r.monitors;
  Json j{{"status", std::string(to_string(r.status))},
         {"params", flow_params_to_json(r.params)},
         {"accepted_steps", m.accepted_steps},
         {"rejected_steps", m.rejected_steps},
         {"final_time", r.series.back().t},
         {"initial_energy", m.initial_energy},
         {"final_energy", m.final_energy},
         {"max_energy_increase", m.max_energy_increase},
         {"initial_defect", nullable(m.initial_defect)},
         {"final_defect", nullable(m.final_defect)},
         {"max_defect", nullable(m.max_defect)},
         {"initial_distance", nullable(m.initial_distance)},
         {"final_distance", nullable(m.final_distance)},
         {"initial_moments", m.initial_moments},
         {"moment_drift_per_1000", m.moment_drift_per_1000},
         {"final_min_eigenvalue", r.series.back().min_eigenvalue},
         {"final_theta", {{"constant", r.final_theta.constant}, {"linear", r.final_theta.linear}}}};
  if (r.final_potential) j["final_smooth_part"] = smooth_part_to_json(r.final_potential->smooth_part());
  if (r.final_parts) j["final_parts"] = {{"g1", r.final_parts->g1}, {"g2", r.final_parts->g2}};
  return j;
}

std::string series_to_csv(const std::vector<FlowSample>& series) {
  std::string out = "step,t,energy,distance,defect,min_eig,dt\n";
  for (const FlowSample& s : series) {
    out += std::to_string(s.step);
    for (double v : {s.t, s.energy, s.distance, s.defect, s.min_eigenvalue, s.dt}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace toricflow::io
