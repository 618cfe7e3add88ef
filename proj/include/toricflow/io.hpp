#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "toricflow/flow.hpp"
#include "toricflow/polytope.hpp"
#include "toricflow/potential.hpp"

namespace toricflow::io {

using Json = nlohmann::json;

/// "%.17g": every artifact formats doubles this way.
std::string format_double(double v);

/// Polytope spec: {"dim", "facets": [{"normal", "offset"}]},
/// {"builtin": "interval|box|square|simplex|simplex2", "params": {...}} or
/// {"product": [spec, spec]}.
DelzantPolytope parse_polytope(const Json& spec);
DelzantPolytope builtin_polytope(std::string_view name, const Json& params = Json::object());
Json polytope_to_json(const DelzantPolytope& polytope);

Json read_json(const std::filesystem::path& path, std::string_view what);
void write_text(const std::filesystem::path& path, const std::string& text);

/// {"n_per_axis": [...], "values": [...]}.
SmoothPart parse_smooth_part(const Json& j);
Json smooth_part_to_json(const SmoothPart& part);
/// CSV: header line "# n_per_axis n1 n2 ...", then one value per line.
std::string smooth_part_to_csv(const SmoothPart& part);
SmoothPart parse_smooth_part_csv(std::istream& in);

/// Potential file: {"polytope": spec, "smooth_part": {...}} or with
/// "smooth_part_csv": "relative/path.csv".
SymplecticPotential load_potential(const std::filesystem::path& path);

/// Smooth perturbation recipe.
///  - "polynomial": amplitude * sum_t c_t prod_i x_i^{p_ti}, coeffs = [[c, p_1..p_d], ...].
///  - "bump": amplitude * (prod_k l_k(x))^power * (c_0 + sum_i c_i x_i), coeffs
///    default [1, 1, ..., 1].
struct Perturbation {
  std::string kind = "bump";
  double amplitude = 0.0;
  std::vector<std::vector<double>> terms;  // polynomial
  std::vector<double> coeffs;              // bump affine factor
  int power = 1;

  double operator()(const DelzantPolytope& polytope, std::span<const double> x) const;
  std::vector<double> sample(const DelzantPolytope& polytope, const Grid& grid) const;
  Json to_json() const;
};

Perturbation parse_perturbation(const Json& j);

/// Applies the keys present in `j` on top of `params`.
FlowParams parse_flow_params(const Json& j, FlowParams params);
Json flow_params_to_json(const FlowParams& params);

struct FlowConfig {
  Json polytope_spec;
  int grid_n = 32;
  Perturbation perturbation;
  Json params;  // raw overrides, resolved against the grid's defaults
  std::optional<std::filesystem::path> reference;
};

FlowConfig parse_flow_config(const Json& j, const std::filesystem::path& base_dir);

Json flow_report_to_json(const FlowReport& report);
/// t, energy, distance, defect, min_eig, dt (plus step) per recorded sample.
std::string series_to_csv(const std::vector<FlowSample>& series);

}  // namespace toricflow::io
