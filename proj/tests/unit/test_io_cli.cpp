#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "toricflow/cli.hpp"
#include "toricflow/error.hpp"
#include "toricflow/io.hpp"

using namespace toricflow;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("toricflow_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path operator/(const std::string& name) const { return path / name; }
};

struct Run {
  int code;
  std::string out, err;
};

Run invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "toricflow");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_command(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("format_double keeps 17 digits") {
  CHECK(io::format_double(0.1) == "0.10000000000000001");
  CHECK(io::format_double(4.0) == "4");
}

TEST_CASE("polytope specs") {
  using io::Json;
  CHECK(io::parse_polytope(Json::parse(R"({"builtin": "interval"})")).dim() == 1);
  CHECK(io::parse_polytope(Json::parse(R"({"builtin": "square"})")).is_product());
  CHECK(io::parse_polytope(Json::parse(R"({"builtin": "simplex", "params": {"dim": 3}})")).vertices().size() == 4);
  const auto prod = io::parse_polytope(
      Json::parse(R"({"product": [{"builtin": "interval"}, {"dim": 1, "facets": [{"normal": [1], "offset": 0}, {"normal": [-1], "offset": 2}]}]})"));
  CHECK(prod.is_product());
  CHECK(prod.bounding_box().upper[1] == 2.0);
  CHECK(io::parse_polytope(io::polytope_to_json(prod)).same_shape(prod));
  CHECK_THROWS_AS(io::parse_polytope(Json::parse(R"({"builtin": "torus"})")), InvalidInput);
  CHECK_THROWS_AS(io::parse_polytope(Json::parse(R"({"dim": 1, "facets": [{"normal": "x"}]})")), InvalidInput);
  CHECK_THROWS_AS(io::parse_polytope(Json::parse("[]")), InvalidInput);
}

TEST_CASE("smooth part CSV round trip") {
  const SmoothPart p{{2, 2}, {0.1, -2.5e-17, 3.0, 1.0 / 3.0}};
  std::istringstream in(io::smooth_part_to_csv(p));
  const SmoothPart q = io::parse_smooth_part_csv(in);
  CHECK(q.n_per_axis == p.n_per_axis);
  CHECK(q.values == p.values);
}

TEST_CASE("perturbations") {
  using io::Json;
  const auto sq = io::builtin_polytope("square");
  const io::Perturbation bump = io::parse_perturbation(Json::parse(R"({"kind": "bump", "amplitude": 0.01})"));
  const std::vector<double> x{0.25, 0.5};
  CHECK(bump(sq, x) == doctest::Approx(0.01 * 0.25 * 0.75 * 0.25 * 1.75));
  const io::Perturbation poly =
      io::parse_perturbation(Json::parse(R"({"kind": "polynomial", "amplitude": 2, "coeffs": [[1, 1, 1], [3, 0, 2]]})"));
  CHECK(poly(sq, x) == doctest::Approx(2 * (0.125 + 0.75)));
  CHECK_THROWS_AS(io::parse_perturbation(Json::parse(R"({"kind": "wiggle"})")), InvalidInput);
}

TEST_CASE("CLI exit codes") {
  TempDir tmp;
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"bogus"}).code == 2);
  const Run missing = invoke({"flow", "--config", (tmp / "missing.json").string()});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("config not found") != std::string::npos);
  CHECK(invoke({"scalar-curvature", "--builtin", "dodecahedron"}).code == 2);
  CHECK(invoke({"project", "--builtin", "simplex2", "--grid", "8"}).code == 2);
  CHECK(invoke({"scalar-curvature", "--builtin", "interval", "--grid", "1"}).code == 2);
}

TEST_CASE("scalar-curvature CSV") {
  TempDir tmp;
  const Run r = invoke({"scalar-curvature", "--builtin", "interval", "--grid", "64", "--out", (tmp / "s.csv").string()});
  REQUIRE(r.code == 0);
  std::istringstream csv(slurp(tmp / "s.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "x_1,S,theta,residual");
  int rows = 0;
  while (std::getline(csv, line)) {
    ++rows;
    const double s = std::stod(line.substr(line.find(',') + 1));
    CHECK(std::abs(s - 4.0) <= 1e-9);
  }
  CHECK(rows == 64);
}

TEST_CASE("flow and verify-theorem write reports") {
  TempDir tmp;
  std::ofstream(tmp / "square.json") << R"({"dim": 2, "facets": [{"normal": [1, 0], "offset": 0}, {"normal": [-1, 0], "offset": 1}, {"normal": [0, 1], "offset": 0}, {"normal": [0, -1], "offset": 1}]})";
  const Run vt = invoke({"verify-theorem", "--polytope", (tmp / "square.json").string(), "--grid", "10", "--amplitude", "0.01",
                      "--out", (tmp / "report.json").string()});
  CHECK(vt.code == 0);
  const auto report = io::read_json(tmp / "report.json", "report");
  CHECK(report["verdict"] == true);
  CHECK(report["config"]["params"].contains("dt_min"));
  CHECK(fs::exists(tmp / "series.csv"));

  // A reference potential: the separable projection of the start.
  const Run pr = invoke({"project", "--builtin", "square", "--grid", "10", "--amplitude", "0.01"});
  REQUIRE(pr.code == 0);
  const auto projected = io::Json::parse(pr.out);
  io::Json ref{{"polytope", projected["config"]["polytope"]}, {"smooth_part", projected["smooth_part"]}};
  std::ofstream(tmp / "ref.json") << ref.dump();
  std::ofstream(tmp / "flow.json") << R"({"polytope": {"builtin": "square"}, "grid_n": 10,
    "perturbation": {"kind": "bump", "amplitude": 0.01}, "params": {"series_stride": 50}, "reference": "ref.json"})";
  const Run fl = invoke({"flow", "--config", (tmp / "flow.json").string(), "--out", (tmp / "flow_report.json").string(),
                      "--series", (tmp / "flow_series.csv").string()});
  CHECK(fl.code == 0);
  const auto fr = io::read_json(tmp / "flow_report.json", "report");
  CHECK(fr["status"] == "converged");
  CHECK(fr["final_distance"].get<double>() <= fr["initial_distance"].get<double>());
  CHECK(fr["config"]["params"]["series_stride"] == 50);

  const std::string first = slurp(tmp / "flow_report.json");
  REQUIRE(invoke({"flow", "--config", (tmp / "flow.json").string(), "--out", (tmp / "flow_report.json").string(),
               "--series", (tmp / "flow_series.csv").string()}).code == 0);
  CHECK(slurp(tmp / "flow_report.json") == first);
}

TEST_CASE("selftest passes and is deterministic") {
  const Run a = invoke({"selftest"});
  const Run b = invoke({"selftest"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("ok   scalar_curvature interval", 0) == 0);
}
