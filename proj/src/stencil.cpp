#include "toricflow/stencil.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <sstream>

#include "toricflow/error.hpp"
#include "toricflow/kernels/kernels.hpp"

namespace toricflow {

void Stencil::apply(std::span<const double> in, std::span<double> out) const {
  kernels::stencil2(ia, ib, ca, cb, in, out);
  for (const FittedRow& row : fitted) {
    const double center = in[row.node];
    double acc = 0.0;
    for (std::size_t m = 0; m < row.support.size(); ++m)
      acc += row.weights[m] * (in[row.support[m]] - center);
    out[row.node] = acc;
  }
}

namespace {

constexpr int kMaxFitRadius = 4;
// Reject local fits whose scaled design matrix is worse conditioned than this.
constexpr double kMinSingularRatio = 1e-4;

std::string describe(const Grid& grid, std::size_t node) {
  std::ostringstream os;
  os.precision(17);
  os << "node " << node << " (lattice";
  for (int a = 0; a < grid.dim(); ++a) os << ' ' << grid.lattice(node, a);
  os << "; x =";
  for (int a = 0; a < grid.dim(); ++a) os << ' ' << grid.coords(a)[node];
  os << ')';
  return os.str();
}

struct LocalFit {
  std::vector<std::int32_t> support;
  Eigen::MatrixXd pinv;  // rows: d gradient terms, then d pure second terms
};

// Least-squares quadratic fit of f(p + dx) - f(p) over lattice neighbours of
// growing radius. Columns use coordinates scaled by the spacing.
std::optional<LocalFit> fit_quadratic(const Grid& grid, std::size_t node) {
  const int d = grid.dim();
  const int q = d + d * (d + 1) / 2;
  const auto h = grid.spacing();
  for (int radius = 1; radius <= kMaxFitRadius; ++radius) {
    std::vector<std::int32_t> support;
    std::vector<int> offset(d, -radius);
    std::vector<int> cell(d);
    while (true) {
      bool self = true;
      for (int a = 0; a < d; ++a) {
        cell[a] = grid.lattice(node, a) + offset[a];
        self = self && offset[a] == 0;
      }
      if (!self) {
        const std::int64_t m = grid.node_at(cell);
        if (m >= 0) support.push_back(static_cast<std::int32_t>(m));
      }
      int a = d - 1;
      while (a >= 0 && offset[a] == radius) offset[a--] = -radius;
      if (a < 0) break;
      ++offset[a];
    }
    if (static_cast<int>(support.size()) < q) continue;

    Eigen::MatrixXd design(support.size(), q);
    for (std::size_t r = 0; r < support.size(); ++r) {
      std::vector<double> s(d);
      for (int a = 0; a < d; ++a) s[a] = (grid.coords(a)[support[r]] - grid.coords(a)[node]) / h[a];
      int col = 0;
      for (int a = 0; a < d; ++a) design(r, col++) = s[a];
      for (int a = 0; a < d; ++a) design(r, col++) = 0.5 * s[a] * s[a];
      for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b) design(r, col++) = s[a] * s[b];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();
    if (sigma(q - 1) < kMinSingularRatio * sigma(0)) continue;
    LocalFit fit;
    fit.support = std::move(support);
    fit.pinv = svd.matrixV() * sigma.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
    return fit;
  }
  return std::nullopt;
}

enum class Kind { kFirst, kSecond };

// Fills row `node` of `out` with a 3-point line stencil; false if none fits.
bool line_stencil(const Grid& grid, std::size_t node, int axis, Kind kind, Stencil& out) {
  const double h = grid.spacing()[axis];
  const std::int64_t p1 = grid.neighbor(node, axis, 1);
  const std::int64_t m1 = grid.neighbor(node, axis, -1);
  auto set = [&](std::int64_t a, double wa, std::int64_t b, double wb) {
    out.ia[node] = static_cast<std::int32_t>(a);
    out.ib[node] = static_cast<std::int32_t>(b);
    out.ca[node] = wa;
    out.cb[node] = wb;
    return true;
  };
  if (p1 >= 0 && m1 >= 0) {
    return kind == Kind::kFirst ? set(p1, 0.5 / h, m1, -0.5 / h)
                                : set(p1, 1.0 / (h * h), m1, 1.0 / (h * h));
  }
  if (p1 >= 0) {
    const std::int64_t p2 = grid.neighbor(node, axis, 2);
    if (p2 >= 0) {
      // (-3 f0 + 4 f1 - f2) / 2h  and  f0 - 2 f1 + f2 over h^2.
      return kind == Kind::kFirst ? set(p1, 2.0 / h, p2, -0.5 / h)
                                  : set(p1, -2.0 / (h * h), p2, 1.0 / (h * h));
    }
  }
  if (m1 >= 0) {
    const std::int64_t m2 = grid.neighbor(node, axis, -2);
    if (m2 >= 0) {
      return kind == Kind::kFirst ? set(m1, -2.0 / h, m2, 0.5 / h)
                                  : set(m1, -2.0 / (h * h), m2, 1.0 / (h * h));
    }
  }
  return false;
}

Stencil blank(std::size_t n) {
  Stencil s;
  s.ia.resize(n);
  s.ib.resize(n);
  s.ca.assign(n, 0.0);
  s.cb.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) s.ia[i] = s.ib[i] = static_cast<std::int32_t>(i);
  return s;
}

}  // namespace

DifferenceOperators::DifferenceOperators(const Grid& grid) {
  const int d = grid.dim();
  const std::size_t n = grid.size();
  first_.assign(d, blank(n));
  second_.assign(d, blank(n));
  const auto h = grid.spacing();

  for (std::size_t node = 0; node < n; ++node) {
    std::optional<LocalFit> fit;
    bool tried = false;
    for (int axis = 0; axis < d; ++axis) {
      for (Kind kind : {Kind::kFirst, Kind::kSecond}) {
        Stencil& target = kind == Kind::kFirst ? first_[axis] : second_[axis];
        if (line_stencil(grid, node, axis, kind, target)) continue;
        if (!tried) {
          fit = fit_quadratic(grid, node);
          tried = true;
        }
        if (!fit)
          throw NumericalError("no difference stencil fits at " + describe(grid, node) +
                               "; the grid is too coarse");
        const int row = kind == Kind::kFirst ? axis : d + axis;
        const double scale = kind == Kind::kFirst ? 1.0 / h[axis] : 1.0 / (h[axis] * h[axis]);
        Stencil::FittedRow fitted{node, fit->support, {}};
        fitted.weights.resize(fit->support.size());
        for (std::size_t m = 0; m < fit->support.size(); ++m)
          fitted.weights[m] = fit->pinv(row, static_cast<Eigen::Index>(m)) * scale;
        target.fitted.push_back(std::move(fitted));
      }
    }
  }
}

void DifferenceOperators::mixed(int j, int k, std::span<const double> in, std::span<double> out,
                                std::span<double> scratch) const {
  const std::size_t n = size();
  auto inner = scratch.subspan(0, n);
  auto outer = scratch.subspan(n, n);
  first_[k].apply(in, inner);
  first_[j].apply(inner, outer);
  first_[j].apply(in, inner);
  first_[k].apply(inner, out);
  for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * (out[i] + outer[i]);
}

std::size_t DifferenceOperators::fitted_rows() const {
  std::size_t total = 0;
  for (const auto& s : first_) total += s.fitted.size();
  for (const auto& s : second_) total += s.fitted.size();
  return total;
}

}  // namespace toricflow
