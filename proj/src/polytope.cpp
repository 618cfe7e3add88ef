#include "toricflow/polytope.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <string>

#include "toricflow/error.hpp"

namespace toricflow {

double Facet::eval(std::span<const double> x) const {
  double value = offset;
  for (std::size_t i = 0; i < normal.size(); ++i) value += normal[i] * x[i];
  return value;
}

namespace {

constexpr double kFeasibilityTol = 1e-10;

Eigen::MatrixXd normal_matrix(const std::vector<Facet>& facets, int dim) {
  Eigen::MatrixXd n(facets.size(), dim);
  for (std::size_t k = 0; k < facets.size(); ++k)
    for (int i = 0; i < dim; ++i) n(k, i) = facets[k].normal[i];
  return n;
}

// Calls fn(indices) for every size-r subset of {0..m-1}.
template <class Fn>
void for_each_subset(std::size_t m, std::size_t r, Fn&& fn) {
  std::vector<std::size_t> idx(r);
  std::iota(idx.begin(), idx.end(), 0);
  if (r > m) return;
  while (true) {
    fn(idx);
    std::size_t i = r;
    while (i > 0 && idx[i - 1] == m - r + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
}

// The recession cone {z : N z >= 0} is {0} iff N has full column rank and no
// extreme ray exists. Extreme rays of a pointed cone lie on d-1 independent
// active constraints, so it suffices to test those one-dimensional kernels.
bool is_bounded(const Eigen::MatrixXd& n) {
  const int dim = static_cast<int>(n.cols());
  if (Eigen::FullPivLU<Eigen::MatrixXd>(n).rank() < dim) return false;
  bool bounded = true;
  for_each_subset(static_cast<std::size_t>(n.rows()), static_cast<std::size_t>(dim - 1),
                  [&](const std::vector<std::size_t>& rows) {
                    if (!bounded) return;
                    Eigen::MatrixXd sub(rows.size(), dim);
                    for (std::size_t r = 0; r < rows.size(); ++r) sub.row(r) = n.row(rows[r]);
                    Eigen::VectorXd z;
                    if (rows.empty()) {
                      z = Eigen::VectorXd::Unit(dim, 0);
                    } else {
                      Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
                      if (lu.rank() != dim - 1) return;
                      z = lu.kernel().col(0);
                    }
                    for (double sign : {1.0, -1.0}) {
                      const Eigen::VectorXd dirs = n * (sign * z);
                      if ((dirs.array() >= -kFeasibilityTol * z.norm()).all()) bounded = false;
                    }
                  });
  return bounded;
}

std::vector<std::vector<double>> enumerate_vertices(const std::vector<Facet>& facets, int dim) {
  const Eigen::MatrixXd n = normal_matrix(facets, dim);
  std::vector<std::vector<double>> vertices;
  for_each_subset(facets.size(), static_cast<std::size_t>(dim),
                  [&](const std::vector<std::size_t>& rows) {
                    Eigen::MatrixXd a(dim, dim);
                    Eigen::VectorXd b(dim);
                    for (int r = 0; r < dim; ++r) {
                      a.row(r) = n.row(rows[r]);
                      b(r) = -facets[rows[r]].offset;
                    }
                    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
                    if (lu.rank() < dim) return;
                    const Eigen::VectorXd v = lu.solve(b);
                    std::vector<double> p(v.data(), v.data() + dim);
                    const double scale = 1.0 + v.cwiseAbs().maxCoeff();
                    for (const Facet& f : facets)
                      if (f.eval(p) < -kFeasibilityTol * scale) return;
                    for (const auto& q : vertices) {
                      double gap = 0.0;
                      for (int i = 0; i < dim; ++i) gap = std::max(gap, std::abs(q[i] - p[i]));
                      if (gap <= kFeasibilityTol * scale) return;
                    }
                    vertices.push_back(std::move(p));
                  });
  return vertices;
}

void validate_facet(const Facet& facet, int dim, std::size_t k) {
  if (static_cast<int>(facet.normal.size()) != dim)
    throw InvalidInput("facet " + std::to_string(k) + ": normal has " +
                       std::to_string(facet.normal.size()) + " entries, expected " +
                       std::to_string(dim));
  int g = 0;
  for (int c : facet.normal) g = std::gcd(g, std::abs(c));
  if (g == 0) throw InvalidInput("facet " + std::to_string(k) + ": zero normal");
  if (g != 1) throw InvalidInput("facet " + std::to_string(k) + ": normal is not primitive");
  if (!std::isfinite(facet.offset))
    throw InvalidInput("facet " + std::to_string(k) + ": offset is not finite");
}

}  // namespace

DelzantPolytope::DelzantPolytope(int dim, std::vector<Facet> facets)
    : dim_(dim), facets_(std::move(facets)) {
  if (dim_ < 1) throw InvalidInput("polytope dimension must be positive");
  if (facets_.size() < static_cast<std::size_t>(dim_) + 1)
    throw InvalidInput("a bounded polytope in dimension " + std::to_string(dim_) +
                       " needs at least " + std::to_string(dim_ + 1) + " facets");
  for (std::size_t k = 0; k < facets_.size(); ++k) validate_facet(facets_[k], dim_, k);

  if (!is_bounded(normal_matrix(facets_, dim_))) throw InvalidInput("polytope is unbounded");
  vertices_ = enumerate_vertices(facets_, dim_);
  if (vertices_.empty()) throw InvalidInput("polytope is empty");

  barycenter_.assign(dim_, 0.0);
  bbox_.lower.assign(dim_, std::numeric_limits<double>::infinity());
  bbox_.upper.assign(dim_, -std::numeric_limits<double>::infinity());
  for (const auto& v : vertices_) {
    for (int i = 0; i < dim_; ++i) {
      barycenter_[i] += v[i] / static_cast<double>(vertices_.size());
      bbox_.lower[i] = std::min(bbox_.lower[i], v[i]);
      bbox_.upper[i] = std::max(bbox_.upper[i], v[i]);
    }
  }
  for (std::size_t k = 0; k < facets_.size(); ++k) {
    if (!(facets_[k].eval(barycenter_) > 0.0))
      throw InvalidInput("facet " + std::to_string(k) +
                         " is not positive at the barycenter (empty interior or wrong "
                         "orientation)");
  }
}

DelzantPolytope DelzantPolytope::interval(double a, double b) {
  if (!(a < b)) throw InvalidInput("interval needs a < b");
  return DelzantPolytope(1, {Facet{{1}, -a}, Facet{{-1}, b}});
}

DelzantPolytope DelzantPolytope::box(std::span<const double> lower,
                                     std::span<const double> upper) {
  if (lower.empty() || lower.size() != upper.size())
    throw InvalidInput("box needs matching nonempty lower/upper corners");
  DelzantPolytope result = interval(lower.back(), upper.back());
  for (std::size_t i = lower.size() - 1; i-- > 0;)
    result = build_product(interval(lower[i], upper[i]), result);
  return result;
}

DelzantPolytope DelzantPolytope::simplex(int dim, double scale) {
  if (dim < 1) throw InvalidInput("simplex dimension must be positive");
  if (!(scale > 0.0)) throw InvalidInput("simplex scale must be positive");
  std::vector<Facet> facets;
  for (int i = 0; i < dim; ++i) {
    Facet f{std::vector<int>(dim, 0), 0.0};
    f.normal[i] = 1;
    facets.push_back(std::move(f));
  }
  facets.push_back(Facet{std::vector<int>(dim, -1), scale});
  return DelzantPolytope(dim, std::move(facets));
}

bool DelzantPolytope::same_shape(const DelzantPolytope& other) const {
  return dim_ == other.dim_ && facets_ == other.facets_;
}

DelzantPolytope build_product(const DelzantPolytope& p1, const DelzantPolytope& p2) {
  const int d1 = p1.dim();
  const int d2 = p2.dim();
  std::vector<Facet> facets;
  ProductSplit split;
  split.first = std::make_shared<const DelzantPolytope>(p1);
  split.second = std::make_shared<const DelzantPolytope>(p2);
  for (int i = 0; i < d1; ++i) split.block1.push_back(i);
  for (int i = 0; i < d2; ++i) split.block2.push_back(d1 + i);
  for (const Facet& f : p1.facets()) {
    Facet padded{std::vector<int>(d1 + d2, 0), f.offset};
    std::copy(f.normal.begin(), f.normal.end(), padded.normal.begin());
    split.facets1.push_back(facets.size());
    facets.push_back(std::move(padded));
  }
  for (const Facet& f : p2.facets()) {
    Facet padded{std::vector<int>(d1 + d2, 0), f.offset};
    std::copy(f.normal.begin(), f.normal.end(), padded.normal.begin() + d1);
    split.facets2.push_back(facets.size());
    facets.push_back(std::move(padded));
  }
  DelzantPolytope product(d1 + d2, std::move(facets));
  // Take the box from the factors so product and factor grids share
  // bit-identical spacings and cell centres.
  product.bbox_.lower = p1.bounding_box().lower;
  product.bbox_.upper = p1.bounding_box().upper;
  product.bbox_.lower.insert(product.bbox_.lower.end(), p2.bounding_box().lower.begin(),
                             p2.bounding_box().lower.end());
  product.bbox_.upper.insert(product.bbox_.upper.end(), p2.bounding_box().upper.begin(),
                             p2.bounding_box().upper.end());
  product.split_ = std::move(split);
  return product;
}

std::optional<DelzantPolytope> detect_product(const DelzantPolytope& polytope) {
  if (polytope.is_product()) return polytope;
  const int d = polytope.dim();
  for (int k = 1; k < d; ++k) {
    std::vector<Facet> first, second;
    bool splits = true;
    for (const Facet& f : polytope.facets()) {
      const bool in_first = std::all_of(f.normal.begin() + k, f.normal.end(), [](int c) { return c == 0; });
      const bool in_second = std::all_of(f.normal.begin(), f.normal.begin() + k, [](int c) { return c == 0; });
      if (in_first) {
        first.push_back(Facet{{f.normal.begin(), f.normal.begin() + k}, f.offset});
      } else if (in_second) {
        second.push_back(Facet{{f.normal.begin() + k, f.normal.end()}, f.offset});
      } else {
        splits = false;
        break;
      }
    }
    if (!splits) continue;
    try {
      return build_product(DelzantPolytope(k, std::move(first)), DelzantPolytope(d - k, std::move(second)));
    } catch (const InvalidInput&) {
      continue;
    }
  }
  return std::nullopt;
}

}  // namespace toricflow
