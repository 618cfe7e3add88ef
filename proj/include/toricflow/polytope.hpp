#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace toricflow {

/// Affine facet function l(x) = <normal, x> + offset, nonnegative on the
/// polytope. The normal is a primitive inward lattice vector.
struct Facet {
  std::vector<int> normal;
  double offset = 0.0;

  double eval(std::span<const double> x) const;
  bool operator==(const Facet&) const = default;
};

class DelzantPolytope;

/// Records that a polytope is P1 x P2: coordinates [0, dim1) belong to the
/// first factor and [dim1, dim) to the second; facets are listed first-factor
/// first, each supported on its own block.
struct ProductSplit {
  std::shared_ptr<const DelzantPolytope> first;
  std::shared_ptr<const DelzantPolytope> second;
  std::vector<int> block1;
  std::vector<int> block2;
  std::vector<std::size_t> facets1;
  std::vector<std::size_t> facets2;
};

struct BoundingBox {
  std::vector<double> lower;
  std::vector<double> upper;
};

/// Convex polytope {x : l_k(x) >= 0 for all k} with primitive integer normals.
///
/// Construction validates primitivity, nonempty interior and boundedness.
/// The Delzant vertex condition is not checked; the built-in constructors
/// (interval, box, simplex and their products) satisfy it.
class DelzantPolytope {
 public:
  DelzantPolytope(int dim, std::vector<Facet> facets);

  static DelzantPolytope interval(double a, double b);
  /// Axis-aligned box built as an iterated product of intervals, so it
  /// carries a product split (first axis, remaining axes) when dim >= 2.
  static DelzantPolytope box(std::span<const double> lower, std::span<const double> upper);
  /// {x_i >= 0, sum x_i <= scale}.
  static DelzantPolytope simplex(int dim, double scale = 1.0);

  int dim() const { return dim_; }
  const std::vector<Facet>& facets() const { return facets_; }
  const std::vector<std::vector<double>>& vertices() const { return vertices_; }
  /// Vertex average; strictly interior.
  const std::vector<double>& barycenter() const { return barycenter_; }
  const BoundingBox& bounding_box() const { return bbox_; }

  bool is_product() const { return split_.has_value(); }
  const ProductSplit* product_split() const { return split_ ? &*split_ : nullptr; }

  /// Same facet presentation (product structure is not compared).
  bool same_shape(const DelzantPolytope& other) const;

 private:
  friend DelzantPolytope build_product(const DelzantPolytope&, const DelzantPolytope&);

  int dim_;
  std::vector<Facet> facets_;
  std::vector<std::vector<double>> vertices_;
  std::vector<double> barycenter_;
  BoundingBox bbox_;
  std::optional<ProductSplit> split_;
};

/// P1 x P2 with zero-padded facets and a recorded product split.
DelzantPolytope build_product(const DelzantPolytope& p1, const DelzantPolytope& p2);

/// Recovers a product structure from a plain facet list when the coordinates
/// split as [0, k) x [k, dim) with every facet supported on one block.
/// Returns the polytope unchanged if it already has a split, nullopt if none
/// exists.
std::optional<DelzantPolytope> detect_product(const DelzantPolytope& polytope);

}  // namespace toricflow
