#pragma once

#include <json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gausscap/model_space.hpp"

namespace gausscap {

/// Constructive subset of R^n: ball, slab, finite union, complement.
/// Radius or halfwidth 0 is allowed and gives a point or a hyperplane; all
/// primitives are closed. The empty set is a union with no parts, the whole
/// space its complement.
struct RegionSpec {
  enum class Kind { ball, slab, union_of, complement };

  Kind kind = Kind::union_of;
  std::vector<double> center;
  double radius = 0.0;
  std::vector<double> normal;
  double offset = 0.0;
  double halfwidth = 0.0;
  std::vector<RegionSpec> parts;
  /// Open-fattening width used for node masks; unset means "caller default".
  std::optional<double> margin;

  static RegionSpec ball(std::vector<double> center, double radius);
  static RegionSpec slab(std::vector<double> normal, double offset, double halfwidth);
  static RegionSpec unite(std::vector<RegionSpec> parts);
  static RegionSpec complement_of(RegionSpec inner);
  static RegionSpec empty();
  static RegionSpec full();

  /// Throws ValidationError for bad shapes, dimensions or non-unit normals.
  void validate(int n) const;
  [[nodiscard]] bool is_empty() const;
  [[nodiscard]] bool is_full() const;

  [[nodiscard]] bool contains(std::span<const double> x) const { return fattened(x, 0.0); }
  /// x within distance m of the set (exact for balls and slabs; unions and
  /// complements are handled part by part).
  [[nodiscard]] bool fattened(std::span<const double> x, double m) const;
  /// x at distance > m from the complement (part-by-part for unions).
  [[nodiscard]] bool eroded(std::span<const double> x, double m) const;

  /// {y in R^m : E_F y + E_C x in A} for orthonormal column bases E_F (n x m)
  /// and E_C (n x (n - m)).
  [[nodiscard]] RegionSpec section(const Eigen::MatrixXd& EF, const Eigen::MatrixXd& EC,
                                   std::span<const double> x) const;

  [[nodiscard]] std::string describe() const;
};

/// One flag per grid node: node within `margin` of U.
std::vector<char> node_mask(const RegionSpec& U, const QuadGrid& grid, double margin);

nlohmann::ordered_json region_to_json(const RegionSpec& U);
/// Accepts {"ball": {center, radius}}, {"slab": {normal, offset, halfwidth}},
/// {"union": [...]}, {"complement": {...}}, "empty", "full"; optional "margin"
/// next to the shape key. Unknown keys are rejected.
RegionSpec region_from_json(const nlohmann::json& j);

}  // namespace gausscap
