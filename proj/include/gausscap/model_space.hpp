#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <json.hpp>
#include <span>
#include <vector>

#include "gausscap/multi_index.hpp"

namespace gausscap {

/// Pointwise function on R^n.
using ScalarField = std::function<double(std::span<const double>)>;

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Finite-dimensional Gaussian model space (R^n, standard Gaussian):
/// ambient dimension n, maximal total Hermite degree K, quadrature order Q
/// per axis.
struct GaussModelSpace {
  int n = 1;
  int K = 0;
  int Q = 1;

  /// Throws ValidationError unless n >= 1, K >= 0 and Q >= K + 1.
  void validate() const;
  friend bool operator==(const GaussModelSpace&, const GaussModelSpace&) = default;
};

/// Normalized probabilists' Hermite polynomial h_k(x); orthonormal in
/// L^2 of the standard normal law.
double hermite_eval(int k, double x);

/// h_0(x) .. h_K(x) written into `out` (size K + 1).
void hermite_table(int K, double x, std::span<double> out);

/// Tensor Gauss-Hermite grid. Node j is row j of `nodes`; the last axis
/// varies fastest.
struct QuadGrid {
  int n = 1;
  RowMatrix nodes;
  Eigen::VectorXd weights;
  std::vector<double> axis_nodes;
  std::vector<double> axis_weights;

  [[nodiscard]] size_t size() const { return static_cast<size_t>(weights.size()); }
  [[nodiscard]] std::span<const double> node(size_t j) const {
    return {nodes.row(static_cast<Eigen::Index>(j)).data(), static_cast<size_t>(n)};
  }
  /// Smallest gap between consecutive one-dimensional nodes (0 if Q = 1).
  [[nodiscard]] double spacing() const;
};

/// Tensor Gauss-Hermite rule of order Q per axis. Fails with NumericalError
/// when the nodes or weights cannot be computed stably.
QuadGrid build_grid(const GaussModelSpace& space);

/// Coefficients over the total-degree basis |alpha| <= K.
class HermiteExpansion {
 public:
  HermiteExpansion(GaussModelSpace space, std::shared_ptr<const MultiIndexSet> basis,
                   Eigen::VectorXd coeffs);

  [[nodiscard]] const GaussModelSpace& space() const { return space_; }
  [[nodiscard]] const MultiIndexSet& basis() const { return *basis_; }
  [[nodiscard]] const std::shared_ptr<const MultiIndexSet>& basis_ptr() const { return basis_; }
  [[nodiscard]] const Eigen::VectorXd& coeffs() const { return coeffs_; }
  [[nodiscard]] Eigen::VectorXd& coeffs() { return coeffs_; }
  /// Coefficient of alpha; zero when alpha is outside the basis.
  [[nodiscard]] double coeff(const MultiIndex& alpha) const;

  [[nodiscard]] HermiteExpansion with_coeffs(Eigen::VectorXd coeffs) const;

 private:
  GaussModelSpace space_;
  std::shared_ptr<const MultiIndexSet> basis_;
  Eigen::VectorXd coeffs_;
};

/// Sum_alpha c_alpha prod_i h_{alpha_i}(x_i). Throws on dimension mismatch.
double eval(const HermiteExpansion& u, std::span<const double> x);

/// The model space together with its grid and the basis tabulated at the
/// nodes. Immutable after construction.
class SpectralGrid {
 public:
  explicit SpectralGrid(GaussModelSpace space);

  [[nodiscard]] const GaussModelSpace& space() const { return space_; }
  [[nodiscard]] const QuadGrid& grid() const { return grid_; }
  [[nodiscard]] const MultiIndexSet& basis() const { return *basis_; }
  [[nodiscard]] const std::shared_ptr<const MultiIndexSet>& basis_ptr() const { return basis_; }
  /// N x M matrix of h_alpha(x_j).
  [[nodiscard]] const Eigen::MatrixXd& basis_at_nodes() const { return basis_at_nodes_; }
  /// |alpha| per basis position.
  [[nodiscard]] const Eigen::VectorXd& orders() const { return orders_; }
  [[nodiscard]] size_t node_count() const { return grid_.size(); }
  [[nodiscard]] size_t basis_size() const { return basis_->size(); }

  [[nodiscard]] HermiteExpansion zero() const;
  [[nodiscard]] HermiteExpansion from_coeffs(Eigen::VectorXd coeffs) const;
  /// c_alpha = sum_j w_j values_j h_alpha(x_j).
  [[nodiscard]] HermiteExpansion expand_nodal(const Eigen::VectorXd& values) const;
  [[nodiscard]] Eigen::VectorXd nodal_values(const HermiteExpansion& u) const;
  [[nodiscard]] Eigen::VectorXd sample(const ScalarField& f) const;
  /// Quadrature norm (sum_j w_j |v_j|^p)^{1/p}.
  [[nodiscard]] double lp_norm(const Eigen::VectorXd& values, double p) const;

 private:
  GaussModelSpace space_;
  QuadGrid grid_;
  std::shared_ptr<const MultiIndexSet> basis_;
  Eigen::MatrixXd basis_at_nodes_;
  Eigen::VectorXd orders_;
};

/// Discrete projection of f onto |alpha| <= K; exact for polynomials of total
/// degree <= K.
HermiteExpansion expand(const ScalarField& f, const SpectralGrid& sg);

/// {n, K, entries: [[degrees...], coeff]} in graded-lex order.
nlohmann::ordered_json expansion_to_json(const HermiteExpansion& u);
HermiteExpansion expansion_from_json(const nlohmann::json& j, const SpectralGrid& sg);

}  // namespace gausscap
