#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gausscap/capacity.hpp"
#include "gausscap/region.hpp"

namespace gausscap {

/// F spanned by the columns of `F`, complement by the columns of `complement`.
struct SubspacePair {
  Eigen::MatrixXd F;
  Eigen::MatrixXd complement;

  /// Coordinate subspace on the given axes of R^n.
  static SubspacePair coordinate(int n, const std::vector<int>& axes);
  /// Completes an orthonormal basis of F to R^n.
  static SubspacePair from_basis(const Eigen::MatrixXd& F);
  void validate(int n) const;
  [[nodiscard]] int dim() const { return static_cast<int>(F.cols()); }
};

/// Balls of radius eps/2 sit at the centres of a cubic lattice whose cells
/// they circumscribe: side eps/sqrt(k) in the k-dimensional lattice.
struct CoveringSchedule {
  /// Strictly decreasing.
  std::vector<double> epsilons;
  /// Half side of the window [-w, w]^m.
  double window = 6.0;
  /// Per-level cap on lattice cells.
  size_t max_cells = size_t{1} << 24;

  /// eps = 2^{-k}, k = k_lo..k_hi.
  static CoveringSchedule dyadic(int k_lo = 2, int k_hi = 6);
  void validate() const;
};

struct CoveringLevel {
  double epsilon = 0.0;
  double value = 0.0;
  size_t balls = 0;
};

struct CoveringReport {
  double value = 0.0;
  std::vector<CoveringLevel> levels;
  /// Per-eps sums failing to be nondecreasing beyond 5% as eps shrinks.
  bool eps_monotone = true;
};

/// Covers A within the window by lattice balls of radius rho = eps/2. Points
/// and hyperplanes use a lattice inside the set itself, other shapes the
/// ambient lattice restricted to cells within rho of A. Each ball adds
/// weight(center) * (2 rho)^exponent. The value is the one at the finest eps.
CoveringReport weighted_covering(const RegionSpec& A, int m, double exponent, const CoveringSchedule& schedule,
                                 bool gaussian_weight);

/// Spherical Hausdorff sum with diameters (2 rho)^d; a point has S^0 = 1 and
/// the unit segment S^1 = 1.
CoveringReport spherical_hausdorff(const RegionSpec& A, int m, double d, const CoveringSchedule& schedule);

/// (2 pi)^{-m/2} int_A exp(-|y|^2 / 2) S^{m-d}(dy) on F = R^m.
CoveringReport theta_dF(const RegionSpec& A, int m, double d, const CoveringSchedule& schedule);

struct SubspaceEstimate {
  Eigen::MatrixXd basis;
  double value = 0.0;
  /// 95% Monte Carlo half-width (0 when the complement is trivial).
  double ci = 0.0;
};

struct GaussianHausdorffReport {
  double value = 0.0;
  std::vector<SubspaceEstimate> per_F;
  /// The sup over the family is only a lower bound for general sets.
  bool lower_bound_only = true;
};

/// Default family: coordinate subspaces of dimension ceil(d) and ceil(d) + 1
/// (capped at n).
std::vector<SubspacePair> default_subspace_family(int n, double d);

/// max over F of E_x theta_d^F(A_x), x standard Gaussian on the complement.
GaussianHausdorffReport gaussian_hausdorff(const RegionSpec& A, int n, double d,
                                           const std::vector<SubspacePair>& family, int section_samples,
                                           const CoveringSchedule& schedule, std::uint64_t seed);

struct CodimReport {
  std::vector<double> capacity_trend;
  Trend capacity_class = Trend::inconclusive;
  std::vector<double> d_values;
  std::vector<double> hausdorff_values;
  bool hypothesis_met = false;
  bool consistent = true;
  std::string note;
};

/// Pairs the cap_{2m,p} trend of Sigma (over decreasing margins on `sg`) with
/// rho_d(Sigma). Flags capacity -> 0 while some rho_d with d < 2mp stays
/// positive.
CodimReport codim_consistency(const RegionSpec& Sigma, int n, int m, double p, const std::vector<double>& d_list,
                              const SpectralGrid& sg, const std::vector<double>& margins, int section_samples,
                              const CoveringSchedule& schedule, std::uint64_t seed, double zero_threshold = 1e-3);

}  // namespace gausscap
