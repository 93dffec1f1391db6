#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gausscap/capacity.hpp"
#include "gausscap/region.hpp"

namespace gausscap {

/// r-parameter grid of times, state space R^n. Grid points are ordered with the
/// last axis varying fastest.
struct SheetGrid {
  int r = 1;
  int n = 1;
  std::vector<std::vector<double>> axes;

  /// Every axis equal to {lo, lo + h, ..., hi}.
  static SheetGrid uniform(int r, int n, double lo, double hi, double h);
  void validate() const;
  [[nodiscard]] size_t size() const;
  /// Smallest gap between consecutive times on any axis (0 for single points).
  [[nodiscard]] double spacing() const;
  /// Multi-index of grid point `flat`.
  [[nodiscard]] std::vector<size_t> index(size_t flat) const;
};

struct SheetSample {
  /// size() x n, one row per grid point.
  Eigen::MatrixXd values;
  std::uint64_t seed = 0;
};

/// Exact draw of the field with covariance prod_i exp(-|s_i - t_i|) I_n: iid
/// standard normals, then the stationary AR(1) recursion along each axis in
/// `axis_order` (default 0..r-1).
SheetSample sample_sheet(const SheetGrid& grid, std::uint64_t seed, const std::vector<int>& axis_order = {});

struct HitStats {
  long replicas = 0;
  long hits = 0;
  double estimate = 0.0;
  /// Wilson 95% interval.
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double spacing = 0.0;
  double margin = 0.0;
};

/// Wilson score interval at 95%.
std::pair<double, double> wilson_interval(long hits, long n);

/// Region used for hitting: U.margin fattens every part when set; otherwise
/// points and hyperplanes are thickened by `thin_margin` and other parts kept.
RegionSpec hitting_region(const RegionSpec& U, double thin_margin);

/// Fraction of replicas whose sample has a grid point in hitting_region(U,
/// grid spacing). Replica i uses seed split_seed(seed, i).
HitStats hitting_probability(const RegionSpec& U, const SheetGrid& grid, long replicas, std::uint64_t seed);

/// Coupled refinement: `grid` is the finest level and level l uses every
/// 2^(levels-1-l)-th time per axis of the same sample, so estimates never
/// decrease from coarse to fine. The thin-set margin is the finest spacing.
std::vector<HitStats> hitting_trend(const RegionSpec& U, const SheetGrid& grid, int levels, long replicas,
                                    std::uint64_t seed);

struct KakutaniRow {
  std::string id;
  RegionSpec region;
  std::vector<HitStats> hitting;
  std::vector<double> capacity_trend;
  Trend capacity_class = Trend::inconclusive;
  double capacity = 0.0;
  /// (last - first) / (levels - 1) of the capacity trend.
  double capacity_slope = 0.0;
  /// Capacity tends to 0 while hitting is significantly positive, or the
  /// reverse.
  bool contradiction = false;
};

struct KakutaniReport {
  std::vector<KakutaniRow> rows;
  /// Spearman correlation of finest hitting estimate and capacity (NaN when a
  /// column is constant or fewer than two sets are given).
  double rank_correlation = 0.0;
  std::uint64_t seed = 0;
};

double spearman(const std::vector<double>& a, const std::vector<double>& b);

/// Hitting trend and cap_{r,2} trend (over `spaces`) for each set.
KakutaniReport kakutani_experiment(const std::vector<RegionSpec>& family, const std::vector<std::string>& ids,
                                   const SheetGrid& grid, int levels, long replicas, std::uint64_t seed,
                                   const std::vector<GaussModelSpace>& spaces, double zero_threshold = 1e-3,
                                   const SolverOptions& opts = {});

struct SheetLawReport {
  size_t points = 0;
  long replicas = 0;
  /// Largest Kolmogorov-Smirnov distance to N(0,1) over points and coordinates.
  double ks_max = 0.0;
  double ks_critical = 0.0;
  int ks_failures = 0;
  size_t pairs = 0;
  /// Largest |cov - target| / standard error over distinct point pairs.
  double cov_max_z = 0.0;
  int cov_exceed = 0;
};

/// Sup distance between the empirical CDF of x and the standard normal CDF.
double ks_statistic_normal(std::vector<double> x);
/// Critical value of the one-sample KS test (Stephens' finite-n correction).
double ks_critical(long n, double alpha);

/// Marginal KS test per point and coordinate, and covariance of every pair of
/// distinct points (same coordinate) against prod exp(-|dt|) at `z` standard
/// errors sqrt((1 + rho^2) / N).
SheetLawReport sheet_law_check(const SheetGrid& grid, long replicas, std::uint64_t seed, double alpha = 0.01,
                               double z = 3.0);

}  // namespace gausscap
