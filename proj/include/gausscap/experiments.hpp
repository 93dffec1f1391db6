#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "gausscap/capacity.hpp"
#include "gausscap/hausdorff.hpp"
#include "gausscap/sheet.hpp"

namespace gausscap {

using ojson = nlohmann::ordered_json;

/// Spectral multiplier against the time-quadrature Bessel potential on random
/// polynomials.
struct PotentialAgreementConfig {
  std::vector<int> dims{1, 2};
  int K = 12;
  std::vector<double> r_values{1.0, 2.0, 3.0};
  int functions = 4;
  int points = 50;
  int order = 40;
  double tolerance = 1e-8;
};
struct PotentialAgreementReport {
  double max_error = 0.0;
  size_t evaluations = 0;
  bool pass = false;
  [[nodiscard]] ojson to_json() const;
};
PotentialAgreementReport potential_agreement(const PotentialAgreementConfig& cfg, std::uint64_t seed);

/// Semigroup law on coefficients, Mehler against the spectral form, mass
/// conservation and positivity on random polynomials.
struct SemigroupSuiteConfig {
  std::vector<int> dims{1, 2};
  int K = 8;
  int functions = 100;
  double mehler_tol = 1e-8;
};
struct SemigroupSuiteReport {
  double law_error = 0.0;
  double mehler_error = 0.0;
  double mass_error = 0.0;
  /// Most negative P_t f seen for f >= 0 (0 if none).
  double min_positive_value = 0.0;
  int positivity_failures = 0;
  size_t functions = 0;
  bool pass = false;
  [[nodiscard]] ojson to_json() const;
};
SemigroupSuiteReport semigroup_suite(const SemigroupSuiteConfig& cfg, std::uint64_t seed);

/// cap of the whole space under both definitions.
struct FullSpaceConfig {
  std::vector<int> r_values{1, 2};
  std::vector<double> p_values{2.0, 1.5, 3.0};
  std::vector<GaussModelSpace> spaces{{1, 8, 17}, {2, 6, 13}};
};
struct FullSpaceRow {
  int n = 1;
  int r = 1;
  double p = 2.0;
  CapacityDefinition definition = CapacityDefinition::potential;
  double value = 0.0;
  double tolerance = 0.0;
  bool converged = true;
  bool pass = false;
};
struct FullSpaceReport {
  std::vector<FullSpaceRow> rows;
  bool pass = false;
  [[nodiscard]] ojson to_json() const;
};
FullSpaceReport full_space_capacity(const FullSpaceConfig& cfg, const SolverOptions& opts = {});

/// Twelve test regions: three balls and three slabs in each of R^1, R^2.
std::vector<RegionSpec> equivalence_family(double margin = 0.25);

struct EquivalenceSweepConfig {
  std::vector<int> r_values{1, 2};
  std::vector<double> p_values{1.5, 2.0, 3.0};
  std::vector<RegionSpec> regions = equivalence_family();
  /// Base spaces per dimension (index n - 1); refinement adds `refine_Q` to Q.
  std::vector<GaussModelSpace> base{{1, 8, 24}, {2, 6, 16}};
  int refine_Q = 8;
  double C = 100.0;
  double refine_tol = 0.10;
};
struct EquivalenceRow {
  size_t region = 0;
  int n = 1;
  int r = 1;
  double p = 2.0;
  double cap = 0.0;
  double ccap = 0.0;
  double ratio = 0.0;
  double ratio_refined = 0.0;
  double change = 0.0;
  double witness_cost = 0.0;
  bool converged = true;
};
struct EquivalenceGroup {
  int r = 1;
  double p = 2.0;
  double lo = 0.0;
  double hi = 0.0;
  double max_change = 0.0;
  bool pass = false;
};
struct EquivalenceSweepReport {
  std::vector<EquivalenceRow> rows;
  std::vector<EquivalenceGroup> groups;
  bool all_converged = true;
  bool pass = false;
  [[nodiscard]] ojson to_json() const;
  [[nodiscard]] std::string to_csv() const;
};
EquivalenceSweepReport equivalence_sweep(const EquivalenceSweepConfig& cfg, const SolverOptions& opts = {});

/// Ratio ||T o V_r f||_{W^{r,p}} / ||f||_p over random nonnegative f. Each
/// sample is f(x) = a g(<theta, x>)^2 with the same (a, g, theta seed) in every
/// dimension; theta uses the first n entries of one 4-vector.
struct TruncationSweepConfig {
  std::vector<int> dims{1, 2, 3, 4};
  int r = 2;
  double p = 2.0;
  int samples = 100;
  int K = 6;
  int Q = 9;
  int g_degree = 3;
  double amp_lo = 0.5;
  double amp_hi = 4.0;
  double spread_tol = 0.15;
  double median_factor = 10.0;
};
struct TruncationSweepReport {
  std::vector<int> dims;
  std::vector<double> max_ratio;
  std::vector<double> max_aliasing;
  double pooled_median = 0.0;
  double overall_max = 0.0;
  double spread = 0.0;
  int outliers = 0;
  bool pass = false;
  [[nodiscard]] ojson to_json() const;
  [[nodiscard]] std::string to_csv() const;
  std::vector<std::vector<double>> ratios;
};
TruncationSweepReport truncation_sweep(const TruncationSweepConfig& cfg, std::uint64_t seed);

/// Multiplicative estimate ratio over random (f, x) with f = g^2 + floor.
struct MultestSweepConfig {
  GaussModelSpace space{2, 6, 13};
  int r = 2;
  int k = 1;
  double q = 2.0;
  int samples = 500;
  int g_degree = 3;
  double floor = 0.01;
  double median_factor = 10.0;
  double scale_tol = 1e-10;
};
struct MultestSweepReport {
  std::vector<double> ratios;
  double median = 0.0;
  double max_ratio = 0.0;
  int violations = 0;
  double max_scale_error = 0.0;
  bool pass = false;
  [[nodiscard]] ojson to_json() const;
  [[nodiscard]] std::string to_csv() const;
};
MultestSweepReport multest_sweep(const MultestSweepConfig& cfg, std::uint64_t seed);

/// ||u||_{W^{r,p}} / ||(I - L)^{r/2} u||_p for random u with coefficients
/// N(0,1) decay^{|alpha|}, at K and K + dK on the same coefficient stream.
struct MeyerProbeConfig {
  int n = 2;
  int K = 8;
  int dK = 4;
  double decay = 0.5;
  std::vector<int> r_values{1, 2};
  std::vector<double> p_values{2.0, 3.0};
  int samples = 100;
  double width_limit = 50.0;
  double stability_tol = 0.10;
};
struct MeyerGroup {
  int r = 1;
  double p = 2.0;
  double lo = 0.0;
  double hi = 0.0;
  double lo_refined = 0.0;
  double hi_refined = 0.0;
  double width = 0.0;
  double drift = 0.0;
  bool pass = false;
};
struct MeyerProbeReport {
  std::vector<MeyerGroup> groups;
  bool pass = false;
  [[nodiscard]] ojson to_json() const;
};
MeyerProbeReport meyer_probe(const MeyerProbeConfig& cfg, std::uint64_t seed);

/// rho_1 of {x_1 = a} in R^2 against (2 pi)^{-1/2} exp(-a^2/2).
struct HyperplaneConfig {
  std::vector<double> offsets{0.0, 1.0};
  int section_samples = 64;
  int k_lo = 2;
  int k_hi = 6;
  double tolerance = 0.05;
};
struct HyperplaneRow {
  double offset = 0.0;
  double value = 0.0;
  double expected = 0.0;
  double rel_error = 0.0;
};
struct HyperplaneReport {
  std::vector<HyperplaneRow> rows;
  bool pass = false;
  [[nodiscard]] ojson to_json() const;
};
HyperplaneReport hausdorff_hyperplanes(const HyperplaneConfig& cfg, std::uint64_t seed);

struct SheetLawConfig {
  int r = 2;
  int n = 1;
  double lo = 0.0;
  double hi = 1.0;
  double spacing = 0.25;
  long replicas = 100000;
  double alpha = 0.01;
  double z = 3.0;
};
struct SheetLawResult {
  SheetLawReport law;
  bool pass = false;
  [[nodiscard]] ojson to_json() const;
};
SheetLawResult sheet_law(const SheetLawConfig& cfg, std::uint64_t seed);

/// Nested balls B(0, rho) in R^1 plus the empty set and the whole space.
struct KakutaniConfig {
  std::vector<double> radii{1.0, 0.5, 0.25};
  bool include_trivial = true;
  int r = 2;
  double lo = 0.0;
  double hi = 1.0;
  double spacing = 0.125;
  int levels = 2;
  long replicas = 10000;
  std::vector<GaussModelSpace> spaces{{1, 24, 101}, {1, 32, 101}, {1, 40, 101}};
  double zero_threshold = 1e-3;
};
struct KakutaniResult {
  KakutaniReport table;
  bool hitting_decreasing = false;
  bool capacity_decreasing = false;
  bool no_contradiction = false;
  bool pass = false;
  [[nodiscard]] ojson to_json() const;
  [[nodiscard]] std::string to_csv() const;
};
KakutaniResult kakutani_nested(const KakutaniConfig& cfg, std::uint64_t seed, const SolverOptions& opts = {});

/// Median of a nonempty list.
double median_of(std::vector<double> v);

}  // namespace gausscap
