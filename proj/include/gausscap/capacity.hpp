#pragma once

#include <string>
#include <vector>

#include "gausscap/model_space.hpp"
#include "gausscap/potential.hpp"
#include "gausscap/region.hpp"
#include "gausscap/truncation.hpp"

namespace gausscap {

/// potential: inf ||f||_p^p over f >= 0 with V_r f >= 1 on U.
/// variational: inf ||u||_{W^{r,p}}^p over u with u = 1 on U. On a finite grid
/// every function is continuous, so the quasi-sure variant coincides with it.
enum class CapacityDefinition { potential, variational };

std::string to_string(CapacityDefinition d);
CapacityDefinition definition_from_string(const std::string& s);

struct SolverOptions {
  /// p = 2, potential form: absolute duality gap of the active-set QP.
  double qp_gap = 1e-8;
  /// Relative tolerance for the general-p solvers.
  double rel_tol = 1e-7;
  int max_iter = 50000;
};

struct GridMeta {
  int n = 1;
  int K = 0;
  int Q = 1;
  double margin = 0.0;
  size_t constrained_nodes = 0;
};

struct CapacityResult {
  CapacityDefinition definition = CapacityDefinition::potential;
  double value = 0.0;
  /// Nodal f (potential form) or Hermite coefficients (variational form).
  Eigen::VectorXd optimizer;
  /// Max constraint violation at the constrained nodes.
  double residual = 0.0;
  /// Certified duality gap (potential) or final smoothing/stationarity level.
  double gap = 0.0;
  int iterations = 0;
  bool converged = true;
  /// Variational form: more constraints than coefficients, or dependent rows.
  bool rank_deficient = false;
  std::string method;
  GridMeta grid_meta;
  std::vector<double> refinement_trend;
};

/// region.margin if set, else the smallest 1D node gap of the grid.
double default_margin(const RegionSpec& U, const SpectralGrid& sg);

CapacityResult cap_potential_mask(const std::vector<char>& mask, const SobolevParams& params,
                                  const SpectralGrid& sg, const SolverOptions& opts = {});
CapacityResult cap_variational_mask(const std::vector<char>& mask, const SobolevParams& params,
                                    const SpectralGrid& sg, const SolverOptions& opts = {});

/// Both forms constrain the grid nodes of U fattened by default_margin.
CapacityResult cap_potential(const RegionSpec& U, const SobolevParams& params, const SpectralGrid& sg,
                             const SolverOptions& opts = {});
CapacityResult cap_variational(const RegionSpec& U, const SobolevParams& params, const SpectralGrid& sg,
                               const SolverOptions& opts = {});
CapacityResult capacity(CapacityDefinition def, const RegionSpec& U, const SobolevParams& params,
                        const SpectralGrid& sg, const SolverOptions& opts = {});

/// Values of the capacity on each model space in turn.
std::vector<double> capacity_trend(CapacityDefinition def, const RegionSpec& U, const SobolevParams& params,
                                   const std::vector<GaussModelSpace>& spaces, const SolverOptions& opts = {});

/// Potential form with f restricted to degree-K expansions nonnegative at the
/// nodes, against the nodal form.
struct LemmaDescriptionReport {
  CapacityResult nodal;
  CapacityResult cone;
  /// (cone - nodal) / max(nodal, tiny); zero when both vanish.
  double relative_gap = 0.0;
};
LemmaDescriptionReport lemma_description_check(const RegionSpec& U, const SobolevParams& params,
                                               const SpectralGrid& sg, const SolverOptions& opts = {});

struct EquivalenceReport {
  CapacityResult cap;
  CapacityResult ccap;
  double ratio = 0.0;
  /// ||u_w||^p for u_w = T(V_r f) re-expanded and projected onto u = 1 on U.
  double witness_cost = 0.0;
  /// Coefficient distance moved by that projection.
  double witness_projection = 0.0;
  /// Re-expansion error of T(V_r f) at the nodes.
  double witness_aliasing = 0.0;
  bool violation_candidate = false;
};
EquivalenceReport equivalence_ratio(const RegionSpec& U, const SobolevParams& params, const SpectralGrid& sg,
                                    const SmoothTruncation& T, const SolverOptions& opts = {});

/// |2/p - 1| < 1/m
bool generation_condition(int m, double p);

enum class Trend { zero, bounded_away, inconclusive };
std::string to_string(Trend t);

/// Values ordered from coarse to fine. Needs at least three; a rise above
/// `tolerance` (relative) is inconsistent.
Trend classify_trend(const std::vector<double>& values, double zero_threshold, double tolerance = 1e-6);

struct UniquenessReport {
  std::vector<double> margins;
  std::vector<double> values;
  Trend trend = Trend::inconclusive;
  bool condition = false;
  std::string verdict;
};

/// cap_{2m,p} of the margin-fattened Sigma for each margin (decreasing),
/// trend classification and the removability verdict.
UniquenessReport uniqueness_verdict(const RegionSpec& Sigma, int m, double p, const SpectralGrid& sg,
                                    double zero_threshold, const std::vector<double>& margins,
                                    const SolverOptions& opts = {});

struct WeakTypeReport {
  double level = 0.0;
  double capacity = 0.0;
  double bound = 0.0;
  size_t nodes = 0;
  bool holds = true;
};

/// cap({V_r f > R}) <= R^{-p} ||f||_p^p at the nodes.
WeakTypeReport weak_type_check(const Eigen::VectorXd& f, double R, const SobolevParams& params,
                               const SpectralGrid& sg, const SolverOptions& opts = {});

}  // namespace gausscap
