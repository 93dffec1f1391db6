#pragma once

#include <span>
#include <vector>

#include "gausscap/model_space.hpp"
#include "gausscap/potential.hpp"
#include "gausscap/semigroup.hpp"

namespace gausscap {

/// T(t) = s(2t - 1), s(u) = phi(u) / (phi(u) + phi(1 - u)), phi(u) = exp(-1/u).
/// Zero for t <= 1/2, one for t >= 1, C^infinity and nondecreasing.
double smooth_step(double t);

/// T(t), T'(t), ..., T^{(order)}(t) by Taylor-jet arithmetic. Inside the band
/// but within 1/1400 of an edge, phi underflows; the jet is clamped to the
/// edge values (derivatives exactly zero).
std::vector<double> smooth_step_jet(double t, int order);

/// sup |t^{i-1} T^{(i)}(t)| over a uniform sample of [lo, hi], i = 0..i_max.
/// The i = 0 entry also covers t >= 1 where T(t)/t = 1/t <= 1.
std::vector<double> derivative_bounds(int i_max = 4, int samples = 20001, double lo = 0.5,
                                      double hi = 1.0);

struct SmoothTruncation {
  double lower = 0.5;
  double upper = 1.0;
  std::vector<double> bounds;
  /// max_i bounds[i]
  double L = 0.0;

  static SmoothTruncation standard(int i_max = 4);
  double operator()(double t) const { return smooth_step(t); }
};

struct TruncationResult {
  HermiteExpansion composed;
  double sobolev = 0.0;
  double f_norm = 0.0;
  /// ||T o V_r f||_{W^{r,p}} / ||f||_{L^p}
  double ratio = 0.0;
  /// max over nodes of |re-expanded - pointwise| for T o V_r f
  double aliasing = 0.0;
};

/// Composes T with V_r f at the nodes and re-expands. `f` holds nodal values.
TruncationResult truncate_potential(const Eigen::VectorXd& f, const SobolevParams& params,
                                    const SpectralGrid& sg);

struct MultestReport {
  double numerator = 0.0;
  double potential = 0.0;
  double maximal = 0.0;
  double ratio = 0.0;
};

/// |D^k V_r f(x)|_HS / [ (V_r f(x))^{1-k/r} (sup_t P_t f^q (x))^{k/(rq)} ].
/// f must be nonnegative at the grid nodes and at x.
MultestReport multiplicative_estimate_check(const HermiteExpansion& f, int r, int k, double q,
                                            std::span<const double> x, const SpectralGrid& sg,
                                            const TimeGrid& tgrid);

}  // namespace gausscap
