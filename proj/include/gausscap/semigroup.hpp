#pragma once

#include <span>
#include <vector>

#include "gausscap/model_space.hpp"

namespace gausscap {

/// Sample of (0, inf) for suprema over t, plus the two limits.
struct TimeGrid {
  std::vector<double> values;
  bool includes_zero_limit = true;
  bool includes_infinity_limit = true;

  /// `count` log-spaced points on [lo, hi].
  static TimeGrid log_spaced(double lo = 1e-4, double hi = 20.0, int count = 64);
  void validate() const;
};

/// P_t f(x) = sum_j w_j f(e^{-t} x + sqrt(1 - e^{-2t}) y_j), t > 0.
double mehler_apply(const ScalarField& f, double t, std::span<const double> x, const QuadGrid& grid);

/// c_alpha -> e^{-t|alpha|} c_alpha.
HermiteExpansion spectral_apply(const HermiteExpansion& u, double t);

/// sup_t P_t f(x) over the time grid and the enabled limits.
double maximal_function(const ScalarField& f, std::span<const double> x, const TimeGrid& tgrid,
                        const QuadGrid& grid);

/// Cameron-Martin derivative of P_t f at x along the unit vector h, k = 1 or 2.
double mehler_derivative(const ScalarField& f, double t, std::span<const double> x,
                         std::span<const double> h, int k, const QuadGrid& grid);

}  // namespace gausscap
