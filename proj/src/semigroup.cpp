#include "gausscap/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gausscap/error.hpp"

namespace gausscap {

TimeGrid TimeGrid::log_spaced(double lo, double hi, int count) {
  require(lo > 0.0 && hi > lo && count >= 2, "TimeGrid: need 0 < lo < hi and count >= 2");
  TimeGrid g;
  g.values.resize(static_cast<size_t>(count));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < count; ++i)
    g.values[static_cast<size_t>(i)] = std::exp(a + (b - a) * i / (count - 1));
  g.values.back() = hi;
  return g;
}

void TimeGrid::validate() const {
  require(!values.empty() || includes_zero_limit || includes_infinity_limit,
          "TimeGrid: empty grid with both limits disabled");
  for (size_t i = 0; i < values.size(); ++i) {
    require(values[i] > 0.0, "TimeGrid: times must be positive");
    if (i > 0) require(values[i] > values[i - 1], "TimeGrid: times must increase strictly");
  }
}

namespace {

template <class Fn>
double mehler_sum(const ScalarField& f, double t, std::span<const double> x, const QuadGrid& grid,
                  Fn weight_of_node) {
  const size_t n = static_cast<size_t>(grid.n);
  if (x.size() != n) throw ValidationError("mehler: point dimension mismatch");
  const double e = std::exp(-t);
  const double s = std::sqrt(-std::expm1(-2.0 * t));
  std::vector<double> z(n);
  double sum = 0.0;
  for (size_t j = 0; j < grid.size(); ++j) {
    const auto y = grid.node(j);
    for (size_t i = 0; i < n; ++i) z[i] = e * x[i] + s * y[i];
    sum += grid.weights(static_cast<Eigen::Index>(j)) * f(z) * weight_of_node(y);
  }
  return sum;
}

}  // namespace

double mehler_apply(const ScalarField& f, double t, std::span<const double> x, const QuadGrid& grid) {
  if (!(t > 0.0)) throw ValidationError("mehler_apply: t must be > 0");
  return mehler_sum(f, t, x, grid, [](std::span<const double>) { return 1.0; });
}

HermiteExpansion spectral_apply(const HermiteExpansion& u, double t) {
  if (!(t >= 0.0)) throw ValidationError("spectral_apply: t must be >= 0");
  Eigen::VectorXd c = u.coeffs();
  for (size_t m = 0; m < u.basis().size(); ++m)
    c(static_cast<Eigen::Index>(m)) *= std::exp(-t * u.basis()[m].order());
  return u.with_coeffs(std::move(c));
}

double maximal_function(const ScalarField& f, std::span<const double> x, const TimeGrid& tgrid,
                        const QuadGrid& grid) {
  tgrid.validate();
  double best = -std::numeric_limits<double>::infinity();
  if (tgrid.includes_zero_limit) best = f(x);
  if (tgrid.includes_infinity_limit) {
    double mean = 0.0;
    for (size_t j = 0; j < grid.size(); ++j) mean += grid.weights(static_cast<Eigen::Index>(j)) * f(grid.node(j));
    best = std::max(best, mean);
  }
  for (double t : tgrid.values) best = std::max(best, mehler_apply(f, t, x, grid));
  return best;
}

double mehler_derivative(const ScalarField& f, double t, std::span<const double> x,
                         std::span<const double> h, int k, const QuadGrid& grid) {
  if (!(t > 0.0)) throw ValidationError("mehler_derivative: t must be > 0");
  if (k != 1 && k != 2) throw ValidationError("mehler_derivative: k must be 1 or 2");
  if (h.size() != static_cast<size_t>(grid.n)) throw ValidationError("mehler_derivative: direction dimension mismatch");
  double nh = 0.0;
  for (double v : h) nh += v * v;
  if (std::abs(std::sqrt(nh) - 1.0) > 1e-10) throw ValidationError("mehler_derivative: direction must be unit length");

  const double a = std::exp(-t) / std::sqrt(-std::expm1(-2.0 * t));
  auto proj = [&](std::span<const double> y) {
    double s = 0.0;
    for (size_t i = 0; i < h.size(); ++i) s += y[i] * h[i];
    return s;
  };
  if (k == 1) return a * mehler_sum(f, t, x, grid, proj);
  return a * a * mehler_sum(f, t, x, grid, [&](std::span<const double> y) {
           const double z = proj(y);
           return z * z - 1.0;
         });
}

}  // namespace gausscap
