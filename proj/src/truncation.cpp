#include "gausscap/truncation.hpp"

#include <algorithm>
#include <cmath>

#include "gausscap/error.hpp"

namespace gausscap {

namespace {

// Truncated Taylor series: a[k] = f^{(k)}(t0) / k!.
using Jet = std::vector<double>;

Jet jet_div(const Jet& a, const Jet& b) {
  Jet c(a.size());
  for (size_t k = 0; k < a.size(); ++k) {
    double s = a[k];
    for (size_t j = 1; j <= k; ++j) s -= b[j] * c[k - j];
    c[k] = s / b[0];
  }
  return c;
}

Jet jet_exp(const Jet& a) {
  Jet e(a.size());
  e[0] = std::exp(a[0]);
  for (size_t k = 1; k < a.size(); ++k) {
    double s = 0.0;
    for (size_t j = 1; j <= k; ++j) s += static_cast<double>(j) * a[j] * e[k - j];
    e[k] = s / static_cast<double>(k);
  }
  return e;
}

constexpr double kExpCap = 700.0;

}  // namespace

std::vector<double> smooth_step_jet(double t, int order) {
  require(order >= 0, "smooth_step_jet: order must be >= 0");
  const auto len = static_cast<size_t>(order + 1);
  std::vector<double> out(len, 0.0);
  if (t <= 0.5) return out;
  if (t >= 1.0) {
    out[0] = 1.0;
    return out;
  }
  // s(u) = 1 / (1 + exp(g)), g = 1/u - 1/(1-u), u = 2t - 1
  Jet u(len, 0.0), v(len, 0.0), one(len, 0.0);
  u[0] = 2.0 * t - 1.0;
  v[0] = 1.0 - u[0];
  if (len > 1) {
    u[1] = 2.0;
    v[1] = -2.0;
  }
  one[0] = 1.0;
  Jet g = jet_div(one, u);
  const Jet gv = jet_div(one, v);
  for (size_t k = 0; k < len; ++k) g[k] -= gv[k];
  if (g[0] > kExpCap) return out;  // phi(u) below double range
  if (g[0] < -kExpCap) {
    out[0] = 1.0;
    return out;
  }
  Jet den = jet_exp(g);
  den[0] += 1.0;
  const Jet s = jet_div(one, den);
  double fact = 1.0;
  for (size_t k = 0; k < len; ++k) {
    if (k > 0) fact *= static_cast<double>(k);
    out[k] = s[k] * fact;
  }
  return out;
}

double smooth_step(double t) { return smooth_step_jet(t, 0)[0]; }

std::vector<double> derivative_bounds(int i_max, int samples, double lo, double hi) {
  require(i_max >= 1, "derivative_bounds: i_max must be >= 1");
  require(samples >= 2 && hi > lo && lo > 0.0, "derivative_bounds: need samples >= 2 and 0 < lo < hi");
  std::vector<double> L(static_cast<size_t>(i_max + 1), 0.0);
  for (int s = 0; s < samples; ++s) {
    const double t = lo + (hi - lo) * s / (samples - 1);
    const auto jet = smooth_step_jet(t, i_max);
    for (int i = 0; i <= i_max; ++i) {
      const double v = std::abs(std::pow(t, i - 1) * jet[static_cast<size_t>(i)]);
      if (std::isfinite(v)) L[static_cast<size_t>(i)] = std::max(L[static_cast<size_t>(i)], v);
    }
  }
  if (hi >= 1.0) L[0] = std::max(L[0], 1.0);  // T(t)/t = 1/t beyond the band
  return L;
}

SmoothTruncation SmoothTruncation::standard(int i_max) {
  SmoothTruncation T;
  T.bounds = derivative_bounds(i_max);
  T.L = *std::max_element(T.bounds.begin(), T.bounds.end());
  return T;
}

TruncationResult truncate_potential(const Eigen::VectorXd& f, const SobolevParams& params,
                                    const SpectralGrid& sg) {
  params.validate();
  require(f.size() == static_cast<Eigen::Index>(sg.node_count()), "truncate_potential: nodal vector has the wrong length");
  require(f.minCoeff() >= 0.0, "truncate_potential: f must be nonnegative at the nodes");
  const double fn = sg.lp_norm(f, params.p);
  require(fn > 0.0, "truncate_potential: f is zero");

  const auto v = bessel_spectral(sg.expand_nodal(f), params.r);
  Eigen::VectorXd g = sg.nodal_values(v).unaryExpr([](double y) { return smooth_step(y); });
  auto u = sg.expand_nodal(g);
  TruncationResult res{u, 0.0, fn, 0.0, 0.0};
  res.aliasing = (sg.nodal_values(u) - g).cwiseAbs().maxCoeff();
  res.sobolev = sobolev_norm(u, params, sg);
  res.ratio = res.sobolev / fn;
  return res;
}

MultestReport multiplicative_estimate_check(const HermiteExpansion& f, int r, int k, double q,
                                            std::span<const double> x, const SpectralGrid& sg,
                                            const TimeGrid& tgrid) {
  require(q > 1.0 && std::isfinite(q), "multest: q must lie in (1, inf)");
  require(k >= 1 && k < r, "multest: need 1 <= k < r");
  require(f.space() == sg.space(), "multest: f belongs to another model space");
  const Eigen::VectorXd nodal = sg.nodal_values(f);
  require(nodal.minCoeff() >= -1e-12 && eval(f, x) >= -1e-12, "multest: f must be nonnegative");

  const auto v = bessel_spectral(f, r);
  MultestReport rep;
  rep.numerator = dk_hs_norm(v, k, x);
  rep.potential = eval(v, x);
  ScalarField fq = [&](std::span<const double> y) { return std::pow(std::max(eval(f, y), 0.0), q); };
  rep.maximal = maximal_function(fq, x, tgrid, sg.grid());
  const double kr = static_cast<double>(k) / r;
  const double den = std::pow(std::max(rep.potential, 0.0), 1.0 - kr) * std::pow(rep.maximal, kr / q);
  if (!(den > 0.0) || !std::isfinite(den)) throw NumericalError("multest: degenerate denominator");
  rep.ratio = rep.numerator / den;
  return rep;
}

}  // namespace gausscap
