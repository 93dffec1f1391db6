#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gausscap/model_space.hpp"

namespace gausscap {

/// Order r and exponent p of W^{r,p}.
struct SobolevParams {
  int r = 1;
  double p = 2.0;
  void validate() const;
};

/// Multiplier (1 + |alpha|)^{-r/2}; r > 0 need not be an integer.
HermiteExpansion bessel_spectral(const HermiteExpansion& u, double r);

/// (1 + |alpha|)^{s/2} for any real s; s = -r gives V_r.
HermiteExpansion bessel_power(const HermiteExpansion& u, double s);

enum class TimeRule {
  /// Gauss rule in u = e^{-t}; exact on e^{-mt} for m < 2 order.
  exponential,
  /// Generalized Gauss-Laguerre in t.
  laguerre,
};

/// V_r f(x) = Gamma(r/2)^{-1} int_0^inf t^{r/2-1} e^{-t} P_t f(x) dt, time
/// integral by an `order`-point rule, P_t by Mehler quadrature on `grid`.
double bessel_quadrature(const ScalarField& f, double r, std::span<const double> x,
                         const QuadGrid& grid, int order = 40,
                         TimeRule rule = TimeRule::exponential);

/// (d/dx_axis) u on coefficients, axis in [0, n).
HermiteExpansion h_derivative(const HermiteExpansion& u, int axis);

/// D^k u(x) as a dense n^k array, row-major over (i_1, ..., i_k).
struct DerivativeTensorSample {
  int k = 0;
  int n = 1;
  std::vector<double> x;
  std::vector<double> entries;

  [[nodiscard]] double at(std::span<const int> idx) const;
  [[nodiscard]] double hs_norm() const;
  /// Max deviation under index permutations.
  [[nodiscard]] double asymmetry() const;
};

DerivativeTensorSample derivative_tensor(const HermiteExpansion& u, int k, std::span<const double> x);

/// Hilbert-Schmidt norm of D^k u(x); k = 0 gives |u(x)|.
double dk_hs_norm(const HermiteExpansion& u, int k, std::span<const double> x);

/// Linear maps c -> (d_{i_1}..d_{i_k} u)(x_j) for every nondecreasing axis
/// tuple, with the multiplicity of the tuple among all orderings. The HS norm
/// squared at node j is sum_tau mult_tau (A_tau c)_j^2.
struct DerivativeOperators {
  int k = 0;
  std::vector<Eigen::MatrixXd> maps;
  std::vector<double> multiplicity;

  DerivativeOperators(const SpectralGrid& sg, int k);
  [[nodiscard]] Eigen::VectorXd nodal_hs_norms(const Eigen::VectorXd& coeffs) const;
};

/// Coefficient matrix of d/dx_axis (M x M) in the basis of `sg`.
Eigen::MatrixXd derivative_matrix(const SpectralGrid& sg, int axis);

/// sum_{k=0}^r ( sum_j w_j |D^k u(x_j)|^p )^{1/p}.
double sobolev_norm(const HermiteExpansion& u, const SobolevParams& params, const SpectralGrid& sg);

/// Per-order terms of sobolev_norm.
std::vector<double> sobolev_terms(const HermiteExpansion& u, const SobolevParams& params,
                                  const SpectralGrid& sg);

/// ||(I - L)^{s/2} u||_{L^p} on the grid.
double bessel_norm(const HermiteExpansion& u, double s, double p, const SpectralGrid& sg);

/// ||(I - L)^{r/2} u||_p / ||u||_{W^{r,p}}.
double meyer_ratio(const HermiteExpansion& u, const SobolevParams& params, const SpectralGrid& sg);

struct HsBoundReport {
  double hs_norm = 0.0;
  /// Lower estimate of sup |A(h_1, ..., h_k)| over orthonormal systems.
  double sup_estimate = 0.0;
  double bound = 0.0;
  bool holds = false;
};

/// Checks ||A||_HS <= 2 k^k sup |A(h_1..h_k)| by random frames plus
/// coordinate ascent over plane rotations.
HsBoundReport hs_bound_check(const DerivativeTensorSample& A, int trials = 1000,
                             int refine_steps = 50, std::uint64_t seed = 1);

}  // namespace gausscap
