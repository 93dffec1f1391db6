#include "gausscap/gauss_rules.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

#include "gausscap/error.hpp"

namespace gausscap {

QuadratureRule golub_welsch(const std::vector<double>& diag,
                            const std::vector<double>& offdiag, double mass) {
  const auto n = static_cast<Eigen::Index>(diag.size());
  require(n >= 1, "golub_welsch: empty recurrence");
  require(offdiag.size() + 1 == diag.size(), "golub_welsch: size mismatch");

  QuadratureRule rule;
  if (n == 1) {
    rule.nodes = {diag[0]};
    rule.weights = {mass};
    return rule;
  }
  Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(diag.data(), n);
  Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(offdiag.data(), n - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw NumericalError("golub_welsch: tridiagonal eigensolver failed");

  rule.nodes.resize(static_cast<size_t>(n));
  rule.weights.resize(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v0 = solver.eigenvectors()(0, i);
    rule.nodes[static_cast<size_t>(i)] = solver.eigenvalues()(i);
    rule.weights[static_cast<size_t>(i)] = mass * v0 * v0;
  }
  return rule;
}

QuadratureRule gauss_hermite(int order) {
  require(order >= 1, "gauss_hermite: order must be >= 1");
  std::vector<double> diag(static_cast<size_t>(order), 0.0);
  std::vector<double> off(static_cast<size_t>(order - 1));
  for (int k = 1; k < order; ++k) off[static_cast<size_t>(k - 1)] = std::sqrt(static_cast<double>(k));
  auto rule = golub_welsch(diag, off, 1.0);
  // Eigenvector weights are only accurate in absolute terms, so the tail
  // weights (below ~1e-30) come out as noise. Polish each node by Newton on the
  // normalized h_Q and use w = 1 / sum_{k<Q} h_k(x)^2, run with rescaling so
  // large |x| cannot overflow.
  const size_t q = rule.nodes.size();
  for (size_t i = 0; i < q && order > 1; ++i) {
    double x = rule.nodes[i];
    for (int it = 0; it < 3; ++it) {
      double h0 = 1.0, h1 = x;
      for (int k = 1; k < order; ++k) {
        const double h2 = (x * h1 - std::sqrt(static_cast<double>(k)) * h0) / std::sqrt(static_cast<double>(k + 1));
        h0 = h1;
        h1 = h2;
        if (std::abs(h1) > 1e150) {
          h0 *= 1e-150;
          h1 *= 1e-150;
        }
      }
      // h_Q' = sqrt(Q) h_{Q-1}
      x -= h1 / (std::sqrt(static_cast<double>(order)) * h0);
    }
    double h0 = 1.0, h1 = x, sum = 1.0 + x * x, log_scale = 0.0;
    for (int k = 1; k + 1 < order; ++k) {
      const double h2 = (x * h1 - std::sqrt(static_cast<double>(k)) * h0) / std::sqrt(static_cast<double>(k + 1));
      h0 = h1;
      h1 = h2;
      sum += h1 * h1;
      if (sum > 1e200) {
        h0 *= 1e-100;
        h1 *= 1e-100;
        sum *= 1e-200;
        log_scale += 200.0 * std::log(10.0);
      }
    }
    rule.nodes[i] = x;
    rule.weights[i] = std::exp(-std::log(sum) - log_scale);
  }
  // Exact symmetry: average mirrored pairs.
  for (size_t i = 0; i < q / 2; ++i) {
    const size_t j = q - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = w;
    rule.weights[j] = w;
  }
  if (q % 2 == 1) rule.nodes[q / 2] = 0.0;
  return rule;
}

QuadratureRule gauss_laguerre(int order, double a) {
  require(order >= 1, "gauss_laguerre: order must be >= 1");
  require(a > -1.0, "gauss_laguerre: exponent must exceed -1");
  std::vector<double> diag(static_cast<size_t>(order));
  std::vector<double> off(static_cast<size_t>(order - 1));
  for (int k = 0; k < order; ++k) diag[static_cast<size_t>(k)] = 2.0 * k + a + 1.0;
  for (int k = 1; k < order; ++k)
    off[static_cast<size_t>(k - 1)] = std::sqrt(static_cast<double>(k) * (k + a));
  return golub_welsch(diag, off, 1.0);
}

QuadratureRule gauss_jacobi_left(int order, double a, double length) {
  require(order >= 1, "gauss_jacobi_left: order must be >= 1");
  require(a > -1.0, "gauss_jacobi_left: exponent must exceed -1");
  // Jacobi weight (1-x)^alpha (1+x)^beta on [-1, 1] with alpha = 0, beta = a.
  const double al = 0.0;
  const double be = a;
  std::vector<double> diag(static_cast<size_t>(order));
  std::vector<double> off(static_cast<size_t>(order - 1));
  for (int k = 0; k < order; ++k) {
    const double s = 2.0 * k + al + be;
    diag[static_cast<size_t>(k)] =
        (k == 0) ? (be - al) / (al + be + 2.0) : (be * be - al * al) / (s * (s + 2.0));
  }
  for (int k = 1; k < order; ++k) {
    const double s = 2.0 * k + al + be;
    const double b = 4.0 * k * (k + al) * (k + be) * (k + al + be) / (s * s * (s + 1.0) * (s - 1.0));
    off[static_cast<size_t>(k - 1)] = std::sqrt(b);
  }
  auto rule = golub_welsch(diag, off, 1.0);
  const double mass = std::pow(length, a + 1.0) / (a + 1.0);
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    rule.nodes[i] = 0.5 * length * (1.0 + rule.nodes[i]);
    rule.weights[i] *= mass;
  }
  return rule;
}

namespace {

// Discretization of t^a e^{-t} dt on (0, 64] accurate for e^{-m t}, m < 200:
// Gauss-Jacobi on the singular first cell, Gauss-Legendre on dyadic cells.
QuadratureRule discretized_gamma_measure(double a) {
  constexpr int kPoints = 48;
  constexpr double kFirst = 1.0 / 512.0;
  constexpr double kLast = 64.0;
  QuadratureRule out;
  auto head = gauss_jacobi_left(kPoints, a, kFirst);
  for (size_t i = 0; i < head.nodes.size(); ++i) {
    out.nodes.push_back(head.nodes[i]);
    out.weights.push_back(head.weights[i] * std::exp(-head.nodes[i]));
  }
  const auto legendre = gauss_jacobi_left(kPoints, 0.0, 1.0);
  for (double lo = kFirst; lo < kLast; lo *= 2.0) {
    const double len = lo;
    for (size_t i = 0; i < legendre.nodes.size(); ++i) {
      const double t = lo + len * legendre.nodes[i];
      out.nodes.push_back(t);
      out.weights.push_back(len * legendre.weights[i] * std::pow(t, a) * std::exp(-t));
    }
  }
  return out;
}

}  // namespace

QuadratureRule exponential_time_rule(int order, double a) {
  require(order >= 1, "exponential_time_rule: order must be >= 1");
  require(a > -1.0, "exponential_time_rule: exponent must exceed -1");
  require(order <= 80, "exponential_time_rule: order above 80 is not supported");

  static std::mutex cache_mutex;
  static std::map<std::pair<int, double>, QuadratureRule> cache;
  {
    std::lock_guard lock(cache_mutex);
    if (auto it = cache.find({order, a}); it != cache.end()) return it->second;
  }

  const auto measure = discretized_gamma_measure(a);
  const size_t npts = measure.nodes.size();
  std::vector<double> u(npts);
  double mass = 0.0;
  for (size_t j = 0; j < npts; ++j) {
    u[j] = std::exp(-measure.nodes[j]);
    mass += measure.weights[j];
  }
  std::vector<double> w(npts);
  for (size_t j = 0; j < npts; ++j) w[j] = measure.weights[j] / mass;

  // Stieltjes procedure with orthonormal polynomials on the discrete measure.
  std::vector<double> diag(static_cast<size_t>(order));
  std::vector<double> off(static_cast<size_t>(order - 1));
  std::vector<double> prev(npts, 0.0);
  std::vector<double> cur(npts, 1.0);
  double beta_prev = 0.0;
  for (int k = 0; k < order; ++k) {
    double alpha = 0.0;
    for (size_t j = 0; j < npts; ++j) alpha += w[j] * u[j] * cur[j] * cur[j];
    diag[static_cast<size_t>(k)] = alpha;
    if (k + 1 == order) break;
    std::vector<double> next(npts);
    for (size_t j = 0; j < npts; ++j) next[j] = (u[j] - alpha) * cur[j] - beta_prev * prev[j];
    // Second Gram-Schmidt pass against the two previous polynomials.
    double c0 = 0.0;
    double c1 = 0.0;
    for (size_t j = 0; j < npts; ++j) {
      c0 += w[j] * next[j] * cur[j];
      c1 += w[j] * next[j] * prev[j];
    }
    double norm2 = 0.0;
    for (size_t j = 0; j < npts; ++j) {
      next[j] -= c0 * cur[j] + c1 * prev[j];
      norm2 += w[j] * next[j] * next[j];
    }
    const double beta = std::sqrt(norm2);
    if (!(beta > 1e-300)) throw NumericalError("exponential_time_rule: recurrence breakdown");
    for (size_t j = 0; j < npts; ++j) next[j] /= beta;
    off[static_cast<size_t>(k)] = beta;
    beta_prev = beta;
    prev = std::move(cur);
    cur = std::move(next);
  }

  auto rule = golub_welsch(diag, off, 1.0);
  QuadratureRule out;
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    const double ui = rule.nodes[i];
    if (!(ui > 0.0 && ui < 1.0) || !(rule.weights[i] > 0.0))
      throw NumericalError("exponential_time_rule: node outside (0, 1)");
    out.nodes.push_back(-std::log(ui));
    out.weights.push_back(rule.weights[i]);
  }
  // Ascending in t.
  std::reverse(out.nodes.begin(), out.nodes.end());
  std::reverse(out.weights.begin(), out.weights.end());

  std::lock_guard lock(cache_mutex);
  cache.emplace(std::make_pair(order, a), out);
  return out;
}

}  // namespace gausscap
