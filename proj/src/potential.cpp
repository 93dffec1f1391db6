#include "gausscap/potential.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "gausscap/error.hpp"
#include "gausscap/gauss_rules.hpp"
#include "gausscap/semigroup.hpp"

namespace gausscap {

void SobolevParams::validate() const {
  require(r >= 1, "Sobolev order r must be >= 1");
  require(p > 1.0 && std::isfinite(p), "Sobolev exponent p must lie in (1, inf)");
}

HermiteExpansion bessel_power(const HermiteExpansion& u, double s) {
  Eigen::VectorXd c = u.coeffs();
  for (size_t m = 0; m < u.basis().size(); ++m)
    c(static_cast<Eigen::Index>(m)) *= std::pow(1.0 + u.basis()[m].order(), 0.5 * s);
  return u.with_coeffs(std::move(c));
}

HermiteExpansion bessel_spectral(const HermiteExpansion& u, double r) {
  if (!(r > 0.0)) throw ValidationError("bessel_spectral: r must be > 0");
  return bessel_power(u, -r);
}

double bessel_quadrature(const ScalarField& f, double r, std::span<const double> x,
                         const QuadGrid& grid, int order, TimeRule rule) {
  if (!(r > 0.0)) throw ValidationError("bessel_quadrature: r must be > 0");
  require(order >= 1, "bessel_quadrature: order must be >= 1");
  const double a = 0.5 * r - 1.0;
  const auto q = rule == TimeRule::exponential ? exponential_time_rule(order, a) : gauss_laguerre(order, a);
  double sum = 0.0;
  for (size_t m = 0; m < q.nodes.size(); ++m) sum += q.weights[m] * mehler_apply(f, q.nodes[m], x, grid);
  return sum;
}

Eigen::MatrixXd derivative_matrix(const SpectralGrid& sg, int axis) {
  const int n = sg.space().n;
  if (axis < 0 || axis >= n) throw ValidationError("derivative: axis out of range");
  const auto M = static_cast<Eigen::Index>(sg.basis_size());
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(M, M);
  for (Eigen::Index m = 0; m < M; ++m) {
    const auto& alpha = sg.basis()[static_cast<size_t>(m)];
    if (auto beta = alpha.lowered(static_cast<size_t>(axis)))
      D(static_cast<Eigen::Index>(*sg.basis().position(*beta)), m) = std::sqrt(static_cast<double>(alpha[static_cast<size_t>(axis)]));
  }
  return D;
}

HermiteExpansion h_derivative(const HermiteExpansion& u, int axis) {
  const int n = u.space().n;
  if (axis < 0 || axis >= n) throw ValidationError("h_derivative: axis out of range");
  const auto& basis = u.basis();
  Eigen::VectorXd c = Eigen::VectorXd::Zero(u.coeffs().size());
  for (size_t m = 0; m < basis.size(); ++m) {
    const auto& alpha = basis[m];
    if (auto beta = alpha.lowered(static_cast<size_t>(axis)))
      c(static_cast<Eigen::Index>(*basis.position(*beta))) =
          std::sqrt(static_cast<double>(alpha[static_cast<size_t>(axis)])) * u.coeffs()(static_cast<Eigen::Index>(m));
  }
  return u.with_coeffs(std::move(c));
}

namespace {

size_t ipow(size_t b, int e) {
  size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// Nondecreasing axis tuples of length k and their number of orderings.
void nondecreasing_tuples(int n, int k, std::vector<std::vector<int>>& tuples, std::vector<double>& mult) {
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == k) {
      double m = std::tgamma(k + 1.0);
      for (int a = 0; a < n; ++a) m /= std::tgamma(1.0 + static_cast<double>(std::count(cur.begin(), cur.end(), a)));
      tuples.push_back(cur);
      mult.push_back(std::round(m));
      return;
    }
    for (int a = start; a < n; ++a) {
      cur.push_back(a);
      rec(a);
      cur.pop_back();
    }
  };
  rec(0);
}

}  // namespace

double DerivativeTensorSample::at(std::span<const int> idx) const {
  size_t flat = 0;
  for (int i : idx) flat = flat * static_cast<size_t>(n) + static_cast<size_t>(i);
  return entries.at(flat);
}

double DerivativeTensorSample::hs_norm() const {
  double s = 0.0;
  for (double v : entries) s += v * v;
  return std::sqrt(s);
}

double DerivativeTensorSample::asymmetry() const {
  double worst = 0.0;
  std::vector<int> idx(static_cast<size_t>(k));
  for (size_t flat = 0; flat < entries.size(); ++flat) {
    size_t rem = flat;
    for (int i = k - 1; i >= 0; --i) {
      idx[static_cast<size_t>(i)] = static_cast<int>(rem % static_cast<size_t>(n));
      rem /= static_cast<size_t>(n);
    }
    auto sorted = idx;
    std::sort(sorted.begin(), sorted.end());
    worst = std::max(worst, std::abs(entries[flat] - at(sorted)));
  }
  return worst;
}

DerivativeTensorSample derivative_tensor(const HermiteExpansion& u, int k, std::span<const double> x) {
  require(k >= 0, "derivative_tensor: k must be >= 0");
  const int n = u.space().n;
  if (x.size() != static_cast<size_t>(n)) throw ValidationError("derivative_tensor: point dimension mismatch");
  DerivativeTensorSample out;
  out.k = k;
  out.n = n;
  out.x.assign(x.begin(), x.end());
  out.entries.resize(ipow(static_cast<size_t>(n), k));
  // every ordering differentiated separately; symmetry is then a real check
  std::vector<int> idx(static_cast<size_t>(k));
  for (size_t flat = 0; flat < out.entries.size(); ++flat) {
    size_t rem = flat;
    for (int i = k - 1; i >= 0; --i) {
      idx[static_cast<size_t>(i)] = static_cast<int>(rem % static_cast<size_t>(n));
      rem /= static_cast<size_t>(n);
    }
    HermiteExpansion d = u;
    for (int i = k - 1; i >= 0; --i) d = h_derivative(d, idx[static_cast<size_t>(i)]);
    out.entries[flat] = eval(d, x);
  }
  return out;
}

double dk_hs_norm(const HermiteExpansion& u, int k, std::span<const double> x) {
  if (k == 0) return std::abs(eval(u, x));
  return derivative_tensor(u, k, x).hs_norm();
}

DerivativeOperators::DerivativeOperators(const SpectralGrid& sg, int order) : k(order) {
  require(order >= 0, "DerivativeOperators: k must be >= 0");
  const int n = sg.space().n;
  std::vector<std::vector<int>> tuples;
  nondecreasing_tuples(n, order, tuples, multiplicity);
  std::vector<Eigen::MatrixXd> D;
  for (int a = 0; a < n; ++a) D.push_back(derivative_matrix(sg, a));
  for (const auto& t : tuples) {
    Eigen::MatrixXd A = sg.basis_at_nodes();
    for (int a : t) A = A * D[static_cast<size_t>(a)];
    maps.push_back(std::move(A));
  }
}

Eigen::VectorXd DerivativeOperators::nodal_hs_norms(const Eigen::VectorXd& coeffs) const {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(maps.front().rows());
  for (size_t t = 0; t < maps.size(); ++t) s += multiplicity[t] * (maps[t] * coeffs).cwiseAbs2();
  return s.cwiseSqrt();
}

std::vector<double> sobolev_terms(const HermiteExpansion& u, const SobolevParams& params,
                                  const SpectralGrid& sg) {
  require(params.r >= 0, "sobolev_norm: r must be >= 0");
  require(params.p >= 1.0, "sobolev_norm: p must be >= 1");
  require(u.space() == sg.space(), "sobolev_norm: expansion belongs to another model space");
  const int n = sg.space().n;
  std::vector<double> terms;
  for (int k = 0; k <= params.r; ++k) {
    if (k > sg.space().K) {
      terms.push_back(0.0);
      continue;
    }
    std::vector<std::vector<int>> tuples;
    std::vector<double> mult;
    nondecreasing_tuples(n, k, tuples, mult);
    Eigen::VectorXd sq = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sg.node_count()));
    for (size_t t = 0; t < tuples.size(); ++t) {
      HermiteExpansion d = u;
      for (int a : tuples[t]) d = h_derivative(d, a);
      sq += mult[t] * sg.nodal_values(d).cwiseAbs2();
    }
    terms.push_back(sg.lp_norm(sq.cwiseSqrt(), params.p));
  }
  return terms;
}

double sobolev_norm(const HermiteExpansion& u, const SobolevParams& params, const SpectralGrid& sg) {
  double s = 0.0;
  for (double t : sobolev_terms(u, params, sg)) s += t;
  return s;
}

double bessel_norm(const HermiteExpansion& u, double s, double p, const SpectralGrid& sg) {
  return sg.lp_norm(sg.nodal_values(bessel_power(u, s)), p);
}

double meyer_ratio(const HermiteExpansion& u, const SobolevParams& params, const SpectralGrid& sg) {
  params.validate();
  const double den = sobolev_norm(u, params, sg);
  if (!(den > 0.0)) throw ValidationError("meyer_ratio: zero input");
  return bessel_norm(u, params.r, params.p, sg) / den;
}

namespace {

// max over index tuples of |A(e_{i1}, .., e_{ik})| for the columns of F
double frame_value(const DerivativeTensorSample& A, const Eigen::MatrixXd& F) {
  const int n = A.n;
  if (A.k == 1) {
    Eigen::Map<const Eigen::VectorXd> a(A.entries.data(), n);
    return (F.transpose() * a).cwiseAbs().maxCoeff();
  }
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> a(A.entries.data(), n, n);
  return (F.transpose() * a * F).cwiseAbs().maxCoeff();
}

}  // namespace

HsBoundReport hs_bound_check(const DerivativeTensorSample& A, int trials, int refine_steps,
                             std::uint64_t seed) {
  if (A.k != 1 && A.k != 2) throw ValidationError("hs_bound_check: k must be 1 or 2");
  require(A.entries.size() == ipow(static_cast<size_t>(A.n), A.k), "hs_bound_check: tensor shape mismatch");
  const double scale = std::max(1.0, A.hs_norm());
  if (A.asymmetry() > 1e-10 * scale) throw ValidationError("hs_bound_check: tensor is not symmetric");
  require(trials >= 1, "hs_bound_check: trials must be >= 1");

  const int n = A.n;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  // the coordinate frame first, then random ones
  Eigen::MatrixXd best = Eigen::MatrixXd::Identity(n, n);
  double best_val = frame_value(A, best);
  for (int t = 1; t < trials; ++t) {
    Eigen::MatrixXd G(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) G(i, j) = nd(rng);
    Eigen::MatrixXd F = Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ();
    const double v = frame_value(A, F);
    if (v > best_val) {
      best_val = v;
      best = F;
    }
  }
  double step = 0.5;
  for (int s = 0; s < refine_steps && n > 1; ++s) {
    bool improved = false;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        for (double ang : {step, -step}) {
          Eigen::MatrixXd F = best;
          const double c = std::cos(ang), sn = std::sin(ang);
          F.col(a) = c * best.col(a) + sn * best.col(b);
          F.col(b) = -sn * best.col(a) + c * best.col(b);
          const double v = frame_value(A, F);
          if (v > best_val) {
            best_val = v;
            best = F;
            improved = true;
          }
        }
    if (!improved) step *= 0.5;
  }
  HsBoundReport rep;
  rep.hs_norm = A.hs_norm();
  rep.sup_estimate = best_val;
  rep.bound = 2.0 * std::pow(static_cast<double>(A.k), A.k) * best_val;
  rep.holds = rep.hs_norm <= rep.bound;
  return rep;
}

}  // namespace gausscap
