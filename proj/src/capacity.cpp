#include "gausscap/capacity.hpp"

#include <cmath>
#include <cstdio>

#include "gausscap/barrier.hpp"
#include "gausscap/error.hpp"
#include "gausscap/qp_active_set.hpp"

namespace gausscap {

std::string to_string(CapacityDefinition d) {
  return d == CapacityDefinition::potential ? "potential" : "variational";
}

CapacityDefinition definition_from_string(const std::string& s) {
  if (s == "potential") return CapacityDefinition::potential;
  if (s == "variational") return CapacityDefinition::variational;
  throw ValidationError("unknown capacity definition '" + s + "' (expected potential or variational)");
}

std::string to_string(Trend t) {
  switch (t) {
    case Trend::zero:
      return "zero";
    case Trend::bounded_away:
      return "bounded away";
    case Trend::inconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

double default_margin(const RegionSpec& U, const SpectralGrid& sg) {
  return U.margin.value_or(sg.grid().spacing());
}

namespace {

std::vector<Eigen::Index> mask_indices(const std::vector<char>& mask) {
  std::vector<Eigen::Index> idx;
  for (size_t j = 0; j < mask.size(); ++j)
    if (mask[j]) idx.push_back(static_cast<Eigen::Index>(j));
  return idx;
}

Eigen::MatrixXd rows_of(const Eigen::MatrixXd& A, const std::vector<Eigen::Index>& idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), A.cols());
  for (size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = A.row(idx[i]);
  return out;
}

Eigen::VectorXd potential_multiplier(const SpectralGrid& sg, double r) {
  return sg.orders().unaryExpr([r](double a) { return std::pow(1.0 + a, -0.5 * r); });
}

GridMeta meta_for(const SpectralGrid& sg, double margin, size_t k) {
  return {sg.space().n, sg.space().K, sg.space().Q, margin, k};
}

double falling(double a, int k) {
  double v = 1.0;
  for (int i = 0; i < k; ++i) v *= (a - i);
  return std::max(v, 0.0);
}

// Compressed constraint rows for H_U c = 1: B c = b with orthonormal rows.
struct EqualityBlock {
  Eigen::MatrixXd B;
  Eigen::VectorXd b;
  Eigen::MatrixXd Z;  // null-space basis
  bool rank_deficient = false;
};

EqualityBlock compress_equalities(const Eigen::MatrixXd& HU) {
  const Eigen::Index k = HU.rows();
  const Eigen::Index M = HU.cols();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(HU, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::Index rank = 0;
  const double cut = 1e-10 * (sv.size() > 0 ? sv(0) : 0.0);
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) ++rank;
  EqualityBlock e;
  e.B = svd.matrixV().leftCols(rank).transpose();
  e.b = (svd.matrixU().leftCols(rank).transpose() * Eigen::VectorXd::Ones(k)).cwiseQuotient(sv.head(rank));
  e.Z = svd.matrixV().rightCols(M - rank);
  e.rank_deficient = k > M || rank < k;
  return e;
}

// p = 2: (sum_k sqrt(c^T G_k c))^2 with diagonal G_k, by alternating over the
// simplex weights theta in (sum a_k)^2 = min sum a_k^2 / theta_k.
Eigen::VectorXd solve_p2_variational(const Eigen::VectorXd& orders, int r, const EqualityBlock& eq, int& iters) {
  const Eigen::Index M = orders.size();
  std::vector<Eigen::VectorXd> G;
  for (int k = 0; k <= r; ++k) G.push_back(orders.unaryExpr([k](double a) { return falling(a, k); }));
  std::vector<double> theta(static_cast<size_t>(r + 1), 1.0 / (r + 1));
  Eigen::VectorXd c = Eigen::VectorXd::Zero(M);
  double prev = std::numeric_limits<double>::infinity();
  for (iters = 0; iters < 20000; ++iters) {
    Eigen::VectorXd d = Eigen::VectorXd::Zero(M);
    for (int k = 0; k <= r; ++k) d += G[static_cast<size_t>(k)] / theta[static_cast<size_t>(k)];
    const Eigen::VectorXd dinv = d.cwiseInverse();
    const Eigen::MatrixXd S = eq.B * dinv.asDiagonal() * eq.B.transpose();
    c = dinv.asDiagonal() * (eq.B.transpose() * S.ldlt().solve(eq.b));
    std::vector<double> a(static_cast<size_t>(r + 1));
    double sum = 0.0;
    for (int k = 0; k <= r; ++k) {
      a[static_cast<size_t>(k)] = std::sqrt(c.dot(G[static_cast<size_t>(k)].cwiseProduct(c)));
      sum += a[static_cast<size_t>(k)];
    }
    const double obj = sum * sum;
    for (int k = 0; k <= r; ++k) theta[static_cast<size_t>(k)] = std::max(a[static_cast<size_t>(k)], 1e-300) / sum;
    if (std::abs(prev - obj) <= 1e-15 * obj) break;
    prev = obj;
  }
  return c;
}

// sum_k (sum_j w_j (|D^k u(x_j)|^2 + eps^2)^{p/2})^{1/p} with gradient and Hessian.
struct SmoothedNorms {
  double value = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

SmoothedNorms smoothed_norms(const std::vector<DerivativeOperators>& ops, const Eigen::VectorXd& w, double p,
                             double eps, const Eigen::VectorXd& c, bool with_hess) {
  const Eigen::Index M = c.size();
  const Eigen::Index N = w.size();
  SmoothedNorms out;
  out.grad = Eigen::VectorXd::Zero(M);
  if (with_hess) out.hess = Eigen::MatrixXd::Zero(M, M);
  for (const auto& op : ops) {
    std::vector<Eigen::VectorXd> vals;
    Eigen::VectorXd q = Eigen::VectorXd::Constant(N, eps * eps);
    for (size_t t = 0; t < op.maps.size(); ++t) {
      vals.push_back(op.maps[t] * c);
      q += op.multiplicity[t] * vals.back().cwiseAbs2();
    }
    const double S = (w.array() * q.array().pow(0.5 * p)).sum();
    if (!(S > 0.0)) continue;
    const double Nk = std::pow(S, 1.0 / p);
    out.value += Nk;
    const Eigen::VectorXd rho = (w.array() * q.array().pow(0.5 * p - 1.0)).matrix();
    Eigen::VectorXd g = Eigen::VectorXd::Zero(M);
    for (size_t t = 0; t < op.maps.size(); ++t)
      g += op.multiplicity[t] * (op.maps[t].transpose() * rho.cwiseProduct(vals[t]));
    const double scale = std::pow(S, 1.0 / p - 1.0);
    out.grad += scale * g;
    if (!with_hess) continue;
    Eigen::MatrixXd dg = Eigen::MatrixXd::Zero(M, M);
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(N, M);
    for (size_t t = 0; t < op.maps.size(); ++t) {
      dg += op.multiplicity[t] * (op.maps[t].transpose() * rho.asDiagonal() * op.maps[t]);
      V += op.multiplicity[t] * (vals[t].asDiagonal() * op.maps[t]);
    }
    const Eigen::VectorXd coef = ((p - 2.0) * w.array() * q.array().pow(0.5 * p - 2.0)).matrix();
    dg += V.transpose() * coef.asDiagonal() * V;
    out.hess += scale * (dg - (p - 1.0) / S * g * g.transpose());
  }
  return out;
}

}  // namespace

CapacityResult cap_potential_mask(const std::vector<char>& mask, const SobolevParams& params,
                                  const SpectralGrid& sg, const SolverOptions& opts) {
  params.validate();
  require(mask.size() == sg.node_count(), "cap_potential: mask has the wrong length");
  const auto idx = mask_indices(mask);
  const auto N = static_cast<Eigen::Index>(sg.node_count());
  CapacityResult res;
  res.definition = CapacityDefinition::potential;
  res.grid_meta = meta_for(sg, 0.0, idx.size());
  if (idx.empty()) {
    res.optimizer = Eigen::VectorXd::Zero(N);
    res.method = "empty";
    return res;
  }
  const Eigen::MatrixXd& H = sg.basis_at_nodes();
  const Eigen::VectorXd& w = sg.grid().weights;
  const Eigen::MatrixXd B = rows_of(H, idx) * potential_multiplier(sg, params.r).asDiagonal();
  const Eigen::MatrixXd C = w.asDiagonal() * H;
  const auto k = static_cast<Eigen::Index>(idx.size());

  Eigen::VectorXd f;
  if (params.p == 2.0) {
    // g = sqrt(w) f turns the objective into |g|^2
    const Eigen::VectorXd sqw = w.cwiseSqrt();
    const Eigen::MatrixXd At = B * (H.transpose() * sqw.asDiagonal());
    Eigen::MatrixXd Cqp(N, N + k);
    Cqp.leftCols(N).setIdentity();
    Cqp.rightCols(k) = At.transpose();
    Eigen::VectorXd b(N + k);
    b.head(N).setZero();
    b.tail(k).setOnes();
    const auto qp = solve_qp_goldfarb_idnani(Eigen::MatrixXd::Identity(N, N), Eigen::VectorXd::Zero(N), Cqp, b,
                                             opts.max_iter);
    f = qp.x.cwiseQuotient(sqw).cwiseMax(0.0);
    res.value = w.dot(f.cwiseAbs2());
    const Eigen::VectorXd y = 2.0 * qp.multipliers.tail(k);
    const double dual = nodal_power_dual(w, 2.0, y, C * (B.transpose() * y));
    res.gap = std::max(res.value - dual, 0.0);
    res.iterations = qp.iterations;
    res.converged = qp.converged && res.gap <= opts.qp_gap;
    res.method = "active-set QP (Goldfarb-Idnani)";
  } else {
    BarrierOptions bo;
    bo.rel_gap = opts.rel_tol;
    bo.max_newton = opts.max_iter;
    const auto br = solve_nodal_power_barrier(w, params.p, B, C, bo);
    f = br.x;
    res.value = br.objective;
    res.gap = br.objective - br.lower_bound;
    res.iterations = br.newton_steps;
    res.converged = br.converged;
    res.method = "primal log-barrier Newton";
  }
  res.optimizer = f;
  const Eigen::VectorXd Af = B * (C.transpose() * f);
  res.residual = std::max(0.0, 1.0 - Af.minCoeff());
  return res;
}

CapacityResult cap_variational_mask(const std::vector<char>& mask, const SobolevParams& params,
                                    const SpectralGrid& sg, const SolverOptions& opts) {
  params.validate();
  require(mask.size() == sg.node_count(), "cap_variational: mask has the wrong length");
  const auto idx = mask_indices(mask);
  const auto M = static_cast<Eigen::Index>(sg.basis_size());
  CapacityResult res;
  res.definition = CapacityDefinition::variational;
  res.grid_meta = meta_for(sg, 0.0, idx.size());
  if (idx.empty()) {
    res.optimizer = Eigen::VectorXd::Zero(M);
    res.method = "empty";
    return res;
  }
  const Eigen::MatrixXd HU = rows_of(sg.basis_at_nodes(), idx);
  const auto eq = compress_equalities(HU);
  res.rank_deficient = eq.rank_deficient;
  const int r = std::min(params.r, sg.space().K);

  int iters = 0;
  Eigen::VectorXd c = solve_p2_variational(sg.orders(), r, eq, iters);
  res.iterations = iters;
  res.method = "equality-constrained least squares (reweighted)";
  if (params.p != 2.0 && eq.Z.cols() > 0) {
    res.method = "null-space Newton with smoothing continuation";
    std::vector<DerivativeOperators> ops;
    for (int k = 0; k <= r; ++k) ops.emplace_back(sg, k);
    const Eigen::VectorXd& w = sg.grid().weights;
    const double p = params.p;
    bool ok = true;
    double eps = 1e-1;
    for (; eps >= 1e-8 * 0.999; eps *= 0.1) {
      bool stage_ok = false;
      for (int it = 0; it < 200 && res.iterations < opts.max_iter; ++it, ++res.iterations) {
        const auto s = smoothed_norms(ops, w, p, eps, c, true);
        const Eigen::VectorXd gz = eq.Z.transpose() * s.grad;
        Eigen::MatrixXd Hz = eq.Z.transpose() * s.hess * eq.Z;
        Hz = 0.5 * (Hz + Hz.transpose());
        Eigen::LDLT<Eigen::MatrixXd> ldlt(Hz);
        double shift = 0.0;
        while (ldlt.info() != Eigen::Success || !ldlt.isPositive() || (ldlt.vectorD().array() <= 0.0).any()) {
          shift = shift == 0.0 ? 1e-12 * std::max(1.0, Hz.diagonal().cwiseAbs().maxCoeff()) : 10.0 * shift;
          ldlt.compute(Hz + shift * Eigen::MatrixXd::Identity(Hz.rows(), Hz.cols()));
          if (shift > 1e6) break;
        }
        const Eigen::VectorXd dz = ldlt.solve(-gz);
        const double dec = -gz.dot(dz);
        if (!(dec >= 0.0)) break;
        if (dec <= 1e-14 * std::max(1.0, s.value)) {
          stage_ok = true;
          break;
        }
        const Eigen::VectorXd dc = eq.Z * dz;
        double alpha = 1.0;
        for (int ls = 0; ls < 60; ++ls) {
          if (smoothed_norms(ops, w, p, eps, c + alpha * dc, false).value <= s.value - 1e-4 * alpha * dec) break;
          alpha *= 0.5;
        }
        c += alpha * dc;
        if (alpha * dz.norm() <= 1e-15 * std::max(1.0, c.norm())) {
          stage_ok = true;
          break;
        }
      }
      ok = ok && stage_ok;
    }
    res.gap = 1e-8;
    res.converged = ok;
  }
  const auto u = sg.from_coeffs(c);
  res.value = std::pow(sobolev_norm(u, params, sg), params.p);
  res.optimizer = c;
  res.residual = (HU * c - Eigen::VectorXd::Ones(HU.rows())).cwiseAbs().maxCoeff();
  return res;
}

CapacityResult cap_potential(const RegionSpec& U, const SobolevParams& params, const SpectralGrid& sg,
                             const SolverOptions& opts) {
  if (U.is_empty()) {
    auto res = cap_potential_mask(std::vector<char>(sg.node_count(), 0), params, sg, opts);
    res.grid_meta.margin = default_margin(U, sg);
    return res;
  }
  const double margin = default_margin(U, sg);
  const auto mask = node_mask(U, sg.grid(), margin);
  if (mask_indices(mask).empty())
    throw ValidationError("capacity: region has no grid node within margin " + std::to_string(margin) +
                          "; raise the margin or use an odd Q");
  auto res = cap_potential_mask(mask, params, sg, opts);
  res.grid_meta.margin = margin;
  return res;
}

CapacityResult cap_variational(const RegionSpec& U, const SobolevParams& params, const SpectralGrid& sg,
                               const SolverOptions& opts) {
  if (U.is_empty()) {
    auto res = cap_variational_mask(std::vector<char>(sg.node_count(), 0), params, sg, opts);
    res.grid_meta.margin = default_margin(U, sg);
    return res;
  }
  const double margin = default_margin(U, sg);
  const auto mask = node_mask(U, sg.grid(), margin);
  if (mask_indices(mask).empty())
    throw ValidationError("capacity: region has no grid node within margin " + std::to_string(margin) +
                          "; raise the margin or use an odd Q");
  auto res = cap_variational_mask(mask, params, sg, opts);
  res.grid_meta.margin = margin;
  return res;
}

CapacityResult capacity(CapacityDefinition def, const RegionSpec& U, const SobolevParams& params,
                        const SpectralGrid& sg, const SolverOptions& opts) {
  return def == CapacityDefinition::potential ? cap_potential(U, params, sg, opts)
                                              : cap_variational(U, params, sg, opts);
}

std::vector<double> capacity_trend(CapacityDefinition def, const RegionSpec& U, const SobolevParams& params,
                                   const std::vector<GaussModelSpace>& spaces, const SolverOptions& opts) {
  std::vector<double> out;
  for (const auto& s : spaces) out.push_back(capacity(def, U, params, SpectralGrid(s), opts).value);
  return out;
}

LemmaDescriptionReport lemma_description_check(const RegionSpec& U, const SobolevParams& params,
                                               const SpectralGrid& sg, const SolverOptions& opts) {
  LemmaDescriptionReport rep;
  rep.nodal = cap_potential(U, params, sg, opts);
  rep.cone = rep.nodal;
  rep.cone.method = "empty";
  if (U.is_empty()) return rep;

  const double margin = default_margin(U, sg);
  const auto idx = mask_indices(node_mask(U, sg.grid(), margin));
  const Eigen::MatrixXd& H = sg.basis_at_nodes();
  const auto M = static_cast<Eigen::Index>(sg.basis_size());
  const auto N = static_cast<Eigen::Index>(sg.node_count());
  const auto k = static_cast<Eigen::Index>(idx.size());
  const Eigen::MatrixXd A = rows_of(H, idx) * potential_multiplier(sg, params.r).asDiagonal();

  CapacityResult cone;
  cone.definition = CapacityDefinition::potential;
  cone.grid_meta = rep.nodal.grid_meta;
  Eigen::VectorXd c;
  if (params.p == 2.0) {
    // sum_j w_j (H c)_j^2 = |c|^2 by exactness of the grid
    Eigen::MatrixXd Cqp(M, N + k);
    Cqp.leftCols(N) = H.transpose();
    Cqp.rightCols(k) = A.transpose();
    Eigen::VectorXd b(N + k);
    b.head(N).setZero();
    b.tail(k).setOnes();
    const auto qp = solve_qp_goldfarb_idnani(Eigen::MatrixXd::Identity(M, M), Eigen::VectorXd::Zero(M), Cqp, b,
                                             opts.max_iter);
    c = qp.x;
    cone.iterations = qp.iterations;
    cone.converged = qp.converged;
    cone.method = "active-set QP on coefficients";
  } else {
    BarrierOptions bo;
    bo.rel_gap = opts.rel_tol;
    bo.max_newton = opts.max_iter;
    Eigen::VectorXd c0 = Eigen::VectorXd::Zero(M);
    c0(0) = 2.0;
    const auto br = solve_dense_power_barrier(sg.grid().weights, params.p, H, A, c0, bo);
    c = br.x;
    cone.iterations = br.newton_steps;
    cone.converged = br.converged;
    cone.gap = br.objective - br.lower_bound;
    cone.method = "log-barrier Newton on coefficients";
  }
  const Eigen::VectorXd f = H * c;
  cone.optimizer = f;
  cone.value = sg.grid().weights.dot(f.cwiseAbs().array().pow(params.p).matrix());
  cone.residual = std::max(0.0, 1.0 - (A * c).minCoeff());
  rep.cone = cone;
  const double base = std::max(rep.nodal.value, 1e-300);
  rep.relative_gap = (rep.nodal.value == 0.0 && cone.value == 0.0) ? 0.0 : (cone.value - rep.nodal.value) / base;
  return rep;
}

EquivalenceReport equivalence_ratio(const RegionSpec& U, const SobolevParams& params, const SpectralGrid& sg,
                                    const SmoothTruncation& T, const SolverOptions& opts) {
  EquivalenceReport rep;
  rep.cap = cap_potential(U, params, sg, opts);
  rep.ccap = cap_variational(U, params, sg, opts);
  if (rep.cap.value > 0.0) rep.ratio = rep.ccap.value / rep.cap.value;
  rep.violation_candidate = rep.cap.value <= 1e-12 && rep.ccap.value > 1e-8;
  if (U.is_empty()) return rep;

  // witness T(V_r f) from the potential optimizer, forced onto u = 1 on U
  const auto f = sg.expand_nodal(rep.cap.optimizer);
  const Eigen::VectorXd g = sg.nodal_values(bessel_spectral(f, params.r)).unaryExpr([&](double v) { return T(v); });
  const auto uT = sg.expand_nodal(g);
  rep.witness_aliasing = (sg.nodal_values(uT) - g).cwiseAbs().maxCoeff();
  const auto idx = mask_indices(node_mask(U, sg.grid(), default_margin(U, sg)));
  const auto eq = compress_equalities(rows_of(sg.basis_at_nodes(), idx));
  const Eigen::VectorXd cw = uT.coeffs() - eq.B.transpose() * (eq.B * uT.coeffs() - eq.b);
  rep.witness_projection = (cw - uT.coeffs()).norm();
  rep.witness_cost = std::pow(sobolev_norm(sg.from_coeffs(cw), params, sg), params.p);
  return rep;
}

bool generation_condition(int m, double p) {
  require(m >= 1, "generation condition: m must be >= 1");
  require(p > 1.0, "generation condition: p must exceed 1");
  return std::abs(2.0 / p - 1.0) < 1.0 / m;
}

Trend classify_trend(const std::vector<double>& values, double zero_threshold, double tolerance) {
  require(values.size() >= 3, "trend: at least three refinement levels are required");
  for (size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[i - 1] * (1.0 + tolerance) + tolerance * 1e-3) return Trend::inconclusive;
  const double last = values.back();
  const double prev = values[values.size() - 2];
  if (last < zero_threshold) return Trend::zero;
  if (last >= 0.5 * prev) return Trend::bounded_away;
  return Trend::inconclusive;
}

UniquenessReport uniqueness_verdict(const RegionSpec& Sigma, int m, double p, const SpectralGrid& sg,
                                    double zero_threshold, const std::vector<double>& margins,
                                    const SolverOptions& opts) {
  require(margins.size() >= 3, "uniqueness: at least three refinement levels are required");
  for (size_t i = 1; i < margins.size(); ++i)
    require(margins[i] < margins[i - 1], "uniqueness: margins must decrease");
  UniquenessReport rep;
  rep.margins = margins;
  rep.condition = generation_condition(m, p);
  const SobolevParams params{2 * m, p};
  for (double mg : margins) {
    RegionSpec S = Sigma;
    S.margin = mg;
    rep.values.push_back(cap_potential(S, params, sg, opts).value);
  }
  rep.trend = classify_trend(rep.values, zero_threshold);
  char pbuf[32];
  std::snprintf(pbuf, sizeof pbuf, "%g", p);
  if (rep.trend == Trend::inconclusive)
    rep.verdict = "inconclusive";
  else if (rep.trend == Trend::bounded_away)
    rep.verdict = std::string("not L^") + pbuf + "-unique";
  else if (rep.condition)
    rep.verdict = std::string("L^") + pbuf + "-unique";
  else
    rep.verdict = "generation condition fails; no verdict";
  return rep;
}

WeakTypeReport weak_type_check(const Eigen::VectorXd& f, double R, const SobolevParams& params,
                               const SpectralGrid& sg, const SolverOptions& opts) {
  require(R > 0.0, "weak-type: level must be positive");
  require(f.size() == static_cast<Eigen::Index>(sg.node_count()) && f.minCoeff() >= 0.0,
          "weak-type: f must be nonnegative nodal values");
  const Eigen::VectorXd v = sg.nodal_values(bessel_spectral(sg.expand_nodal(f), params.r));
  std::vector<char> mask(sg.node_count(), 0);
  WeakTypeReport rep;
  rep.level = R;
  for (size_t j = 0; j < mask.size(); ++j)
    if (v(static_cast<Eigen::Index>(j)) > R) {
      mask[j] = 1;
      ++rep.nodes;
    }
  rep.capacity = cap_potential_mask(mask, params, sg, opts).value;
  rep.bound = std::pow(R, -params.p) * sg.grid().weights.dot(f.array().pow(params.p).matrix());
  rep.holds = rep.capacity <= rep.bound * (1.0 + 10.0 * opts.rel_tol) + opts.qp_gap;
  return rep;
}

}  // namespace gausscap
