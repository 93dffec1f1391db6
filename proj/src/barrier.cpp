#include "gausscap/barrier.hpp"

#include <cmath>

#include "gausscap/error.hpp"

namespace gausscap {

namespace {

double power_objective(const Eigen::VectorXd& w, double p, const Eigen::VectorXd& f) {
  return (w.array() * f.array().pow(p)).sum();
}

// phi(new) - phi(old) for phi = t F - sum log f - sum log s, formed termwise so
// that large t does not swamp the barrier part.
double barrier_change(const Eigen::VectorXd& w, double p, double t, const Eigen::VectorXd& f0,
                      const Eigen::VectorXd& f1, const Eigen::VectorXd& s0, const Eigen::VectorXd& s1) {
  const double dF = (w.array() * (f1.array().pow(p) - f0.array().pow(p))).sum();
  const double dlf = (f1.array() / f0.array()).log().sum();
  const double dls = (s1.array() / s0.array()).log().sum();
  return t * dF - dlf - dls;
}

}  // namespace

double nodal_power_dual(const Eigen::VectorXd& w, double p, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& aty) {
  const double e = p / (p - 1.0);
  double pen = 0.0;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    const double s = aty(j) / w(j);
    if (s > 0.0) pen += w(j) * std::pow(s / p, e);
  }
  return y.sum() - (p - 1.0) * pen;
}

BarrierResult solve_nodal_power_barrier(const Eigen::VectorXd& w, double p, const Eigen::MatrixXd& B,
                                        const Eigen::MatrixXd& C, const BarrierOptions& opts) {
  require(p > 1.0, "barrier: p must exceed 1");
  require(C.rows() == w.size() && B.cols() == C.cols(), "barrier: dimension mismatch");
  require(B.rows() > 0, "barrier: no covering constraints");
  const Eigen::Index N = w.size();
  const Eigen::Index k = B.rows();
  const Eigen::Index M = B.cols();
  const double m_total = static_cast<double>(N + k);

  auto cover = [&](const Eigen::VectorXd& f) -> Eigen::VectorXd { return B * (C.transpose() * f); };

  Eigen::VectorXd f = Eigen::VectorXd::Constant(N, 2.0);
  Eigen::VectorXd s = cover(f).array() - 1.0;
  if (s.minCoeff() <= 0.0) throw NumericalError("barrier: constant start is not strictly feasible");
  double t = m_total / power_objective(w, p, f);

  BarrierResult res;
  int steps = 0;
  while (steps < opts.max_newton) {
    // centering
    for (int inner = 0; inner < 200 && steps < opts.max_newton; ++inner, ++steps) {
      const Eigen::VectorXd inv_s = s.cwiseInverse();
      const Eigen::VectorXd grad = (t * p * w.array() * f.array().pow(p - 1.0) - f.array().inverse()).matrix() -
                                   C * (B.transpose() * inv_s);
      const Eigen::VectorXd D = (t * p * (p - 1.0) * w.array() * f.array().pow(p - 2.0) + f.array().square().inverse()).matrix();
      const Eigen::MatrixXd G = B.transpose() * inv_s.cwiseAbs2().asDiagonal() * B;
      const Eigen::VectorXd Dinv = D.cwiseInverse();
      const Eigen::MatrixXd DinvC = Dinv.asDiagonal() * C;
      const Eigen::MatrixXd K = C.transpose() * DinvC;
      const Eigen::PartialPivLU<Eigen::MatrixXd> lu(Eigen::MatrixXd::Identity(M, M) + G * K);
      auto solve = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        const Eigen::VectorXd dv = Dinv.cwiseProduct(v);
        return dv - DinvC * lu.solve(G * (C.transpose() * dv));
      };
      Eigen::VectorXd dx = solve(-grad);
      // one refinement pass against the full operator
      const Eigen::VectorXd resid = -grad - (D.cwiseProduct(dx) + C * (G * (C.transpose() * dx)));
      dx += solve(resid);
      const double lam2 = -grad.dot(dx);
      if (!(lam2 >= 0.0) || !std::isfinite(lam2)) throw NumericalError("barrier: Newton system lost definiteness");
      if (lam2 < 1e-10) break;

      const Eigen::VectorXd ds = cover(dx);
      double alpha = 1.0;
      for (Eigen::Index j = 0; j < N; ++j)
        if (dx(j) < 0.0) alpha = std::min(alpha, -0.99 * f(j) / dx(j));
      for (Eigen::Index i = 0; i < k; ++i)
        if (ds(i) < 0.0) alpha = std::min(alpha, -0.99 * s(i) / ds(i));
      Eigen::VectorXd f1, s1;
      for (int ls = 0; ls < 60; ++ls) {
        f1 = f + alpha * dx;
        s1 = s + alpha * ds;
        if (barrier_change(w, p, t, f, f1, s, s1) <= -0.25 * alpha * lam2) break;
        alpha *= 0.5;
      }
      f = f1;
      s = cover(f).array() - 1.0;
    }

    const Eigen::VectorXd y = (t * s.array()).inverse().matrix();
    const Eigen::VectorXd aty = C * (B.transpose() * y);
    const double F = power_objective(w, p, f);
    const double Dv = nodal_power_dual(w, p, y, aty);
    res.objective = F;
    res.lower_bound = std::max(Dv, 0.0);
    res.y = y;
    if (F - Dv <= opts.rel_gap * F) {
      res.converged = true;
      break;
    }
    t *= opts.growth;
    if (t > 1e18) break;
  }
  res.x = f;
  res.newton_steps = steps;
  return res;
}

BarrierResult solve_dense_power_barrier(const Eigen::VectorXd& w, double p, const Eigen::MatrixXd& H,
                                        const Eigen::MatrixXd& A, const Eigen::VectorXd& c0,
                                        const BarrierOptions& opts) {
  require(p > 1.0, "barrier: p must exceed 1");
  require(H.rows() == w.size() && A.cols() == H.cols() && c0.size() == H.cols(), "barrier: dimension mismatch");
  const double m_total = static_cast<double>(H.rows() + A.rows());

  Eigen::VectorXd c = c0;
  Eigen::VectorXd f = H * c;
  Eigen::VectorXd s = A * c - Eigen::VectorXd::Ones(A.rows());
  if (f.minCoeff() <= 0.0 || (s.size() > 0 && s.minCoeff() <= 0.0))
    throw NumericalError("barrier: start point is not strictly feasible");
  double t = m_total / power_objective(w, p, f);

  BarrierResult res;
  int steps = 0;
  while (steps < opts.max_newton) {
    for (int inner = 0; inner < 200 && steps < opts.max_newton; ++inner, ++steps) {
      const Eigen::VectorXd inv_s = s.cwiseInverse();
      const Eigen::VectorXd gf = (t * p * w.array() * f.array().pow(p - 1.0) - f.array().inverse()).matrix();
      const Eigen::VectorXd grad = H.transpose() * gf - A.transpose() * inv_s;
      const Eigen::VectorXd D = (t * p * (p - 1.0) * w.array() * f.array().pow(p - 2.0) + f.array().square().inverse()).matrix();
      const Eigen::MatrixXd Hess = H.transpose() * D.asDiagonal() * H + A.transpose() * inv_s.cwiseAbs2().asDiagonal() * A;
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(Hess);
      const Eigen::VectorXd dc = ldlt.solve(-grad);
      const double lam2 = -grad.dot(dc);
      if (!(lam2 >= 0.0) || !std::isfinite(lam2)) throw NumericalError("barrier: Newton system lost definiteness");
      if (lam2 < 1e-10) break;

      const Eigen::VectorXd df = H * dc;
      const Eigen::VectorXd ds = A * dc;
      double alpha = 1.0;
      for (Eigen::Index j = 0; j < f.size(); ++j)
        if (df(j) < 0.0) alpha = std::min(alpha, -0.99 * f(j) / df(j));
      for (Eigen::Index i = 0; i < s.size(); ++i)
        if (ds(i) < 0.0) alpha = std::min(alpha, -0.99 * s(i) / ds(i));
      Eigen::VectorXd f1, s1;
      for (int ls = 0; ls < 60; ++ls) {
        f1 = f + alpha * df;
        s1 = s + alpha * ds;
        if (barrier_change(w, p, t, f, f1, s, s1) <= -0.25 * alpha * lam2) break;
        alpha *= 0.5;
      }
      c += alpha * dc;
      f = H * c;
      s = A * c - Eigen::VectorXd::Ones(A.rows());
    }
    const double F = power_objective(w, p, f);
    res.objective = F;
    res.lower_bound = std::max(F - m_total / t, 0.0);
    res.y = (t * s.array()).inverse().matrix();
    if (m_total / t <= opts.rel_gap * F) {
      res.converged = true;
      break;
    }
    t *= opts.growth;
    if (t > 1e18) break;
  }
  res.x = c;
  res.newton_steps = steps;
  return res;
}

}  // namespace gausscap
