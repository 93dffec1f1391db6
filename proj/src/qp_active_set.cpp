#include "gausscap/qp_active_set.hpp"

#include <cmath>
#include <limits>

#include "gausscap/error.hpp"

namespace gausscap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Rotation taking (a, b) to (hypot, 0).
struct Givens {
  double c = 1.0;
  double s = 0.0;
  double h = 0.0;
};

Givens make_givens(double a, double b) {
  Givens g;
  g.h = std::hypot(a, b);
  if (g.h == 0.0) return g;
  g.c = a / g.h;
  g.s = b / g.h;
  return g;
}

void rotate_cols(Eigen::MatrixXd& J, Eigen::Index i, Eigen::Index j, const Givens& g) {
  for (Eigen::Index r = 0; r < J.rows(); ++r) {
    const double a = J(r, i);
    const double b = J(r, j);
    J(r, i) = g.c * a + g.s * b;
    J(r, j) = -g.s * a + g.c * b;
  }
}

}  // namespace

QpResult solve_qp_goldfarb_idnani(const Eigen::MatrixXd& G, const Eigen::VectorXd& a,
                                  const Eigen::MatrixXd& C, const Eigen::VectorXd& b, int max_iter,
                                  double feas_tol) {
  const Eigen::Index n = G.rows();
  const Eigen::Index m = C.cols();
  require(G.cols() == n && a.size() == n && C.rows() == n && b.size() == m, "qp: dimension mismatch");

  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success) throw NumericalError("qp: Hessian is not positive definite");
  // J = L^{-T}
  Eigen::MatrixXd J = llt.matrixU().solve(Eigen::MatrixXd::Identity(n, n));
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(n, n);
  Eigen::Index q = 0;
  std::vector<int> active;
  Eigen::VectorXd u(0);
  std::vector<char> is_active(static_cast<size_t>(m), 0);

  Eigen::VectorXd x = -llt.solve(a);

  QpResult res;
  int it = 0;
  for (; it < max_iter; ++it) {
    // step 1: most violated inactive constraint
    Eigen::Index p = -1;
    double worst = -feas_tol;
    const Eigen::VectorXd slack = C.transpose() * x - b;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (is_active[static_cast<size_t>(i)]) continue;
      const double s = slack(i) / std::max(1.0, std::abs(b(i)));
      if (s < worst) {
        worst = s;
        p = i;
      }
    }
    if (p < 0) {
      res.converged = true;
      break;
    }
    const Eigen::VectorXd np = C.col(p);
    Eigen::VectorXd u_plus(q + 1);
    u_plus.head(q) = u;
    u_plus(q) = 0.0;

    bool added = false;
    while (!added) {
      const Eigen::VectorXd d = J.transpose() * np;
      const Eigen::VectorXd z = J.rightCols(n - q) * d.tail(n - q);
      Eigen::VectorXd r(q);
      if (q > 0) r = R.topLeftCorner(q, q).triangularView<Eigen::Upper>().solve(d.head(q));

      double t1 = kInf;
      Eigen::Index k = -1;
      for (Eigen::Index j = 0; j < q; ++j)
        if (r(j) > 0.0 && u_plus(j) / r(j) < t1) {
          t1 = u_plus(j) / r(j);
          k = j;
        }
      const double sp = np.dot(x) - b(p);
      const double znp = z.dot(np);
      const double t2 = (z.norm() > 1e-14 * np.norm() && znp > 0.0) ? -sp / znp : kInf;
      const double t = std::min(t1, t2);
      if (t == kInf) {
        res.iterations = it;
        res.converged = false;
        res.x = x;
        return res;  // primal infeasible
      }

      if (t2 < kInf) x += t * z;
      if (q > 0) u_plus.head(q) -= t * r;
      u_plus(q) += t;

      if (t == t2) {
        // add p: rotate d so that only its first q+1 entries survive
        Eigen::VectorXd dd = d;
        for (Eigen::Index j = n - 1; j > q; --j) {
          const Givens g = make_givens(dd(j - 1), dd(j));
          if (g.h == 0.0) continue;
          dd(j - 1) = g.h;
          dd(j) = 0.0;
          rotate_cols(J, j - 1, j, g);
        }
        R.col(q).head(q + 1) = dd.head(q + 1);
        active.push_back(static_cast<int>(p));
        is_active[static_cast<size_t>(p)] = 1;
        ++q;
        u = u_plus;
        added = true;
      } else {
        // drop active constraint k
        is_active[static_cast<size_t>(active[static_cast<size_t>(k)])] = 0;
        active.erase(active.begin() + k);
        for (Eigen::Index j = k; j + 1 < q + 1; ++j) u_plus(j) = u_plus(j + 1);
        u_plus.conservativeResize(q);
        for (Eigen::Index j = k; j + 1 < q; ++j) R.col(j) = R.col(j + 1);
        R.col(q - 1).setZero();
        for (Eigen::Index j = k; j + 1 < q; ++j) {
          const Givens g = make_givens(R(j, j), R(j + 1, j));
          if (g.h == 0.0) continue;
          for (Eigen::Index c = j; c + 1 < q; ++c) {
            const double r0 = R(j, c);
            const double r1 = R(j + 1, c);
            R(j, c) = g.c * r0 + g.s * r1;
            R(j + 1, c) = -g.s * r0 + g.c * r1;
          }
          R(j + 1, j) = 0.0;
          rotate_cols(J, j, j + 1, g);
        }
        --q;
        u = u_plus.head(q);
      }
    }
  }

  res.x = x;
  res.objective = 0.5 * x.dot(G * x) + a.dot(x);
  res.iterations = it;
  res.active = active;
  res.multipliers = Eigen::VectorXd::Zero(m);
  for (size_t i = 0; i < active.size(); ++i) res.multipliers(active[i]) = u(static_cast<Eigen::Index>(i));
  double viol = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) viol = std::max(viol, b(i) - C.col(i).dot(x));
  res.max_violation = viol;
  return res;
}

}  // namespace gausscap
