#pragma once

#include <Eigen/Dense>

namespace gausscap {

struct BarrierOptions {
  /// Stop when (objective - lower bound) <= rel_gap * objective.
  double rel_gap = 1e-8;
  int max_newton = 50000;
  /// Barrier parameter growth per outer step.
  double growth = 10.0;
};

struct BarrierResult {
  Eigen::VectorXd x;
  double objective = 0.0;
  /// Certified dual lower bound when available, else objective - m / t.
  double lower_bound = 0.0;
  /// Dual point for the covering constraints.
  Eigen::VectorXd y;
  int newton_steps = 0;
  bool converged = false;
};

/// min sum_j w_j f_j^p  s.t.  f >= 0,  B C^T f >= 1.
/// B is k x M, C is N x M with M small; the Newton system is
/// diagonal plus rank M and is solved by the Woodbury identity.
/// Requires B C^T 1 = 1 (constants are feasible), which holds for potentials.
BarrierResult solve_nodal_power_barrier(const Eigen::VectorXd& w, double p, const Eigen::MatrixXd& B,
                                        const Eigen::MatrixXd& C, const BarrierOptions& opts = {});

/// min sum_j w_j (H c)_j^p  s.t.  H c >= 0,  A c >= 1, starting from a strictly
/// feasible c0. Dense Newton in c.
BarrierResult solve_dense_power_barrier(const Eigen::VectorXd& w, double p, const Eigen::MatrixXd& H,
                                        const Eigen::MatrixXd& A, const Eigen::VectorXd& c0,
                                        const BarrierOptions& opts = {});

/// Lagrange dual of the nodal problem at y >= 0, with a = B^T-side pullback
/// (A^T y)_j already formed: sum y - (p-1) sum_j w_j ((a_j / w_j)^+ / p)^{p/(p-1)}.
double nodal_power_dual(const Eigen::VectorXd& w, double p, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& aty);

}  // namespace gausscap
