#pragma once

#include <Eigen/Dense>
#include <vector>

namespace gausscap {

struct QpResult {
  Eigen::VectorXd x;
  /// One multiplier per constraint column (zero when inactive).
  Eigen::VectorXd multipliers;
  double objective = 0.0;
  std::vector<int> active;
  int iterations = 0;
  bool converged = false;
  /// max(0, b_i - c_i^T x)
  double max_violation = 0.0;
};

/// min 1/2 x^T G x + a^T x  s.t.  C^T x >= b, G symmetric positive definite.
/// Dual active-set method of Goldfarb and Idnani with Givens updates of the
/// factorization J = L^{-T} Q, R.
QpResult solve_qp_goldfarb_idnani(const Eigen::MatrixXd& G, const Eigen::VectorXd& a,
                                  const Eigen::MatrixXd& C, const Eigen::VectorXd& b,
                                  int max_iter = 100000, double feas_tol = 1e-12);

}  // namespace gausscap
