#pragma once

#include <vector>

namespace gausscap {

/// One-dimensional quadrature rule; weights are normalized to sum to one
/// unless stated otherwise.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Golub-Welsch: Gauss rule from the recurrence of the monic orthogonal
/// polynomials, p_{k+1} = (x - diag[k]) p_k - offdiag[k]^2 p_{k-1}.
/// `offdiag` has diag.size() - 1 entries. Weights scaled to total `mass`.
QuadratureRule golub_welsch(const std::vector<double>& diag,
                            const std::vector<double>& offdiag, double mass);

/// Gauss-Hermite rule for the standard normal density (probabilists').
QuadratureRule gauss_hermite(int order);

/// Generalized Gauss-Laguerre rule for t^a e^{-t} dt on (0, inf),
/// normalized by Gamma(a + 1).
QuadratureRule gauss_laguerre(int order, double a);

/// Gauss-Jacobi rule for t^a dt on [0, length] (unnormalized: weights sum to
/// length^{a+1} / (a+1)).
QuadratureRule gauss_jacobi_left(int order, double a, double length);

/// Gauss rule for the measure t^a e^{-t} dt / Gamma(a+1) on (0, inf) that is
/// exact on the exponentials e^{-m t}, m = 0 .. 2 order - 1, i.e. a Gauss rule
/// in the variable u = e^{-t}. Nodes are returned as times t.
QuadratureRule exponential_time_rule(int order, double a);

}  // namespace gausscap
