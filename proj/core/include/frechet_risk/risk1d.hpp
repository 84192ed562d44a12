#pragma once

#include "frechet_risk/barycenter.hpp"
#include "frechet_risk/models.hpp"

namespace frechet {

/// Result of a 1-D Wasserstein barycentric risk evaluation.
struct Risk1dReport {
  double value{0.0};
  QuantileModel maximizer;
  double gamma{0.0};
  std::string method;  // closed-form | foc | direct | perturbative
  int iterations{0};
  double residual{0.0};
  int monotonicity_repairs{0};  // pooled grid points in the direct solver
  double zeroth_order{0.0};     // barycenter expectation term
};

/// Affine mapping Phi0(z) = alpha + b z: closed form
/// value = E_B[Phi0] + gamma b^2 / 2, maximizer g_B + gamma b.
Risk1dReport risk_1d_affine(const PriorSet& ps, double alpha, double b, double gamma);

/// Quadratic (delta-gamma) mapping Phi0(z) = alpha + b z + (c/2) z^2:
/// maximizer (g_B + kappa)/lambda with kappa = b gamma, lambda = 1 - c gamma.
/// Throws when lambda <= 0 (the supremum is not attained).
Risk1dReport risk_1d_quadratic(const PriorSet& ps, double alpha, double b, double c,
                               double gamma);

/// Pointwise first-order-condition solver: g(s) - gamma Phi0'(g(s)) = g_B(s),
/// safeguarded Newton per grid point. Requires z - gamma Phi0'(z) strictly
/// increasing on the grid hull; errors if the solution leaves quantile space.
Risk1dReport risk_1d_foc(const PriorSet& ps, const RiskMapping& phi, double gamma);

/// Discretized variational problem
///   max over monotone g of sum_j [Phi0(g_j) - (g_j - g_B,j)^2/(2 gamma)] ds
/// solved by pool-adjacent-violators with per-block concave maximization.
/// Serves as the oracle for the other solvers.
Risk1dReport risk_1d_direct(const PriorSet& ps, const RiskMapping& phi, double gamma);

/// First-order expansion: int [Phi0(g_B) + (gamma/2) Phi0'(g_B)^2] ds.
Risk1dReport risk_1d_perturbative(const PriorSet& ps, const RiskMapping& phi, double gamma);

/// Closed form when the tag permits, else FOC, else direct.
Risk1dReport risk_1d_auto(const PriorSet& ps, const RiskMapping& phi, double gamma);

}  // namespace frechet
