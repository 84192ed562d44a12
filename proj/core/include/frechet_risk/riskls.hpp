#pragma once

#include <vector>

#include "frechet_risk/barycenter.hpp"
#include "frechet_risk/models.hpp"

namespace frechet {

/// Gradient of Phi(m,S) = int Phi0(m + S^{1/2} z) dnu(z) in the mean and in
/// the scatter: grad_S = (1/2)(Psi S^{-1/2} + S^{-1/2} Psi^T) with
/// Psi_{l,k} = int D_l Phi0(m + S^{1/2} z) z_k dnu(z).
struct GradientPair {
  Vector grad_m;
  Matrix grad_S;  // symmetric
};

struct PhiEval {
  double value{0.0};
  GradientPair grad;
  double stderr_value{0.0};  // Monte Carlo standard error, 0 for exact tags
};

PhiEval eval_phi_gradients(const LocationScatterModel& model, const RiskMapping& phi,
                           int n_samples, std::uint64_t seed);

/// Solution of the first-order covariance-correction system
///   S~ - sum_i w_i H_i = 2 B W B
///   S~ - J B - B J = 0
///   H_i E_i + E_i H_i = J S_i B + B S_i J
/// together with the Sylvester cascades
///   Y_i G_i + G_i Y_i = B_i S~ B_i,   Z_i G_i + G_i Z_i = -2 Y_i^2,
/// where B = S_B^{1/2}, B_i = S_i^{1/2}, E_i = (B S_i B)^{1/2},
/// G_i = (B_i S_B B_i)^{1/2}.
struct PerturbationSolution {
  Matrix S_tilde;
  Matrix J;
  std::vector<Matrix> H;
  std::vector<Matrix> Y;
  std::vector<Matrix> Z;
  double residual{0.0};  // max Frobenius residual over all equations
};

/// Precomputed barycenter-anchored operators; the linear system factorization
/// is shared across right-hand sides (total risk and per-sector solves).
class PerturbationOperators {
 public:
  PerturbationOperators(const PriorSet& ps, const LocationScatterModel& bary);

  /// Solves the coupled system for a given W, then the Y cascade.
  PerturbationSolution solve(const Matrix& W) const;

  /// Z_i from Z_i G_i + G_i Z_i = -2 Y_i^2.
  std::vector<Matrix> second_order(const std::vector<Matrix>& Y) const;

  /// Z'_i from Z'_i G_i + G_i Z'_i = -2 (Y'_i Y_i + Y_i Y'_i).
  std::vector<Matrix> second_order_cross(const std::vector<Matrix>& Yp,
                                         const std::vector<Matrix>& Y) const;

  const Matrix& B() const { return b_; }
  int dim() const { return d_; }
  int priors() const { return n_; }

 private:
  int d_, n_;
  std::vector<double> w_;
  Matrix b_;                    // S_B^{1/2}
  std::vector<Matrix> s_;      // S_i
  std::vector<Matrix> broot_;  // B_i
  std::vector<Matrix> e_;      // E_i
  std::vector<Matrix> g_;      // G_i
  Eigen::PartialPivLU<Matrix> lu_;
};

struct RiskLsReport {
  double value{0.0};
  Vector m;
  Matrix S;
  double gamma{0.0};
  std::string method;  // fixed-point | perturbative
  int iterations{0};
  double residual{0.0};
  double phi_value{0.0};   // Phi(m,S) at the maximizer
  double penalty{0.0};     // normalized Frechet function value at the maximizer
  PerturbationSolution pert;
  bool has_pert{false};
};

inline constexpr int kDefaultLsSamples = 200000;

/// Prop. 2.8 solver: iterates the mean update m <- m_B + gamma D_m Phi and the
/// symmetric scatter update with the 2 gamma S^{1/2} D_S Phi S^{1/2} term
/// folded into the barycenter map. Detects divergence (gamma too large).
RiskLsReport risk_ls_fixed_point(const PriorSet& ps, const RiskMapping& phi, double gamma,
                                 double tol = 1e-10, int max_iter = 500,
                                 int n_samples = kDefaultLsSamples, std::uint64_t seed = 1);

/// First-order expansion around the barycenter:
/// value = Phi(m_B,S_B) + gamma (||M_B||^2/2 + Tr(C_B S~) + Tr(sum w_i Z_i)/2).
RiskLsReport risk_ls_perturbative(const PriorSet& ps, const RiskMapping& phi, double gamma,
                                  int n_samples = kDefaultLsSamples, std::uint64_t seed = 1);

/// Scatter part of the (unnormalized) location-scatter Frechet function,
/// sum_i w_i Tr(S + S_i - 2 (S_i^{1/2} S S_i^{1/2})^{1/2}).
double ls_scatter_frechet(const PriorSet& ps, const Matrix& S);

}  // namespace frechet
