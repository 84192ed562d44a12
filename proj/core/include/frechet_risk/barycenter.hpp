#pragma once

#include "frechet_risk/models.hpp"

namespace frechet {

/// Frechet mean of a prior set together with the Frechet variance and
/// convergence diagnostics of the solver that produced it.
struct BarycenterResult {
  ModelKind kind{ModelKind::quantile};
  QuantileModel quantile;
  LocationScatterModel ls;
  GridDensityModel density;

  double frechet_variance{0.0};
  int iterations{0};
  double residual{0.0};
};

inline constexpr double kBarycenterTol = 1e-10;
inline constexpr int kBarycenterMaxIter = 500;

/// 1-D Wasserstein barycenter: quantile average g_B = sum w_i g_i.
BarycenterResult quantile_barycenter(const PriorSet& ps);

/// Location-scatter Wasserstein barycenter. The mean is the weighted mean;
/// the scatter solves S = sum w_i (S^{1/2} S_i S^{1/2})^{1/2} by the
/// symmetric fixed point S <- S^{-1/2} (sum w_i (S^{1/2} S_i S^{1/2})^{1/2})^2 S^{-1/2}
/// initialized at sum w_i S_i. residual is the equation residual in
/// Frobenius norm.
BarycenterResult ls_wasserstein_barycenter(const PriorSet& ps, double tol = kBarycenterTol,
                                           int max_iter = kBarycenterMaxIter);

/// KL barycenter: normalized weighted geometric mean of the densities.
/// frechet_variance equals sum w_i KL(f0 || f_i) (= log C0).
BarycenterResult kl_barycenter(const PriorSet& ps);

BarycenterResult barycenter(const PriorSet& ps);

/// Normalized Frechet function F_M(candidate) = FF_M(candidate) - V_M >= 0.
double frechet_function(const PriorSet& ps, const QuantileModel& candidate);
double frechet_function(const PriorSet& ps, const LocationScatterModel& candidate);
double frechet_function(const PriorSet& ps, const GridDensityModel& candidate);

/// Squared 2-Wasserstein distance between location-scatter laws sharing a
/// central law: ||m1-m2||^2 + Tr(S1 + S2 - 2 (S2^{1/2} S1 S2^{1/2})^{1/2}).
double ls_wasserstein2_sq(const LocationScatterModel& a, const LocationScatterModel& b);

}  // namespace frechet
