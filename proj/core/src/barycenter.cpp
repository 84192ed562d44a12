#include "frechet_risk/barycenter.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "frechet_risk/spd.hpp"

namespace frechet {

namespace {

double floored(double x) { return x < 0.0 ? 0.0 : x; }

// sum_i w_i Tr(S + S_i - 2 (S_i^{1/2} S S_i^{1/2})^{1/2}), the scatter part
// of the location-scatter Frechet function (not normalized).
double scatter_frechet(const PriorSet& ps, const Matrix& S,
                       const std::vector<Matrix>& roots) {
  double acc = 0.0;
  for (int i = 0; i < ps.size(); ++i) {
    const Matrix inner = symmetrize(roots[i] * S * roots[i]);
    acc += ps.weights.w[i] * (S.trace() + ps.ls[i].S.trace() - 2.0 * sqrt_spd(inner).trace());
  }
  return acc;
}

std::vector<Matrix> model_roots(const PriorSet& ps) {
  std::vector<Matrix> roots;
  roots.reserve(ps.ls.size());
  for (const auto& model : ps.ls) roots.push_back(sqrt_spd(model.S));
  return roots;
}

}  // namespace

BarycenterResult quantile_barycenter(const PriorSet& ps) {
  require_valid(ps);
  if (ps.kind != ModelKind::quantile) {
    throw ValidationError("quantile_barycenter: prior set kind must be quantile");
  }
  const auto& grid = ps.quantiles[0].grid;
  const int m = static_cast<int>(grid.size());

  QuantileModel bar{grid, std::vector<double>(m, 0.0)};
  for (int i = 0; i < ps.size(); ++i) {
    for (int j = 0; j < m; ++j) bar.values[j] += ps.weights.w[i] * ps.quantiles[i].values[j];
  }

  double variance = 0.0;
  std::vector<double> sq(m);
  for (int i = 0; i < ps.size(); ++i) {
    for (int j = 0; j < m; ++j) {
      const double d = bar.values[j] - ps.quantiles[i].values[j];
      sq[j] = d * d;
    }
    variance += ps.weights.w[i] * integrate_unit(grid, sq);
  }

  BarycenterResult res;
  res.kind = ModelKind::quantile;
  res.quantile = std::move(bar);
  res.frechet_variance = floored(variance);
  return res;
}

BarycenterResult ls_wasserstein_barycenter(const PriorSet& ps, double tol, int max_iter) {
  require_valid(ps);
  if (ps.kind != ModelKind::location_scatter) {
    throw ValidationError("ls_wasserstein_barycenter: prior set kind must be location-scatter");
  }
  const int d = ps.ls[0].dim();
  const int n = ps.size();

  Vector mean = Vector::Zero(d);
  for (int i = 0; i < n; ++i) mean += ps.weights.w[i] * ps.ls[i].m;

  Matrix S = Matrix::Zero(d, d);
  for (int i = 0; i < n; ++i) S += ps.weights.w[i] * ps.ls[i].S;

  int iter = 0;
  double residual = std::numeric_limits<double>::infinity();
  for (; iter < max_iter; ++iter) {
    const Matrix half = sqrt_spd(S);
    Matrix target = Matrix::Zero(d, d);
    for (int i = 0; i < n; ++i) {
      target += ps.weights.w[i] * sqrt_spd(symmetrize(half * ps.ls[i].S * half));
    }
    residual = (S - target).norm();
    if (residual <= 0.5 * tol * S.norm()) break;
    const Matrix inv_half = inv_sqrt_spd(S);
    S = symmetrize(inv_half * target * target * inv_half);
    if (!is_spd(S)) {
      throw NumericalError("ls_wasserstein_barycenter: iterate left the SPD cone");
    }
  }
  if (iter == max_iter) {
    std::ostringstream os;
    os << "ls_wasserstein_barycenter: no convergence after " << max_iter
       << " iterations (residual " << residual << ")";
    throw NumericalError(os.str());
  }

  BarycenterResult res;
  res.kind = ModelKind::location_scatter;
  res.ls = LocationScatterModel{mean, S, ps.ls[0].central};
  res.iterations = iter + 1;
  res.residual = residual;

  const auto roots = model_roots(ps);
  double variance = scatter_frechet(ps, S, roots);
  for (int i = 0; i < n; ++i) variance += ps.weights.w[i] * (mean - ps.ls[i].m).squaredNorm();
  res.frechet_variance = floored(variance);
  return res;
}

BarycenterResult kl_barycenter(const PriorSet& ps) {
  require_valid(ps);
  if (ps.kind != ModelKind::grid_density) {
    throw ValidationError("kl_barycenter: prior set kind must be grid-density");
  }
  const auto& ref = ps.densities[0];
  const int npts = ref.points();
  const int n = ps.size();

  // log f_G = sum w_i log f_i; any zero with positive weight kills the point
  std::vector<double> logg(npts, 0.0);
  for (int k = 0; k < npts; ++k) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const double w = ps.weights.w[i];
      if (w == 0.0) continue;
      const double f = ps.densities[i].density[k];
      if (f <= 0.0) {
        acc = -std::numeric_limits<double>::infinity();
        break;
      }
      acc += w * std::log(f);
    }
    logg[k] = acc;
  }

  // normalizing mass, max-shifted
  double hmax = -std::numeric_limits<double>::infinity();
  for (double h : logg) hmax = std::max(hmax, h);
  if (!std::isfinite(hmax)) {
    throw NumericalError("kl_barycenter: priors have essentially disjoint support");
  }
  double mass = 0.0;
  for (int k = 0; k < npts; ++k) {
    if (std::isfinite(logg[k])) mass += std::exp(logg[k] - hmax) * ref.quad_weight(k);
  }
  if (!(mass > 0.0) || mass * std::exp(hmax) <= 1e-300) {
    throw NumericalError("kl_barycenter: priors have essentially disjoint support");
  }
  const double log_c0 = -(std::log(mass) + hmax);

  GridDensityModel bar{ref.axes, std::vector<double>(npts, 0.0)};
  for (int k = 0; k < npts; ++k) {
    bar.density[k] = std::isfinite(logg[k]) ? std::exp(logg[k] + log_c0) : 0.0;
  }

  // V_M = sum w_i KL(f0 || f_i) = log C0; computed from the grid for honesty
  double variance = 0.0;
  for (int k = 0; k < npts; ++k) {
    const double f0 = bar.density[k];
    if (f0 <= 0.0) continue;
    // log(f0) - sum w_i log f_i = log C0 pointwise on the support
    variance += f0 * (std::log(f0) - logg[k]) * ref.quad_weight(k);
  }

  BarycenterResult res;
  res.kind = ModelKind::grid_density;
  res.density = std::move(bar);
  res.frechet_variance = floored(variance);
  res.residual = std::abs(variance - log_c0);
  return res;
}

BarycenterResult barycenter(const PriorSet& ps) {
  switch (ps.kind) {
    case ModelKind::quantile: return quantile_barycenter(ps);
    case ModelKind::location_scatter: return ls_wasserstein_barycenter(ps);
    case ModelKind::grid_density: return kl_barycenter(ps);
  }
  throw ValidationError("barycenter: unknown prior kind");
}

double frechet_function(const PriorSet& ps, const QuantileModel& candidate) {
  if (ps.kind != ModelKind::quantile) {
    throw ValidationError("frechet_function: candidate kind mismatch");
  }
  const auto bar = quantile_barycenter(ps);
  if (candidate.grid != ps.quantiles[0].grid) {
    throw ValidationError("frechet_function: candidate grid differs from prior grid");
  }
  const auto& grid = candidate.grid;
  std::vector<double> sq(grid.size());
  double total = 0.0;
  for (int i = 0; i < ps.size(); ++i) {
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double d = candidate.values[j] - ps.quantiles[i].values[j];
      sq[j] = d * d;
    }
    total += ps.weights.w[i] * integrate_unit(grid, sq);
  }
  return total - bar.frechet_variance;
}

double frechet_function(const PriorSet& ps, const LocationScatterModel& candidate) {
  if (ps.kind != ModelKind::location_scatter) {
    throw ValidationError("frechet_function: candidate kind mismatch");
  }
  const auto bar = ls_wasserstein_barycenter(ps);
  const auto roots = model_roots(ps);
  double total = scatter_frechet(ps, candidate.S, roots);
  for (int i = 0; i < ps.size(); ++i) {
    total += ps.weights.w[i] * (candidate.m - ps.ls[i].m).squaredNorm();
  }
  return total - bar.frechet_variance;
}

double frechet_function(const PriorSet& ps, const GridDensityModel& candidate) {
  if (ps.kind != ModelKind::grid_density) {
    throw ValidationError("frechet_function: candidate kind mismatch");
  }
  const auto bar = kl_barycenter(ps);
  double total = 0.0;
  for (int i = 0; i < ps.size(); ++i) {
    double kl = 0.0;
    for (int k = 0; k < candidate.points(); ++k) {
      const double f = candidate.density[k];
      if (f <= 0.0) continue;
      const double fi = ps.densities[i].density[k];
      if (fi <= 0.0) return std::numeric_limits<double>::infinity();
      kl += f * std::log(f / fi) * candidate.quad_weight(k);
    }
    total += ps.weights.w[i] * kl;
  }
  return total - bar.frechet_variance;
}

double ls_wasserstein2_sq(const LocationScatterModel& a, const LocationScatterModel& b) {
  const Matrix rb = sqrt_spd(b.S);
  const Matrix cross = sqrt_spd(symmetrize(rb * a.S * rb));
  return (a.m - b.m).squaredNorm() + a.S.trace() + b.S.trace() - 2.0 * cross.trace();
}

}  // namespace frechet
