#include "frechet_risk/entropic.hpp"

#include <cmath>
#include <limits>

namespace frechet {

namespace {

void require_density(const PriorSet& ps, const char* where) {
  require_valid(ps);
  if (ps.kind != ModelKind::grid_density) {
    throw ValidationError(std::string(where) + ": prior set kind must be grid-density");
  }
  if (ps.densities[0].dim() > 2) {
    throw ValidationError(std::string(where) +
                          ": grid densities support d <= 2; use the location-scatter "
                          "module for higher dimensions");
  }
}

std::vector<double> mapping_on_grid(const GridDensityModel& ref, const RiskMapping& phi) {
  std::vector<double> f(ref.points());
  for (int k = 0; k < ref.points(); ++k) {
    f[k] = phi.eval(ref.point(k));
    if (!std::isfinite(f[k])) {
      throw NumericalError("entropic_risk: mapping not finite on the grid");
    }
  }
  return f;
}

// log int e^{gamma phi} f0, max-shifted
double log_tilted_mass(const GridDensityModel& f0, const std::vector<double>& phi,
                       double gamma) {
  double hmax = -std::numeric_limits<double>::infinity();
  std::vector<double> h(f0.points(), -std::numeric_limits<double>::infinity());
  for (int k = 0; k < f0.points(); ++k) {
    if (f0.density[k] <= 0.0) continue;
    h[k] = gamma * phi[k] + std::log(f0.density[k]);
    hmax = std::max(hmax, h[k]);
  }
  if (!std::isfinite(hmax)) {
    throw NumericalError("entropic_risk: tilted density vanishes on the grid");
  }
  double acc = 0.0;
  for (int k = 0; k < f0.points(); ++k) {
    if (std::isfinite(h[k])) acc += std::exp(h[k] - hmax) * f0.quad_weight(k);
  }
  return hmax + std::log(acc);
}

double barycenter_expectation(const GridDensityModel& f0, const std::vector<double>& phi) {
  double acc = 0.0;
  for (int k = 0; k < f0.points(); ++k) {
    acc += phi[k] * f0.density[k] * f0.quad_weight(k);
  }
  return acc;
}

GridDensityModel tilted_density(const GridDensityModel& f0, const std::vector<double>& phi,
                                double gamma, double log_mass) {
  GridDensityModel out{f0.axes, std::vector<double>(f0.points(), 0.0)};
  for (int k = 0; k < f0.points(); ++k) {
    if (f0.density[k] <= 0.0) continue;
    out.density[k] = std::exp(gamma * phi[k] + std::log(f0.density[k]) - log_mass);
  }
  return out;
}

}  // namespace

EntropicReport entropic_risk(const PriorSet& ps, const RiskMapping& phi, double gamma) {
  require_density(ps, "entropic_risk");
  if (gamma < 0.0) throw ValidationError("entropic_risk: gamma must be >= 0");

  const auto bary = kl_barycenter(ps);
  const auto phivals = mapping_on_grid(bary.density, phi);

  EntropicReport rep;
  rep.gamma = gamma;
  rep.method = "closed-form";
  rep.log_c0 = bary.frechet_variance;
  if (gamma == 0.0) {
    rep.value = barycenter_expectation(bary.density, phivals);
    rep.maximizer = bary.density;
    return rep;
  }
  const double log_mass = log_tilted_mass(bary.density, phivals, gamma);
  rep.value = log_mass / gamma;
  rep.maximizer = tilted_density(bary.density, phivals, gamma, log_mass);
  return rep;
}

EntropicReport entropic_risk_direct(const PriorSet& ps, const RiskMapping& phi,
                                    double gamma, double ascent_tol) {
  require_density(ps, "entropic_risk_direct");
  if (!(gamma > 0.0)) throw ValidationError("entropic_risk_direct: gamma must be > 0");

  const auto bary = kl_barycenter(ps);
  const auto& f0 = bary.density;
  const auto phivals = mapping_on_grid(f0, phi);
  const int npts = f0.points();

  // discrete masses p_k on the lattice; mirror ascent in log space with step
  // eta*gamma, whose exact fixed point is p ~ f0 * w * e^{gamma phi}
  std::vector<double> logp(npts), logref(npts);
  for (int k = 0; k < npts; ++k) {
    logref[k] = f0.density[k] > 0.0
                    ? std::log(f0.density[k]) + std::log(f0.quad_weight(k))
                    : -std::numeric_limits<double>::infinity();
    logp[k] = logref[k];
  }
  const double eta = 0.5;
  int iter = 0;
  double resid = std::numeric_limits<double>::infinity();
  for (; iter < 20000 && resid > ascent_tol; ++iter) {
    // ascent step in the mirror (log) coordinates; objective gradient in p_k
    // is phi_k - (log(p_k/ref_k) + 1)/gamma, constants drop after renormalizing
    double hmax = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < npts; ++k) {
      if (!std::isfinite(logref[k])) continue;
      logp[k] += eta * gamma * (phivals[k] - (logp[k] - logref[k]) / gamma);
      hmax = std::max(hmax, logp[k]);
    }
    double mass = 0.0;
    for (int k = 0; k < npts; ++k) {
      if (std::isfinite(logp[k])) mass += std::exp(logp[k] - hmax);
    }
    const double log_mass = hmax + std::log(mass);
    for (int k = 0; k < npts; ++k) logp[k] -= log_mass;

    // stationarity: the gradient must be constant on the support
    double mean_grad = 0.0;
    for (int k = 0; k < npts; ++k) {
      if (!std::isfinite(logp[k])) continue;
      mean_grad += std::exp(logp[k]) * (phivals[k] - (logp[k] - logref[k]) / gamma);
    }
    resid = 0.0;
    for (int k = 0; k < npts; ++k) {
      if (!std::isfinite(logp[k])) continue;
      const double grad = phivals[k] - (logp[k] - logref[k]) / gamma;
      resid = std::max(resid, std::exp(logp[k]) * std::abs(grad - mean_grad));
    }
  }
  if (resid > std::max(ascent_tol, 1e-9)) {
    throw NumericalError("entropic_risk_direct: mirror ascent did not converge");
  }

  // objective at the converged density
  double evalue = 0.0, kl = 0.0;
  for (int k = 0; k < npts; ++k) {
    if (!std::isfinite(logp[k])) continue;
    const double pk = std::exp(logp[k]);
    evalue += pk * phivals[k];
    kl += pk * (logp[k] - logref[k]);
  }

  EntropicReport rep;
  rep.gamma = gamma;
  rep.method = "direct";
  rep.iterations = iter;
  rep.residual = resid;
  rep.log_c0 = bary.frechet_variance;
  rep.value = evalue - kl / gamma;
  rep.maximizer = GridDensityModel{f0.axes, std::vector<double>(npts, 0.0)};
  for (int k = 0; k < npts; ++k) {
    if (std::isfinite(logp[k])) {
      rep.maximizer.density[k] = std::exp(logp[k]) / f0.quad_weight(k);
    }
  }
  return rep;
}

}  // namespace frechet
