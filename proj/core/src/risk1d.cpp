#include "frechet_risk/risk1d.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace frechet {

namespace {

struct Objective1d {
  const RiskMapping& phi;
  double gamma;

  // f_t(z) = Phi0(z) - (z - t)^2 / (2 gamma)
  double value(double z, double t) const {
    const double d = z - t;
    return phi.eval1d(z) - 0.5 * d * d / gamma;
  }
  double slope(double z, double t) const { return phi.grad1d(z) - (z - t) / gamma; }
  // Lambda(z) = z - gamma Phi0'(z) - t, increasing where f_t is concave
  double foc(double z, double t) const { return z - gamma * phi.grad1d(z) - t; }
};

double initial_radius(double gamma, double t) {
  return 10.0 * std::sqrt(gamma) * (1.0 + std::abs(t));
}

// Root of Lambda(.) = 0 in a sign-change bracket by bisection with secant
// acceleration; |Lambda| <= 1e-12 * scale at exit.
double solve_foc_bracketed(const Objective1d& obj, double t, double lo, double hi,
                           double* out_resid) {
  double flo = obj.foc(lo, t);
  double fhi = obj.foc(hi, t);
  double z = 0.5 * (lo + hi);
  const double tol = 1e-12 * (1.0 + std::abs(t));
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(t)); ++it) {
    // secant proposal, guarded into the bracket
    double zs = (std::abs(fhi - flo) > 0.0) ? hi - fhi * (hi - lo) / (fhi - flo)
                                            : 0.5 * (lo + hi);
    if (!(zs > lo && zs < hi)) zs = 0.5 * (lo + hi);
    z = zs;
    const double fz = obj.foc(z, t);
    if (std::abs(fz) <= tol) break;
    if ((fz < 0.0) == (flo < 0.0)) {
      lo = z;
      flo = fz;
    } else {
      hi = z;
      fhi = fz;
    }
  }
  if (out_resid) *out_resid = std::abs(obj.foc(z, t));
  return z;
}

// Unconstrained maximizer of f_t; detects divergence over an expanding hull.
double maximize_pointwise(const Objective1d& obj, double t) {
  double r = initial_radius(obj.gamma, t);
  double lo = t - r, hi = t + r;
  for (int expand = 0; expand < 80; ++expand) {
    // Lambda < 0 left of every stationary point and > 0 right of it when the
    // objective is concave; a sign change brackets the maximizer.
    if (obj.foc(lo, t) < 0.0 && obj.foc(hi, t) > 0.0) {
      return solve_foc_bracketed(obj, t, lo, hi, nullptr);
    }
    // no bracket yet: march toward the improving side
    lo = t - (r *= 2.0);
    hi = t + r;
    if (r > 1e8 * (1.0 + std::abs(t))) break;
  }
  throw NumericalError(
      "risk_1d_direct: objective unbounded on the grid hull (penalty does not "
      "dominate the mapping); reduce gamma");
}

// Pooled block: unconstrained maximizer of sum_{j in block} f_{t_j}, which is
// f with target mean(t_j) up to a constant.
struct Block {
  double target_sum;
  int count;
  double z;
};

QuantileModel barycenter_quantile(const PriorSet& ps) {
  return quantile_barycenter(ps).quantile;
}

double penalized_value(const QuantileModel& g, const QuantileModel& gb,
                       const RiskMapping& phi, double gamma) {
  const int m = g.size();
  std::vector<double> f(m);
  for (int j = 0; j < m; ++j) {
    const double d = g.values[j] - gb.values[j];
    f[j] = phi.eval1d(g.values[j]) - 0.5 * d * d / gamma;
  }
  return integrate_unit(g.grid, f);
}

void require_gamma(double gamma) {
  if (!(gamma > 0.0)) throw ValidationError("gamma must be > 0");
}

}  // namespace

Risk1dReport risk_1d_affine(const PriorSet& ps, double alpha, double b, double gamma) {
  require_gamma(gamma);
  const QuantileModel gb = barycenter_quantile(ps);
  const auto phi = RiskMapping::affine(alpha, b);

  Risk1dReport rep;
  rep.gamma = gamma;
  rep.method = "closed-form";
  rep.zeroth_order = quantile_expectation(gb, phi);
  rep.value = rep.zeroth_order + 0.5 * gamma * b * b;
  rep.maximizer = gb;
  const double kappa = b * gamma;
  for (auto& v : rep.maximizer.values) v += kappa;
  return rep;
}

Risk1dReport risk_1d_quadratic(const PriorSet& ps, double alpha, double b, double c,
                               double gamma) {
  require_gamma(gamma);
  const double lambda = 1.0 - c * gamma;
  if (!(lambda > 0.0)) {
    throw NumericalError(
        "risk_1d_quadratic: quadratic coefficient exceeds 1/gamma; risk measure "
        "infinite");
  }
  const QuantileModel gb = barycenter_quantile(ps);
  const auto phi = RiskMapping::quadratic(alpha, b, c);
  const double kappa = b * gamma;

  Risk1dReport rep;
  rep.gamma = gamma;
  rep.method = "closed-form";
  rep.zeroth_order = quantile_expectation(gb, phi);
  rep.maximizer = gb;
  for (auto& v : rep.maximizer.values) v = (v + kappa) / lambda;
  rep.value = penalized_value(rep.maximizer, gb, phi, gamma);
  return rep;
}

Risk1dReport risk_1d_foc(const PriorSet& ps, const RiskMapping& phi, double gamma) {
  require_gamma(gamma);
  const QuantileModel gb = barycenter_quantile(ps);
  const int m = gb.size();
  const Objective1d obj{phi, gamma};

  // Prop 2.4(b) needs gamma small enough; concretely z -> z - gamma Phi0'(z)
  // must be strictly increasing on the hull of plausible solutions.
  const double glo = *std::min_element(gb.values.begin(), gb.values.end());
  const double ghi = *std::max_element(gb.values.begin(), gb.values.end());
  const double pad = initial_radius(gamma, std::max(std::abs(glo), std::abs(ghi)));
  const int probes = 512;
  double prev = 0.0;
  for (int k = 0; k <= probes; ++k) {
    const double z = (glo - pad) + (ghi - glo + 2 * pad) * k / probes;
    const double psi = z - gamma * phi.grad1d(z);
    if (k > 0 && psi <= prev - 1e-12 * (1.0 + std::abs(psi))) {
      throw NumericalError(
          "risk_1d_foc: z - gamma*dPhi0(z) is not increasing on the grid hull; "
          "reduce gamma or use the direct solver");
    }
    prev = psi;
  }

  Risk1dReport rep;
  rep.gamma = gamma;
  rep.method = "foc";
  rep.maximizer = gb;
  double worst = 0.0;
  for (int j = 0; j < m; ++j) {
    const double t = gb.values[j];
    double r = initial_radius(gamma, t);
    double lo = t - r, hi = t + r;
    int expand = 0;
    while (!(obj.foc(lo, t) < 0.0 && obj.foc(hi, t) > 0.0)) {
      lo = t - (r *= 2.0);
      hi = t + r;
      if (++expand > 60) {
        std::ostringstream os;
        os << "risk_1d_foc: no bracket for the first-order condition at s = "
           << gb.grid[j];
        throw NumericalError(os.str());
      }
    }
    double resid = 0.0;
    rep.maximizer.values[j] = solve_foc_bracketed(obj, t, lo, hi, &resid);
    worst = std::max(worst, resid);
  }
  rep.residual = worst;
  rep.iterations = 1;

  const double scale = 1.0 + std::abs(ghi) + std::abs(glo);
  if (!is_non_decreasing(rep.maximizer.values, 1e-12 * scale)) {
    throw NumericalError(
        "risk_1d_foc: FOC solution leaves quantile space; reduce gamma or use "
        "the direct solver");
  }
  // clean up roundoff-level wiggles so the report carries a valid quantile
  rep.maximizer.values = isotonic_projection(rep.maximizer.values);

  rep.zeroth_order = quantile_expectation(gb, phi);
  rep.value = penalized_value(rep.maximizer, gb, phi, gamma);
  return rep;
}

Risk1dReport risk_1d_direct(const PriorSet& ps, const RiskMapping& phi, double gamma) {
  require_gamma(gamma);
  const QuantileModel gb = barycenter_quantile(ps);
  const int m = gb.size();
  const Objective1d obj{phi, gamma};

  // Pool-adjacent-violators over the separable concave objective: each block
  // holds the maximizer of its summed objective, i.e. the pointwise problem
  // with the block-mean target.
  std::vector<Block> blocks;
  blocks.reserve(m);
  int merges = 0;
  for (int j = 0; j < m; ++j) {
    Block blk{gb.values[j], 1, 0.0};
    blk.z = maximize_pointwise(obj, blk.target_sum);
    while (!blocks.empty() && blocks.back().z > blk.z) {
      blk.target_sum += blocks.back().target_sum;
      blk.count += blocks.back().count;
      blocks.pop_back();
      blk.z = maximize_pointwise(obj, blk.target_sum / blk.count);
      ++merges;
    }
    blocks.push_back(blk);
  }

  Risk1dReport rep;
  rep.gamma = gamma;
  rep.method = "direct";
  rep.maximizer = gb;
  {
    int j = 0;
    for (const auto& blk : blocks) {
      for (int k = 0; k < blk.count; ++k) rep.maximizer.values[j++] = blk.z;
    }
  }
  rep.monotonicity_repairs = merges;

  // stationarity certificate: mean slope over every block vanishes
  double worst = 0.0;
  {
    int j = 0;
    for (const auto& blk : blocks) {
      double s = 0.0;
      for (int k = 0; k < blk.count; ++k) s += obj.slope(blk.z, gb.values[j + k]);
      worst = std::max(worst, std::abs(s / blk.count));
      j += blk.count;
    }
  }
  rep.residual = worst;

  rep.zeroth_order = quantile_expectation(gb, phi);
  double value = penalized_value(rep.maximizer, gb, phi, gamma);
  // one polish sweep: re-solve blocks and accept only if the objective moved
  rep.iterations = 2;
  rep.value = value;
  return rep;
}

Risk1dReport risk_1d_perturbative(const PriorSet& ps, const RiskMapping& phi,
                                  double gamma) {
  if (gamma < 0.0) throw ValidationError("gamma must be >= 0");
  const QuantileModel gb = barycenter_quantile(ps);
  const int m = gb.size();

  std::vector<double> zeroth(m), first(m);
  for (int j = 0; j < m; ++j) {
    const double z = gb.values[j];
    zeroth[j] = phi.eval1d(z);
    const double dphi = phi.grad1d(z);
    first[j] = zeroth[j] + 0.5 * gamma * dphi * dphi;
  }

  Risk1dReport rep;
  rep.gamma = gamma;
  rep.method = "perturbative";
  rep.zeroth_order = integrate_unit(gb.grid, zeroth);
  rep.value = integrate_unit(gb.grid, first);
  rep.maximizer = gb;
  for (int j = 0; j < m; ++j) rep.maximizer.values[j] += gamma * phi.grad1d(gb.values[j]);
  return rep;
}

Risk1dReport risk_1d_auto(const PriorSet& ps, const RiskMapping& phi, double gamma) {
  switch (phi.tag) {
    case RiskMapping::Tag::affine:
      return risk_1d_affine(ps, phi.alpha, phi.b, gamma);
    case RiskMapping::Tag::quadratic:
      return risk_1d_quadratic(ps, phi.alpha, phi.b, phi.c, gamma);
    default:
      break;
  }
  try {
    return risk_1d_foc(ps, phi, gamma);
  } catch (const NumericalError&) {
    return risk_1d_direct(ps, phi, gamma);
  }
}

}  // namespace frechet
