#include "frechet_risk/premia.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "frechet_risk/barycenter.hpp"
#include "frechet_risk/entropic.hpp"
#include "frechet_risk/parallel.hpp"
#include "frechet_risk/spd.hpp"

namespace frechet {

namespace {

void require_premium_inputs(const PremiumProblem& p) {
  require_valid(p.priors1);
  require_valid(p.priors2);
  if (p.priors1.kind != ModelKind::location_scatter ||
      p.priors2.kind != ModelKind::location_scatter) {
    throw ValidationError("premium: both prior sets must be location-scatter");
  }
  if (p.a1.size() != p.priors1.ls[0].dim() || p.a2.size() != p.priors2.ls[0].dim()) {
    throw ValidationError("premium: mapping vectors do not match factor dimensions");
  }
  if (p.gamma < 0.0) throw ValidationError("premium: gamma must be >= 0");
  if (p.loading < 0.0) throw ValidationError("premium: loading must be >= 0");
}

}  // namespace

PremiumSolution premium_linear_1d(const PremiumProblem& p) {
  require_premium_inputs(p);
  if (p.priors1.ls[0].dim() != 1 || p.priors2.ls[0].dim() != 1) {
    throw ValidationError("premium_linear_1d: requires d1 = d2 = 1");
  }
  const auto b1 = ls_wasserstein_barycenter(p.priors1);
  const auto b2 = ls_wasserstein_barycenter(p.priors2);
  const double m1b = b1.ls.m(0), m2b = b2.ls.m(0);
  const double a1 = p.a1(0), a2 = p.a2(0);

  const double k = p.gamma * a1 * a2;
  const double denom = 1.0 - k * k;
  if (!(denom > 1e-14)) {
    throw NumericalError(
        "premium_linear_1d: 1 - gamma^2 a1^2 a2^2 <= 0, mean system singular");
  }
  const double m1 = (m1b + k * m2b) / denom;
  const double m2 = (m2b + k * m1b) / denom;

  PremiumSolution sol;
  sol.m1 = Vector::Constant(1, m1);
  sol.m2 = Vector::Constant(1, m2);
  sol.S1 = b1.ls.S;  // sigma_j = (sum_i w_i sigma_{j,i}^{1/2})^2, the barycenter scatter
  sol.S2 = b2.ls.S;
  sol.residual = std::max(std::abs(k * m2 + m1b - m1), std::abs(k * m1 + m2b - m2));

  const double phi1 = a1 * m1, phi2 = a2 * m2;
  double penalty = 0.0;
  if (p.gamma > 0.0) {
    const double d1 = m1 - m1b, d2 = m2 - m2b;
    penalty = (d1 * d1 + d2 * d2) / (2.0 * p.gamma);
  }
  sol.risk = phi1 * phi2 - penalty;
  sol.premium = (1.0 + p.loading) * sol.risk;
  return sol;
}

PremiumSolution premium_general(const PremiumProblem& p, double tol, int max_iter) {
  require_premium_inputs(p);
  const auto b1 = ls_wasserstein_barycenter(p.priors1);
  const auto b2 = ls_wasserstein_barycenter(p.priors2);

  // Linear mappings decouple the scatter blocks to their barycenters; the
  // means solve the bilinear system by alternating updates.
  Vector m1 = b1.ls.m, m2 = b2.ls.m;
  int iter = 0;
  double change = std::numeric_limits<double>::infinity();
  for (; iter < max_iter && change > tol; ++iter) {
    const Vector m1_next = b1.ls.m + p.gamma * p.a2.dot(m2) * p.a1;
    const Vector m2_next = b2.ls.m + p.gamma * p.a1.dot(m1_next) * p.a2;
    change = (m1_next - m1).norm() / (1.0 + m1_next.norm()) +
             (m2_next - m2).norm() / (1.0 + m2_next.norm());
    m1 = m1_next;
    m2 = m2_next;
  }
  if (change > tol) {
    throw NumericalError("premium_general: alternating scheme did not converge; "
                         "gamma too large for this position");
  }

  PremiumSolution sol;
  sol.m1 = m1;
  sol.m2 = m2;
  sol.S1 = b1.ls.S;
  sol.S2 = b2.ls.S;
  sol.iterations = iter;
  sol.residual = std::max((p.gamma * p.a2.dot(m2) * p.a1 - (m1 - b1.ls.m)).norm(),
                          (p.gamma * p.a1.dot(m1) * p.a2 - (m2 - b2.ls.m)).norm());

  const double phi1 = p.a1.dot(m1), phi2 = p.a2.dot(m2);
  double penalty = 0.0;
  if (p.gamma > 0.0) {
    penalty = ((m1 - b1.ls.m).squaredNorm() + (m2 - b2.ls.m).squaredNorm()) /
              (2.0 * p.gamma);
  }
  sol.risk = phi1 * phi2 - penalty;
  sol.premium = (1.0 + p.loading) * sol.risk;
  return sol;
}

// ---------------------------------------------------------------------------
// Robustness study
// ---------------------------------------------------------------------------

std::string to_string(Homogeneity h) {
  switch (h) {
    case Homogeneity::hh: return "hh";
    case Homogeneity::mh: return "mh";
    case Homogeneity::lh: return "lh";
  }
  return "?";
}

void SimulationConfig::validate() const {
  if (!(scales[0] < scales[1] && scales[1] < scales[2])) {
    throw ValidationError("SimulationConfig: perturbation scales must satisfy hh < mh < lh");
  }
  if (replications < 1) throw ValidationError("SimulationConfig: replications must be >= 1");
  if (n_experts.empty() || gamma_grid.empty()) {
    throw ValidationError("SimulationConfig: n_experts and gamma_grid must be non-empty");
  }
  // positivity of frequency and severity under the true model, P(Z < 0) <= 1e-6
  const double q = normal_quantile(1e-6);  // about -4.75
  if (m1 + q * std::sqrt(s1) < 0.0 || m2 + q * std::sqrt(s2) < 0.0) {
    throw ValidationError(
        "SimulationConfig: true parameters do not keep frequency/severity positive "
        "with probability >= 1 - 1e-6");
  }
}

namespace {

struct ExpertDraw {
  std::vector<double> m1, s1, m2, s2;  // one entry per expert
};

double truncated_normal(std::mt19937_64& rng, double cap) {
  std::normal_distribution<double> dist(0.0, 1.0);
  double e = dist(rng);
  while (std::abs(e) > cap) e = dist(rng);
  return e;
}

ExpertDraw draw_experts(const SimulationConfig& cfg, double scale, int n,
                        std::mt19937_64& rng) {
  ExpertDraw d;
  d.m1.resize(n);
  d.s1.resize(n);
  d.m2.resize(n);
  d.s2.resize(n);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    // means: multiplicative truncated-normal noise (truncation keeps the
    // perturbed means positive even at the lh scale)
    d.m1[i] = cfg.m1 * (1.0 + scale * truncated_normal(rng, 3.9));
    d.m2[i] = cfg.m2 * (1.0 + scale * truncated_normal(rng, 3.9));
    // scatters: mean-one lognormal noise, positive by construction
    d.s1[i] = cfg.s1 * std::exp(scale * normal(rng) - 0.5 * scale * scale);
    d.s2[i] = cfg.s2 * std::exp(scale * normal(rng) - 0.5 * scale * scale);
  }
  return d;
}

PriorSet factor_prior_set(const std::vector<double>& means, const std::vector<double>& vars) {
  std::vector<LocationScatterModel> models;
  models.reserve(means.size());
  for (std::size_t i = 0; i < means.size(); ++i) {
    models.push_back({Vector::Constant(1, means[i]), Matrix::Constant(1, 1, vars[i]),
                      CentralLaw::normal()});
  }
  return PriorSet::of(std::move(models), WeightVector::uniform(static_cast<int>(means.size())));
}

// Weighted entropic risk of one factor at multiplier gamma, on a grid
// spanning the union of the expert supports padded by 6 standard deviations.
double factor_entropic(const std::vector<double>& means, const std::vector<double>& vars,
                       double a, double gamma, int grid_points) {
  double lo = means[0], hi = means[0], sdmax = 0.0;
  for (std::size_t i = 0; i < means.size(); ++i) {
    lo = std::min(lo, means[i]);
    hi = std::max(hi, means[i]);
    sdmax = std::max(sdmax, std::sqrt(vars[i]));
  }
  const GridAxis axis{lo - 6.0 * sdmax, hi + 6.0 * sdmax, grid_points};
  std::vector<GridDensityModel> models;
  models.reserve(means.size());
  for (std::size_t i = 0; i < means.size(); ++i) {
    models.push_back(GridDensityModel::gaussian(means[i], vars[i], axis));
    // renormalize on the truncated grid so the prior-set invariant holds
    const double mass = models.back().integral();
    for (auto& v : models.back().density) v /= mass;
  }
  auto ps = PriorSet::of(std::move(models), WeightVector::uniform(static_cast<int>(means.size())));
  const auto rep = entropic_risk(ps, RiskMapping::affine(0.0, a), gamma);
  return rep.value;
}

struct CellStats {
  double sum_risk{0.0};
  double sum_err{0.0};
  double sum_err2{0.0};
  int ok{0};
  int failures{0};

  void add(double risk, double rho0) {
    const double rel = std::abs(risk - rho0) / rho0;
    sum_risk += risk;
    sum_err += rel;
    sum_err2 += rel * rel;
    ++ok;
  }
};

}  // namespace

std::vector<StudyRow> run_robustness_study(const SimulationConfig& cfg) {
  cfg.validate();
  const double rho0 = cfg.a1 * cfg.m1 * cfg.a2 * cfg.m2;
  const int B = cfg.replications;
  const int ngamma = static_cast<int>(cfg.gamma_grid.size());

  std::vector<StudyRow> rows;
  const std::array<Homogeneity, 3> scenarios{Homogeneity::hh, Homogeneity::mh,
                                             Homogeneity::lh};
  for (int h = 0; h < 3; ++h) {
    const double scale = cfg.scales[h];
    for (int n : cfg.n_experts) {
      // per-replication results, indexed [rep][gamma][method]; methods:
      // 0 = average, 1 = entropic, 2 = wasserstein; NaN marks a failure
      std::vector<std::vector<std::array<double, 3>>> results(
          B, std::vector<std::array<double, 3>>(ngamma));

      parallel_for(B, [&](int rep) {
        std::mt19937_64 rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(h),
                                        static_cast<std::uint64_t>(n),
                                        static_cast<std::uint64_t>(rep)));
        const ExpertDraw d = draw_experts(cfg, scale, n, rng);

        // average: expectation under the equal-weight mixture of the expert
        // joint models; mixing couples the factor blocks, so the expectation
        // of the product is the weighted mean of per-expert products
        double avg = 0.0;
        for (int i = 0; i < n; ++i) {
          avg += (cfg.a1 * d.m1[i]) * (cfg.a2 * d.m2[i]);
        }
        avg /= n;

        PremiumProblem prob;
        prob.priors1 = factor_prior_set(d.m1, d.s1);
        prob.priors2 = factor_prior_set(d.m2, d.s2);
        prob.a1 = Vector::Constant(1, cfg.a1);
        prob.a2 = Vector::Constant(1, cfg.a2);

        for (int gi = 0; gi < ngamma; ++gi) {
          const double gamma = cfg.gamma_grid[gi];
          auto& slot = results[rep][gi];
          slot[0] = avg;
          try {
            slot[1] = factor_entropic(d.m1, d.s1, cfg.a1, gamma, cfg.entropic_grid_points) *
                      factor_entropic(d.m2, d.s2, cfg.a2, gamma, cfg.entropic_grid_points);
          } catch (const std::exception&) {
            slot[1] = std::numeric_limits<double>::quiet_NaN();
          }
          try {
            prob.gamma = gamma;
            slot[2] = premium_linear_1d(prob).risk;
          } catch (const std::exception&) {
            slot[2] = std::numeric_limits<double>::quiet_NaN();
          }
        }
      });

      static const std::array<const char*, 3> method_names{"average", "entropic",
                                                           "wasserstein"};
      for (int gi = 0; gi < ngamma; ++gi) {
        for (int mth = 0; mth < 3; ++mth) {
          CellStats stats;
          for (int rep = 0; rep < B; ++rep) {
            const double v = results[rep][gi][mth];
            if (std::isnan(v)) {
              ++stats.failures;
            } else {
              stats.add(v, rho0);
            }
          }
          StudyRow row;
          row.homogeneity = to_string(scenarios[h]);
          row.n = n;
          row.gamma = cfg.gamma_grid[gi];
          row.method = method_names[mth];
          row.failures = stats.failures;
          if (stats.ok > 0) {
            row.mean_risk = stats.sum_risk / stats.ok;
            row.mean_rel_err = stats.sum_err / stats.ok;
            const double var =
                std::max(0.0, stats.sum_err2 / stats.ok -
                                  row.mean_rel_err * row.mean_rel_err);
            row.sd_rel_err = std::sqrt(var);
          }
          rows.push_back(std::move(row));
        }
      }
    }
  }
  return rows;
}

std::string study_csv(const std::vector<StudyRow>& rows) {
  std::ostringstream os;
  os << "homogeneity,n,gamma,method,mean_risk,mean_rel_err,sd_rel_err,failures\n";
  os << std::setprecision(10);
  for (const auto& r : rows) {
    os << r.homogeneity << ',' << r.n << ',' << r.gamma << ',' << r.method << ','
       << r.mean_risk << ',' << r.mean_rel_err << ',' << r.sd_rel_err << ','
       << r.failures << '\n';
  }
  return os.str();
}

}  // namespace frechet
