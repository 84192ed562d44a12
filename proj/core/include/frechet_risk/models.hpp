#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "frechet_risk/central_law.hpp"
#include "frechet_risk/grid.hpp"
#include "frechet_risk/types.hpp"

namespace frechet {

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// Point on the unit simplex; weights of the prior models.
struct WeightVector {
  std::vector<double> w;

  static WeightVector uniform(int n);
  int size() const { return static_cast<int>(w.size()); }
};

inline constexpr double kWeightSumTol = 1e-12;

/// 1-D model given by its quantile function sampled on a fixed grid of (0,1).
struct QuantileModel {
  std::vector<double> grid;    // strictly increasing, strictly inside (0,1)
  std::vector<double> values;  // non-decreasing

  int size() const { return static_cast<int>(grid.size()); }

  static QuantileModel constant(double v, int m = kDefaultGridSize);
  static QuantileModel normal(double mean, double sd, int m = kDefaultGridSize);
  /// Student-t rescaled to unit variance, then shifted/scaled.
  static QuantileModel student(double df, double loc = 0.0, double scale = 1.0,
                               int m = kDefaultGridSize);

  double mean() const;
  double variance() const;
};

/// Z = m + S^{1/2} Z0 for a central law Z0 with zero mean, identity covariance.
struct LocationScatterModel {
  Vector m;
  Matrix S;
  CentralLaw central{CentralLaw::normal()};

  int dim() const { return static_cast<int>(m.size()); }

  /// Induced quantile model (d = 1 only).
  QuantileModel to_quantile(int grid_size = kDefaultGridSize) const;
};

/// Uniform lattice over a bounding box, 1-D or 2-D tensor product.
struct GridAxis {
  double lo{0.0};
  double hi{1.0};
  int n{2};

  double step() const { return (hi - lo) / (n - 1); }
  double point(int i) const { return lo + i * step(); }
};

struct GridDensityModel {
  std::vector<GridAxis> axes;   // size 1 or 2
  std::vector<double> density;  // row-major over the lattice, >= 0

  int dim() const { return static_cast<int>(axes.size()); }
  int points() const;
  /// Trapezoidal quadrature weight of flat index k.
  double quad_weight(int k) const;
  Vector point(int k) const;
  double integral() const;
  double mean1d() const;
  double variance1d() const;

  static GridDensityModel gaussian(double mean, double var, const GridAxis& axis);
};

enum class ModelKind { quantile, location_scatter, grid_density };

std::string to_string(ModelKind kind);

/// Weighted collection of probability models sharing one model kind.
struct PriorSet {
  ModelKind kind{ModelKind::quantile};
  std::vector<QuantileModel> quantiles;
  std::vector<LocationScatterModel> ls;
  std::vector<GridDensityModel> densities;
  WeightVector weights;

  int size() const;

  static PriorSet of(std::vector<QuantileModel> models, WeightVector w);
  static PriorSet of(std::vector<LocationScatterModel> models, WeightVector w);
  static PriorSet of(std::vector<GridDensityModel> models, WeightVector w);
};

/// Position mapping -X = Phi0(Z). The 1-D quadratic tag follows the
/// delta-gamma convention Phi0(z) = alpha + b z + (c/2) z^2, so that the
/// shifted-scaled maximizer multipliers are kappa = b*gamma, lambda = 1 - c*gamma.
struct RiskMapping {
  enum class Tag { affine, quadratic, linear_multi, quadratic_multi, custom };

  Tag tag{Tag::custom};
  double alpha{0.0}, b{0.0}, c{0.0};  // 1-D affine/quadratic parameters
  Vector a;                           // linear/quadratic multi
  Matrix A;                           // quadratic multi, symmetrized on ingestion
  std::function<double(const Vector&)> evaluator;
  std::function<Vector(const Vector&)> gradient;  // optional for custom

  static RiskMapping affine(double alpha, double b);
  static RiskMapping quadratic(double alpha, double b, double c);
  static RiskMapping linear_multi(Vector a);
  static RiskMapping quadratic_multi(Vector a, Matrix A);
  static RiskMapping custom(std::function<double(const Vector&)> eval,
                            std::function<Vector(const Vector&)> grad = nullptr);

  double eval(const Vector& z) const;
  /// Gradient; central finite differences (step 1e-6*(1+|z|)) when absent.
  Vector grad(const Vector& z) const;

  double eval1d(double z) const;
  double grad1d(double z) const;

  bool is_parametric_1d() const { return tag == Tag::affine || tag == Tag::quadratic; }
  std::string tag_name() const;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

struct Violation {
  int index{-1};  // offending model index, -1 for set-level problems
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::string str() const;
};

/// Checks every PriorSet invariant and reports all violations. Idempotent,
/// side-effect free.
ValidationReport validate_prior_set(const PriorSet& ps);

void require_valid(const PriorSet& ps);

/// Midpoint-rule approximation of \int_0^1 Phi0(g(s)) ds on q's grid.
double quantile_expectation(const QuantileModel& q, const RiskMapping& phi);

/// Phi(m,S) = \int Phi0(m + S^{1/2} z) dnu(z). Exact moment formulas for the
/// affine / quadratic / linear-multi / quadratic-multi tags, seeded Monte
/// Carlo for custom mappings.
double ls_expectation(const LocationScatterModel& model, const RiskMapping& phi,
                      int n_samples, std::uint64_t seed);

}  // namespace frechet
