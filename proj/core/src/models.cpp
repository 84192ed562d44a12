#include "frechet_risk/models.hpp"

#include <cmath>
#include <sstream>

#include "frechet_risk/spd.hpp"

namespace frechet {

// ---------------------------------------------------------------------------
// WeightVector
// ---------------------------------------------------------------------------

WeightVector WeightVector::uniform(int n) {
  if (n < 1) throw ValidationError("WeightVector::uniform: n must be >= 1");
  return WeightVector{std::vector<double>(n, 1.0 / n)};
}

// ---------------------------------------------------------------------------
// QuantileModel
// ---------------------------------------------------------------------------

QuantileModel QuantileModel::constant(double v, int m) {
  return QuantileModel{midpoint_grid(m), std::vector<double>(m, v)};
}

QuantileModel QuantileModel::normal(double mean, double sd, int m) {
  QuantileModel q{midpoint_grid(m), std::vector<double>(m)};
  for (int j = 0; j < m; ++j) q.values[j] = mean + sd * normal_quantile(q.grid[j]);
  return q;
}

QuantileModel QuantileModel::student(double df, double loc, double scale, int m) {
  const CentralLaw law = CentralLaw::student(df);
  QuantileModel q{midpoint_grid(m), std::vector<double>(m)};
  for (int j = 0; j < m; ++j) q.values[j] = loc + scale * law.quantile(q.grid[j]);
  return q;
}

double QuantileModel::mean() const { return integrate_unit(grid, values); }

double QuantileModel::variance() const {
  const double mu = mean();
  std::vector<double> sq(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) {
    const double d = values[j] - mu;
    sq[j] = d * d;
  }
  return integrate_unit(grid, sq);
}

// ---------------------------------------------------------------------------
// LocationScatterModel
// ---------------------------------------------------------------------------

QuantileModel LocationScatterModel::to_quantile(int grid_size) const {
  if (dim() != 1) {
    throw ValidationError("LocationScatterModel::to_quantile: requires d = 1");
  }
  const double sd = std::sqrt(S(0, 0));
  QuantileModel q{midpoint_grid(grid_size), std::vector<double>(grid_size)};
  for (int j = 0; j < grid_size; ++j) {
    q.values[j] = m(0) + sd * central.quantile(q.grid[j]);
  }
  return q;
}

// ---------------------------------------------------------------------------
// GridDensityModel
// ---------------------------------------------------------------------------

int GridDensityModel::points() const {
  int p = 1;
  for (const auto& ax : axes) p *= ax.n;
  return p;
}

double GridDensityModel::quad_weight(int k) const {
  double w = 1.0;
  if (dim() == 1) {
    const auto& ax = axes[0];
    w = ax.step() * ((k == 0 || k == ax.n - 1) ? 0.5 : 1.0);
  } else {
    const int ny = axes[1].n;
    const int ix = k / ny, iy = k % ny;
    w = axes[0].step() * ((ix == 0 || ix == axes[0].n - 1) ? 0.5 : 1.0);
    w *= axes[1].step() * ((iy == 0 || iy == axes[1].n - 1) ? 0.5 : 1.0);
  }
  return w;
}

Vector GridDensityModel::point(int k) const {
  Vector z(dim());
  if (dim() == 1) {
    z(0) = axes[0].point(k);
  } else {
    const int ny = axes[1].n;
    z(0) = axes[0].point(k / ny);
    z(1) = axes[1].point(k % ny);
  }
  return z;
}

double GridDensityModel::integral() const {
  double acc = 0.0;
  for (int k = 0; k < points(); ++k) acc += density[k] * quad_weight(k);
  return acc;
}

double GridDensityModel::mean1d() const {
  if (dim() != 1) throw ValidationError("mean1d: requires a 1-D grid");
  double acc = 0.0;
  for (int k = 0; k < points(); ++k) acc += axes[0].point(k) * density[k] * quad_weight(k);
  return acc;
}

double GridDensityModel::variance1d() const {
  const double mu = mean1d();
  double acc = 0.0;
  for (int k = 0; k < points(); ++k) {
    const double d = axes[0].point(k) - mu;
    acc += d * d * density[k] * quad_weight(k);
  }
  return acc;
}

GridDensityModel GridDensityModel::gaussian(double mean, double var, const GridAxis& axis) {
  if (!(var > 0.0)) throw ValidationError("GridDensityModel::gaussian: var must be > 0");
  GridDensityModel g{{axis}, std::vector<double>(axis.n)};
  const double norm = 1.0 / std::sqrt(2.0 * M_PI * var);
  for (int k = 0; k < axis.n; ++k) {
    const double d = axis.point(k) - mean;
    g.density[k] = norm * std::exp(-0.5 * d * d / var);
  }
  return g;
}

// ---------------------------------------------------------------------------
// PriorSet
// ---------------------------------------------------------------------------

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::quantile: return "quantile";
    case ModelKind::location_scatter: return "location-scatter";
    case ModelKind::grid_density: return "grid-density";
  }
  return "?";
}

int PriorSet::size() const {
  switch (kind) {
    case ModelKind::quantile: return static_cast<int>(quantiles.size());
    case ModelKind::location_scatter: return static_cast<int>(ls.size());
    case ModelKind::grid_density: return static_cast<int>(densities.size());
  }
  return 0;
}

PriorSet PriorSet::of(std::vector<QuantileModel> models, WeightVector w) {
  PriorSet ps;
  ps.kind = ModelKind::quantile;
  ps.quantiles = std::move(models);
  ps.weights = std::move(w);
  return ps;
}

PriorSet PriorSet::of(std::vector<LocationScatterModel> models, WeightVector w) {
  PriorSet ps;
  ps.kind = ModelKind::location_scatter;
  ps.ls = std::move(models);
  ps.weights = std::move(w);
  return ps;
}

PriorSet PriorSet::of(std::vector<GridDensityModel> models, WeightVector w) {
  PriorSet ps;
  ps.kind = ModelKind::grid_density;
  ps.densities = std::move(models);
  ps.weights = std::move(w);
  return ps;
}

// ---------------------------------------------------------------------------
// RiskMapping
// ---------------------------------------------------------------------------

RiskMapping RiskMapping::affine(double alpha, double b) {
  RiskMapping phi;
  phi.tag = Tag::affine;
  phi.alpha = alpha;
  phi.b = b;
  return phi;
}

RiskMapping RiskMapping::quadratic(double alpha, double b, double c) {
  RiskMapping phi;
  phi.tag = Tag::quadratic;
  phi.alpha = alpha;
  phi.b = b;
  phi.c = c;
  return phi;
}

RiskMapping RiskMapping::linear_multi(Vector a) {
  RiskMapping phi;
  phi.tag = Tag::linear_multi;
  phi.a = std::move(a);
  return phi;
}

RiskMapping RiskMapping::quadratic_multi(Vector a, Matrix A) {
  if (A.rows() != A.cols() || A.rows() != a.size()) {
    throw ValidationError("RiskMapping::quadratic_multi: a/A dimension mismatch");
  }
  RiskMapping phi;
  phi.tag = Tag::quadratic_multi;
  phi.a = std::move(a);
  phi.A = symmetrize(A);
  return phi;
}

RiskMapping RiskMapping::custom(std::function<double(const Vector&)> eval,
                                std::function<Vector(const Vector&)> grad) {
  if (!eval) throw ValidationError("RiskMapping::custom: evaluator required");
  RiskMapping phi;
  phi.tag = Tag::custom;
  phi.evaluator = std::move(eval);
  phi.gradient = std::move(grad);
  return phi;
}

double RiskMapping::eval(const Vector& z) const {
  switch (tag) {
    case Tag::affine:
      return alpha + b * z(0);
    case Tag::quadratic:
      return alpha + b * z(0) + 0.5 * c * z(0) * z(0);
    case Tag::linear_multi:
      return a.dot(z);
    case Tag::quadratic_multi:
      return a.dot(z) + z.dot(A * z);
    case Tag::custom:
      return evaluator(z);
  }
  throw NumericalError("RiskMapping::eval: unknown tag");
}

Vector RiskMapping::grad(const Vector& z) const {
  switch (tag) {
    case Tag::affine:
      return Vector::Constant(1, b);
    case Tag::quadratic:
      return Vector::Constant(1, b + c * z(0));
    case Tag::linear_multi:
      return a;
    case Tag::quadratic_multi:
      return a + 2.0 * (A * z);
    case Tag::custom:
      break;
  }
  if (gradient) return gradient(z);
  // central differences, step 1e-6 * (1 + |z_l|)
  Vector g(z.size());
  Vector zp = z, zm = z;
  for (Eigen::Index l = 0; l < z.size(); ++l) {
    const double h = 1e-6 * (1.0 + std::abs(z(l)));
    zp(l) = z(l) + h;
    zm(l) = z(l) - h;
    g(l) = (evaluator(zp) - evaluator(zm)) / (2.0 * h);
    zp(l) = z(l);
    zm(l) = z(l);
  }
  return g;
}

double RiskMapping::eval1d(double z) const { return eval(Vector::Constant(1, z)); }

double RiskMapping::grad1d(double z) const { return grad(Vector::Constant(1, z))(0); }

std::string RiskMapping::tag_name() const {
  switch (tag) {
    case Tag::affine: return "affine";
    case Tag::quadratic: return "quadratic";
    case Tag::linear_multi: return "linear-multi";
    case Tag::quadratic_multi: return "quadratic-multi";
    case Tag::custom: return "custom";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// validate_prior_set
// ---------------------------------------------------------------------------

namespace {

void check_weights(const PriorSet& ps, std::vector<Violation>& out) {
  const auto& w = ps.weights.w;
  if (static_cast<int>(w.size()) != ps.size()) {
    std::ostringstream os;
    os << "weight count " << w.size() << " != model count " << ps.size();
    out.push_back({-1, os.str()});
    return;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] < 0.0) {
      std::ostringstream os;
      os << "negative weight " << w[i] << " at index " << i;
      out.push_back({static_cast<int>(i), os.str()});
    }
    sum += w[i];
  }
  if (std::abs(sum - 1.0) > kWeightSumTol) {
    std::ostringstream os;
    os << "weights sum " << sum << " != 1";
    out.push_back({-1, os.str()});
  }
}

void check_quantiles(const PriorSet& ps, std::vector<Violation>& out) {
  for (std::size_t i = 0; i < ps.quantiles.size(); ++i) {
    const auto& q = ps.quantiles[i];
    const int idx = static_cast<int>(i);
    if (q.grid.size() != q.values.size() || q.grid.empty()) {
      out.push_back({idx, "quantile grid/values size mismatch"});
      continue;
    }
    for (std::size_t j = 0; j < q.grid.size(); ++j) {
      if (!(q.grid[j] > 0.0 && q.grid[j] < 1.0)) {
        std::ostringstream os;
        os << "grid point " << q.grid[j] << " outside (0,1) at index " << j;
        out.push_back({idx, os.str()});
        break;
      }
      if (j > 0 && q.grid[j] <= q.grid[j - 1]) {
        std::ostringstream os;
        os << "grid not strictly increasing at index " << j;
        out.push_back({idx, os.str()});
        break;
      }
    }
    for (std::size_t j = 1; j < q.values.size(); ++j) {
      if (q.values[j] < q.values[j - 1]) {
        std::ostringstream os;
        os << "non-monotone quantile at index " << j;
        out.push_back({idx, os.str()});
        break;
      }
    }
    if (i > 0 && q.grid != ps.quantiles[0].grid) {
      out.push_back({idx, "mixed grids: quantile models must share one grid"});
    }
  }
}

void check_ls(const PriorSet& ps, std::vector<Violation>& out) {
  for (std::size_t i = 0; i < ps.ls.size(); ++i) {
    const auto& m = ps.ls[i];
    const int idx = static_cast<int>(i);
    if (m.S.rows() != m.S.cols() || m.S.rows() != m.m.size()) {
      out.push_back({idx, "scatter matrix shape does not match mean dimension"});
      continue;
    }
    if (!is_spd(m.S)) {
      out.push_back({idx, "scatter matrix is not symmetric positive definite"});
    }
    if (i > 0) {
      if (m.dim() != ps.ls[0].dim()) {
        out.push_back({idx, "mixed dimensions in location-scatter prior set"});
      }
      if (!(m.central == ps.ls[0].central)) {
        out.push_back({idx, "models must share one central law"});
      }
    }
    if (m.central.family == CentralLaw::Family::student_t && !(m.central.df > 4.0)) {
      out.push_back({idx, "student central law requires df > 4"});
    }
  }
}

void check_densities(const PriorSet& ps, std::vector<Violation>& out) {
  for (std::size_t i = 0; i < ps.densities.size(); ++i) {
    const auto& g = ps.densities[i];
    const int idx = static_cast<int>(i);
    if (g.dim() < 1 || g.dim() > 2) {
      out.push_back({idx, "grid-density models support 1 or 2 dimensions only"});
      continue;
    }
    if (static_cast<int>(g.density.size()) != g.points()) {
      out.push_back({idx, "density array size does not match lattice"});
      continue;
    }
    for (std::size_t k = 0; k < g.density.size(); ++k) {
      if (g.density[k] < 0.0 || !std::isfinite(g.density[k])) {
        std::ostringstream os;
        os << "negative or non-finite density at index " << k;
        out.push_back({idx, os.str()});
        break;
      }
    }
    const double mass = g.integral();
    if (std::abs(mass - 1.0) > 1e-8) {
      std::ostringstream os;
      os << "density integral " << mass << " != 1";
      out.push_back({idx, os.str()});
    }
    if (i > 0) {
      const auto& ref = ps.densities[0];
      bool same = g.dim() == ref.dim();
      for (int a = 0; same && a < g.dim(); ++a) {
        same = g.axes[a].lo == ref.axes[a].lo && g.axes[a].hi == ref.axes[a].hi &&
               g.axes[a].n == ref.axes[a].n;
      }
      if (!same) out.push_back({idx, "density models must share one lattice"});
    }
  }
}

}  // namespace

std::string ValidationReport::str() const {
  std::ostringstream os;
  for (const auto& v : violations) {
    if (v.index >= 0) os << "[model " << v.index << "] ";
    os << v.message << "\n";
  }
  return os.str();
}

ValidationReport validate_prior_set(const PriorSet& ps) {
  ValidationReport report;
  if (ps.size() < 1) {
    report.violations.push_back({-1, "prior set must contain at least one model"});
    return report;
  }
  check_weights(ps, report.violations);
  switch (ps.kind) {
    case ModelKind::quantile: check_quantiles(ps, report.violations); break;
    case ModelKind::location_scatter: check_ls(ps, report.violations); break;
    case ModelKind::grid_density: check_densities(ps, report.violations); break;
  }
  return report;
}

void require_valid(const PriorSet& ps) {
  const auto report = validate_prior_set(ps);
  if (!report.ok()) {
    throw ValidationError("invalid prior set:\n" + report.str());
  }
}

// ---------------------------------------------------------------------------
// Expectations
// ---------------------------------------------------------------------------

double quantile_expectation(const QuantileModel& q, const RiskMapping& phi) {
  std::vector<double> f(q.values.size());
  for (std::size_t j = 0; j < q.values.size(); ++j) {
    f[j] = phi.eval1d(q.values[j]);
    if (!std::isfinite(f[j])) {
      std::ostringstream os;
      os << "quantile_expectation: evaluator returned non-finite value at s = "
         << q.grid[j] << " (g = " << q.values[j] << ")";
      throw NumericalError(os.str());
    }
  }
  return integrate_unit(q.grid, f);
}

double ls_expectation(const LocationScatterModel& model, const RiskMapping& phi,
                      int n_samples, std::uint64_t seed) {
  const Vector& m = model.m;
  const Matrix& S = model.S;
  switch (phi.tag) {
    case RiskMapping::Tag::affine:
      return phi.alpha + phi.b * m(0);
    case RiskMapping::Tag::quadratic:
      return phi.alpha + phi.b * m(0) + 0.5 * phi.c * (m(0) * m(0) + S(0, 0));
    case RiskMapping::Tag::linear_multi:
      return phi.a.dot(m);
    case RiskMapping::Tag::quadratic_multi:
      // <a,m> + <m,Am> + Tr(S^{1/2} A S^{1/2}) = <a,m> + <m,Am> + Tr(A S)
      return phi.a.dot(m) + m.dot(phi.A * m) + (phi.A * S).trace();
    case RiskMapping::Tag::custom:
      break;
  }
  if (n_samples < 1) throw ValidationError("ls_expectation: n_samples must be >= 1");
  const Matrix root = sqrt_spd(S);
  std::mt19937_64 rng(seed);
  const Matrix z = model.central.sample_matrix(rng, n_samples, model.dim());
  double acc = 0.0;
  for (int k = 0; k < n_samples; ++k) {
    const Vector x = m + root * z.row(k).transpose();
    const double v = phi.eval(x);
    if (!std::isfinite(v)) {
      throw NumericalError("ls_expectation: evaluator returned non-finite value");
    }
    acc += v;
  }
  return acc / n_samples;
}

}  // namespace frechet
