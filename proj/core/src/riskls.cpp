#include "frechet_risk/riskls.hpp"

#include <cmath>
#include <sstream>

#include "frechet_risk/spd.hpp"

namespace frechet {

namespace {

// Coordinates on the space of symmetric d x d matrices: entries (i,j), i<=j.
struct SymBasis {
  int d;
  std::vector<std::pair<int, int>> idx;

  explicit SymBasis(int dim) : d(dim) {
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) idx.emplace_back(i, j);
  }
  int size() const { return static_cast<int>(idx.size()); }
  Vector vec(const Matrix& m) const {
    Vector v(size());
    for (int k = 0; k < size(); ++k) v(k) = m(idx[k].first, idx[k].second);
    return v;
  }
  Matrix mat(const Vector& v) const {
    Matrix m = Matrix::Zero(d, d);
    for (int k = 0; k < size(); ++k) {
      m(idx[k].first, idx[k].second) = v(k);
      m(idx[k].second, idx[k].first) = v(k);
    }
    return m;
  }
  Matrix basis(int k) const {
    Vector v = Vector::Zero(size());
    v(k) = 1.0;
    return mat(v);
  }
};

void require_ls(const PriorSet& ps, const char* where) {
  require_valid(ps);
  if (ps.kind != ModelKind::location_scatter) {
    throw ValidationError(std::string(where) + ": prior set kind must be location-scatter");
  }
}

}  // namespace

double ls_scatter_frechet(const PriorSet& ps, const Matrix& S) {
  double acc = 0.0;
  for (int i = 0; i < ps.size(); ++i) {
    const Matrix ri = sqrt_spd(ps.ls[i].S);
    const Matrix inner = symmetrize(ri * S * ri);
    acc += ps.weights.w[i] * (S.trace() + ps.ls[i].S.trace() - 2.0 * sqrt_spd(inner).trace());
  }
  return acc;
}

// ---------------------------------------------------------------------------
// eval_phi_gradients
// ---------------------------------------------------------------------------

PhiEval eval_phi_gradients(const LocationScatterModel& model, const RiskMapping& phi,
                           int n_samples, std::uint64_t seed) {
  const Vector& m = model.m;
  const Matrix& S = model.S;
  const int d = model.dim();

  PhiEval out;
  switch (phi.tag) {
    case RiskMapping::Tag::affine:
      out.value = phi.alpha + phi.b * m(0);
      out.grad.grad_m = Vector::Constant(1, phi.b);
      out.grad.grad_S = Matrix::Zero(1, 1);
      return out;
    case RiskMapping::Tag::quadratic:
      out.value = phi.alpha + phi.b * m(0) + 0.5 * phi.c * (m(0) * m(0) + S(0, 0));
      out.grad.grad_m = Vector::Constant(1, phi.b + phi.c * m(0));
      out.grad.grad_S = Matrix::Constant(1, 1, 0.5 * phi.c);
      return out;
    case RiskMapping::Tag::linear_multi:
      out.value = phi.a.dot(m);
      out.grad.grad_m = phi.a;
      out.grad.grad_S = Matrix::Zero(d, d);
      return out;
    case RiskMapping::Tag::quadratic_multi:
      out.value = phi.a.dot(m) + m.dot(phi.A * m) + (phi.A * S).trace();
      out.grad.grad_m = phi.a + 2.0 * (phi.A * m);
      out.grad.grad_S = phi.A;
      return out;
    case RiskMapping::Tag::custom:
      break;
  }

  if (n_samples < 1) throw ValidationError("eval_phi_gradients: n_samples must be >= 1");
  const Matrix root = sqrt_spd(S);
  std::mt19937_64 rng(seed);
  const Matrix z = model.central.sample_matrix(rng, n_samples, d);

  double acc = 0.0, acc2 = 0.0;
  Vector gm = Vector::Zero(d);
  Matrix psi = Matrix::Zero(d, d);
  for (int k = 0; k < n_samples; ++k) {
    const Vector zk = z.row(k).transpose();
    const Vector x = m + root * zk;
    const double v = phi.eval(x);
    if (!std::isfinite(v)) {
      throw NumericalError("eval_phi_gradients: evaluator returned non-finite value");
    }
    const Vector g = phi.grad(x);
    acc += v;
    acc2 += v * v;
    gm += g;
    psi += g * zk.transpose();
  }
  out.value = acc / n_samples;
  out.grad.grad_m = gm / n_samples;
  psi /= n_samples;
  // gradient against the trace pairing: Tr(grad_S ds) = Tr(J Psi^T) with
  // J B + B J = ds, so grad_S solves X B + B X = (Psi + Psi^T)/2. (The
  // shorthand (Psi S^{-1/2} + S^{-1/2} Psi^T)/2 doubles the quadratic case.)
  out.grad.grad_S = solve_sylvester_spd(root, symmetrize(psi));
  const double var = std::max(0.0, acc2 / n_samples - out.value * out.value);
  out.stderr_value = std::sqrt(var / n_samples);
  return out;
}

// ---------------------------------------------------------------------------
// PerturbationOperators
// ---------------------------------------------------------------------------

PerturbationOperators::PerturbationOperators(const PriorSet& ps,
                                             const LocationScatterModel& bary)
    : d_(bary.dim()), n_(ps.size()), w_(ps.weights.w) {
  require_ls(ps, "PerturbationOperators");
  b_ = sqrt_spd(bary.S);
  s_.reserve(n_);
  broot_.reserve(n_);
  e_.reserve(n_);
  g_.reserve(n_);
  for (int i = 0; i < n_; ++i) {
    s_.push_back(ps.ls[i].S);
    broot_.push_back(sqrt_spd(ps.ls[i].S));
    e_.push_back(sqrt_spd(symmetrize(b_ * s_[i] * b_)));
    g_.push_back(sqrt_spd(symmetrize(broot_[i] * bary.S * broot_[i])));
  }

  // Unknowns u = [vec(S~); vec(J); vec(H_1) ... vec(H_n)] over the symmetric
  // coordinates; equations stacked in the same block order.
  const SymBasis sb(d_);
  const int D = sb.size();
  const int N = (n_ + 2) * D;
  Matrix A = Matrix::Zero(N, N);

  auto put = [&](int row_block, int col_block, int col, const Matrix& img) {
    A.block(row_block * D, col_block * D + col, D, 1) = sb.vec(img);
  };

  for (int k = 0; k < D; ++k) {
    const Matrix E = sb.basis(k);
    // eq block 0: S~ - sum w_i H_i
    put(0, 0, k, E);
    for (int i = 0; i < n_; ++i) put(0, 2 + i, k, Matrix(-w_[i] * E));
    // eq block 1: S~ - J B - B J
    put(1, 0, k, E);
    put(1, 1, k, Matrix(-(E * b_ + b_ * E)));
    // eq blocks 2+i: H_i E_i + E_i H_i - (J S_i B + B S_i J)
    for (int i = 0; i < n_; ++i) {
      put(2 + i, 1, k, Matrix(-(E * s_[i] * b_ + b_ * s_[i] * E)));
      put(2 + i, 2 + i, k, Matrix(E * e_[i] + e_[i] * E));
    }
  }
  lu_ = Eigen::PartialPivLU<Matrix>(A);
}

PerturbationSolution PerturbationOperators::solve(const Matrix& W) const {
  const SymBasis sb(d_);
  const int D = sb.size();
  Vector rhs = Vector::Zero((n_ + 2) * D);
  const Matrix w_sym = symmetrize(W);
  rhs.segment(0, D) = sb.vec(symmetrize(2.0 * b_ * w_sym * b_));

  const Vector u = lu_.solve(rhs);

  PerturbationSolution sol;
  sol.S_tilde = sb.mat(u.segment(0, D));
  sol.J = sb.mat(u.segment(D, D));
  sol.H.resize(n_);
  for (int i = 0; i < n_; ++i) sol.H[i] = sb.mat(u.segment((2 + i) * D, D));

  // residuals of the three equation groups
  Matrix r1 = sol.S_tilde - symmetrize(2.0 * b_ * w_sym * b_);
  for (int i = 0; i < n_; ++i) r1 -= w_[i] * sol.H[i];
  double worst = r1.norm();
  worst = std::max(worst, (sol.S_tilde - sol.J * b_ - b_ * sol.J).norm());
  for (int i = 0; i < n_; ++i) {
    const Matrix r3 = sol.H[i] * e_[i] + e_[i] * sol.H[i] -
                      (sol.J * s_[i] * b_ + b_ * s_[i] * sol.J);
    worst = std::max(worst, r3.norm());
  }

  sol.Y.resize(n_);
  for (int i = 0; i < n_; ++i) {
    const Matrix c = symmetrize(broot_[i] * sol.S_tilde * broot_[i]);
    sol.Y[i] = solve_sylvester_spd(g_[i], c);
    worst = std::max(worst, (sol.Y[i] * g_[i] + g_[i] * sol.Y[i] - c).norm());
  }
  sol.residual = worst;
  return sol;
}

std::vector<Matrix> PerturbationOperators::second_order(const std::vector<Matrix>& Y) const {
  std::vector<Matrix> Z(n_);
  for (int i = 0; i < n_; ++i) {
    Z[i] = solve_sylvester_spd(g_[i], Matrix(-2.0 * Y[i] * Y[i]));
  }
  return Z;
}

std::vector<Matrix> PerturbationOperators::second_order_cross(
    const std::vector<Matrix>& Yp, const std::vector<Matrix>& Y) const {
  std::vector<Matrix> Z(n_);
  for (int i = 0; i < n_; ++i) {
    Z[i] = solve_sylvester_spd(g_[i], Matrix(-2.0 * (Yp[i] * Y[i] + Y[i] * Yp[i])));
  }
  return Z;
}

// ---------------------------------------------------------------------------
// risk_ls_fixed_point
// ---------------------------------------------------------------------------

RiskLsReport risk_ls_fixed_point(const PriorSet& ps, const RiskMapping& phi, double gamma,
                                 double tol, int max_iter, int n_samples,
                                 std::uint64_t seed) {
  require_ls(ps, "risk_ls_fixed_point");
  if (!(gamma > 0.0)) throw ValidationError("risk_ls_fixed_point: gamma must be > 0");

  const auto bary = ls_wasserstein_barycenter(ps, std::min(tol, 1e-12), 2000);
  const Vector& m_b = bary.ls.m;
  const Matrix& s_b = bary.ls.S;
  const int d = bary.ls.dim();
  const int n = ps.size();
  const double scatter_at_bary = ls_scatter_frechet(ps, s_b);

  Vector m = m_b;
  Matrix S = s_b;
  PhiEval eval;
  double prev_delta = std::numeric_limits<double>::infinity();
  int worse_streak = 0;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    // same seed every pass: the iteration map stays deterministic in (m,S)
    eval = eval_phi_gradients({m, S, ps.ls[0].central}, phi, n_samples, seed);

    const Vector m_next = m_b + gamma * eval.grad.grad_m;
    const Matrix half = sqrt_spd(S);
    Matrix target = 2.0 * gamma * symmetrize(half * eval.grad.grad_S * half);
    for (int i = 0; i < n; ++i) {
      target += ps.weights.w[i] * sqrt_spd(symmetrize(half * ps.ls[i].S * half));
    }
    if (!is_spd(target)) {
      throw NumericalError(
          "risk_ls_fixed_point: non-SPD iterate (gamma too large for this mapping); "
          "use the perturbative method");
    }
    const Matrix inv_half = inv_sqrt_spd(S);
    const Matrix S_next = symmetrize(inv_half * target * target * inv_half);

    const double delta = (m_next - m).norm() / (1.0 + m_next.norm()) +
                         (S_next - S).norm() / (1.0 + S_next.norm());
    m = m_next;
    S = S_next;
    if (delta <= tol) break;
    if (delta > prev_delta) {
      if (++worse_streak >= 3) {
        throw NumericalError(
            "risk_ls_fixed_point: iteration diverges (gamma too large for "
            "contraction); use the perturbative method");
      }
    } else {
      worse_streak = 0;
    }
    prev_delta = delta;
  }
  if (iter == max_iter) {
    throw NumericalError("risk_ls_fixed_point: no convergence within max_iter");
  }

  eval = eval_phi_gradients({m, S, ps.ls[0].central}, phi, n_samples, seed);

  RiskLsReport rep;
  rep.gamma = gamma;
  rep.method = "fixed-point";
  rep.iterations = iter + 1;
  rep.m = m;
  rep.S = S;
  rep.phi_value = eval.value;
  const double mean_pen = (m - m_b).squaredNorm();
  const double scatter_pen = std::max(0.0, ls_scatter_frechet(ps, S) - scatter_at_bary);
  rep.penalty = mean_pen + scatter_pen;
  rep.value = eval.value - rep.penalty / (2.0 * gamma);

  // FOC-A residual at the solution
  const Matrix half = sqrt_spd(S);
  Matrix bar_map = Matrix::Zero(d, d);
  for (int i = 0; i < n; ++i) {
    bar_map += ps.weights.w[i] * sqrt_spd(symmetrize(half * ps.ls[i].S * half));
  }
  const double r_m = (gamma * eval.grad.grad_m - (m - m_b)).norm();
  const double r_s =
      (2.0 * gamma * symmetrize(half * eval.grad.grad_S * half) - (S - bar_map)).norm();
  rep.residual = std::max(r_m / (1.0 + m.norm()), r_s / (1.0 + S.norm()));
  return rep;
}

// ---------------------------------------------------------------------------
// risk_ls_perturbative
// ---------------------------------------------------------------------------

RiskLsReport risk_ls_perturbative(const PriorSet& ps, const RiskMapping& phi, double gamma,
                                  int n_samples, std::uint64_t seed) {
  require_ls(ps, "risk_ls_perturbative");
  if (gamma < 0.0) throw ValidationError("risk_ls_perturbative: gamma must be >= 0");

  const auto bary = ls_wasserstein_barycenter(ps, 1e-12, 2000);
  const PhiEval eval = eval_phi_gradients(bary.ls, phi, n_samples, seed);

  PerturbationOperators ops(ps, bary.ls);
  PerturbationSolution sol = ops.solve(eval.grad.grad_S);
  sol.Z = ops.second_order(sol.Y);
  double tr_z = 0.0;
  for (int i = 0; i < ps.size(); ++i) tr_z += ps.weights.w[i] * sol.Z[i].trace();

  RiskLsReport rep;
  rep.gamma = gamma;
  rep.method = "perturbative";
  rep.iterations = 1;
  rep.phi_value = eval.value;
  rep.value = eval.value + gamma * (0.5 * eval.grad.grad_m.squaredNorm() +
                                    (eval.grad.grad_S * sol.S_tilde).trace() + 0.5 * tr_z);
  rep.m = bary.ls.m + gamma * eval.grad.grad_m;
  rep.S = bary.ls.S + gamma * sol.S_tilde;
  rep.residual = sol.residual;
  rep.pert = std::move(sol);
  rep.has_pert = true;
  return rep;
}

}  // namespace frechet
