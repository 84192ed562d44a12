#include "frechet_risk/allocation.hpp"

#include <cmath>
#include <numeric>

namespace frechet {

RiskMapping combine_mappings(const std::vector<RiskMapping>& sectors,
                             const std::vector<double>& coeff) {
  if (sectors.empty() || sectors.size() != coeff.size()) {
    throw ValidationError("combine_mappings: need one coefficient per sector");
  }
  bool parametric = true;
  int d = -1;
  for (const auto& s : sectors) {
    if (s.tag == RiskMapping::Tag::linear_multi) {
      d = std::max<int>(d, static_cast<int>(s.a.size()));
    } else if (s.tag == RiskMapping::Tag::quadratic_multi) {
      d = std::max<int>(d, static_cast<int>(s.a.size()));
    } else {
      parametric = false;
    }
  }
  if (parametric) {
    Vector a = Vector::Zero(d);
    Matrix A = Matrix::Zero(d, d);
    bool any_quad = false;
    for (std::size_t k = 0; k < sectors.size(); ++k) {
      a += coeff[k] * sectors[k].a;
      if (sectors[k].tag == RiskMapping::Tag::quadratic_multi) {
        A += coeff[k] * sectors[k].A;
        any_quad = true;
      }
    }
    return any_quad ? RiskMapping::quadratic_multi(a, A) : RiskMapping::linear_multi(a);
  }
  auto secs = sectors;
  auto cfs = coeff;
  auto eval = [secs, cfs](const Vector& z) {
    double acc = 0.0;
    for (std::size_t k = 0; k < secs.size(); ++k) acc += cfs[k] * secs[k].eval(z);
    return acc;
  };
  auto grad = [secs, cfs](const Vector& z) {
    Vector g = Vector::Zero(z.size());
    for (std::size_t k = 0; k < secs.size(); ++k) g += cfs[k] * secs[k].grad(z);
    return g;
  };
  return RiskMapping::custom(eval, grad);
}

AllocationReport allocate_perturbative(const PriorSet& ps,
                                       const std::vector<RiskMapping>& sectors,
                                       double gamma, int n_samples, std::uint64_t seed) {
  if (sectors.empty()) throw ValidationError("allocate_perturbative: no sectors");
  const int K = static_cast<int>(sectors.size());
  const auto bary = ls_wasserstein_barycenter(ps, 1e-12, 2000);

  // per-sector values and gradients at the barycenter, common random numbers
  std::vector<PhiEval> evals(K);
  for (int k = 0; k < K; ++k) {
    evals[k] = eval_phi_gradients(bary.ls, sectors[k], n_samples, seed);
  }
  const int d = bary.ls.dim();
  double A_total = 0.0;
  Vector M = Vector::Zero(d);
  Matrix C = Matrix::Zero(d, d);
  for (int k = 0; k < K; ++k) {
    A_total += evals[k].value;
    M += evals[k].grad.grad_m;
    C += evals[k].grad.grad_S;
  }

  PerturbationOperators ops(ps, bary.ls);
  PerturbationSolution total_sol = ops.solve(C);
  const auto Z = ops.second_order(total_sol.Y);
  double tr_z = 0.0;
  for (int i = 0; i < ps.size(); ++i) tr_z += ps.weights.w[i] * Z[i].trace();

  AllocationReport rep;
  rep.method = "perturbative";
  rep.gamma = gamma;
  rep.total_risk = A_total + gamma * (0.5 * M.squaredNorm() +
                                      (C * total_sol.S_tilde).trace() + 0.5 * tr_z);
  rep.residual = total_sol.residual;
  rep.contributions.resize(K);
  for (int k = 0; k < K; ++k) {
    PerturbationSolution sk = ops.solve(evals[k].grad.grad_S);
    const auto Zp = ops.second_order_cross(sk.Y, total_sol.Y);
    double tr_zp = 0.0;
    for (int i = 0; i < ps.size(); ++i) tr_zp += ps.weights.w[i] * Zp[i].trace();
    rep.contributions[k] =
        evals[k].value +
        gamma * (M.dot(evals[k].grad.grad_m) +
                 (evals[k].grad.grad_S * total_sol.S_tilde).trace() + 0.5 * tr_zp);
    rep.residual = std::max(rep.residual, sk.residual);
  }
  rep.euler_gap =
      std::accumulate(rep.contributions.begin(), rep.contributions.end(), 0.0) -
      rep.total_risk;
  return rep;
}

AllocationReport allocate_numeric(const PriorSet& ps,
                                  const std::vector<RiskMapping>& sectors, double gamma,
                                  double eps, int n_samples, std::uint64_t seed) {
  if (sectors.empty()) throw ValidationError("allocate_numeric: no sectors");
  if (!(eps > 0.0)) throw ValidationError("allocate_numeric: eps must be > 0");
  const int K = static_cast<int>(sectors.size());

  std::vector<double> ones(K, 1.0);
  const auto total =
      risk_ls_fixed_point(ps, combine_mappings(sectors, ones), gamma, 1e-12, 2000,
                          n_samples, seed);

  AllocationReport rep;
  rep.method = "numeric-diff";
  rep.gamma = gamma;
  rep.total_risk = total.value;
  rep.contributions.resize(K);
  for (int k = 0; k < K; ++k) {
    auto up = ones, dn = ones;
    up[k] += eps;
    dn[k] -= eps;
    const auto rp =
        risk_ls_fixed_point(ps, combine_mappings(sectors, up), gamma, 1e-12, 2000,
                            n_samples, seed);
    const auto rm =
        risk_ls_fixed_point(ps, combine_mappings(sectors, dn), gamma, 1e-12, 2000,
                            n_samples, seed);
    rep.contributions[k] = (rp.value - rm.value) / (2.0 * eps);
  }
  rep.euler_gap =
      std::accumulate(rep.contributions.begin(), rep.contributions.end(), 0.0) -
      rep.total_risk;
  return rep;
}

}  // namespace frechet
