#include "frechet_risk/spd.hpp"

#include <cmath>

namespace frechet {

namespace {

struct EigPair {
  Vector values;
  Matrix vectors;
};

EigPair eig_spd(const Matrix& a, const std::string& what) {
  require_spd(a, what);
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(a));
  if (es.info() != Eigen::Success) {
    throw NumericalError(what + ": eigendecomposition failed");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

}  // namespace

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

bool is_spd(const Matrix& a, double sym_tol, double eig_floor) {
  if (a.rows() != a.cols() || a.rows() == 0) return false;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > sym_tol * scale) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(a), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) return false;
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = es.eigenvalues().maxCoeff();
  return lmax > 0.0 && lmin > eig_floor * lmax;
}

void require_spd(const Matrix& a, const std::string& what) {
  if (!is_spd(a)) {
    throw NumericalError(what + ": matrix is not symmetric positive definite");
  }
}

Matrix sqrt_spd(const Matrix& a) {
  auto [lam, v] = eig_spd(a, "sqrt_spd");
  return symmetrize(v * lam.cwiseSqrt().asDiagonal() * v.transpose());
}

Matrix inv_sqrt_spd(const Matrix& a) {
  auto [lam, v] = eig_spd(a, "inv_sqrt_spd");
  return symmetrize(v * lam.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose());
}

Matrix solve_sylvester_spd(const Matrix& g, const Matrix& c) {
  auto [lam, v] = eig_spd(g, "solve_sylvester_spd");
  if (c.rows() != g.rows() || c.cols() != g.cols()) {
    throw ValidationError("solve_sylvester_spd: dimension mismatch");
  }
  Matrix chat = v.transpose() * c * v;
  for (Eigen::Index i = 0; i < chat.rows(); ++i) {
    for (Eigen::Index j = 0; j < chat.cols(); ++j) {
      chat(i, j) /= lam(i) + lam(j);
    }
  }
  return v * chat * v.transpose();
}

Matrix geometric_mean(const Matrix& a, const Matrix& b) {
  require_spd(b, "geometric_mean");
  const Matrix ah = sqrt_spd(a);
  const Matrix aih = inv_sqrt_spd(a);
  return symmetrize(ah * sqrt_spd(symmetrize(aih * b * aih)) * ah);
}

}  // namespace frechet
