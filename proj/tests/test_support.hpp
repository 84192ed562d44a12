#pragma once

#include <random>

#include "frechet_risk/models.hpp"
#include "frechet_risk/spd.hpp"

namespace frechet::test {

inline Matrix random_orthogonal(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ();
  // fix signs so the distribution is Haar-ish
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < d; ++j) {
    if (r(j, j) < 0) q.col(j) *= -1.0;
  }
  return q;
}

inline Matrix random_spd(int d, std::mt19937_64& rng, double cond = 10.0) {
  const Matrix q = random_orthogonal(d, rng);
  std::uniform_real_distribution<double> unif(1.0, cond);
  Vector lam(d);
  for (int i = 0; i < d; ++i) lam(i) = unif(rng);
  return symmetrize(q * lam.asDiagonal() * q.transpose());
}

inline Matrix random_symmetric(int d, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = normal(rng);
  return symmetrize(a);
}

inline Vector random_vector(int d, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = normal(rng);
  return v;
}

inline PriorSet random_ls_priors(int d, int n, std::mt19937_64& rng) {
  std::vector<LocationScatterModel> models;
  models.reserve(n);
  for (int i = 0; i < n; ++i) {
    models.push_back({random_vector(d, rng), random_spd(d, rng), CentralLaw::normal()});
  }
  std::uniform_real_distribution<double> unif(0.2, 1.0);
  std::vector<double> w(n);
  double sum = 0.0;
  for (auto& x : w) sum += (x = unif(rng));
  for (auto& x : w) x /= sum;
  return PriorSet::of(std::move(models), WeightVector{w});
}

/// Brute-force d^2 x d^2 linearized Sylvester solve of Y G + G Y = C,
/// independent of the eigenbasis production path.
inline Matrix sylvester_bruteforce(const Matrix& g, const Matrix& c) {
  const int d = static_cast<int>(g.rows());
  Matrix big = Matrix::Zero(d * d, d * d);
  Vector rhs(d * d);
  auto flat = [d](int i, int j) { return i * d + j; };
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      rhs(flat(i, j)) = c(i, j);
      for (int k = 0; k < d; ++k) {
        big(flat(i, j), flat(i, k)) += g(k, j);  // (Y G)_{ij}
        big(flat(i, j), flat(k, j)) += g(i, k);  // (G Y)_{ij}
      }
    }
  }
  const Vector y = big.fullPivLu().solve(rhs);
  Matrix out(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out(i, j) = y(flat(i, j));
  return out;
}

}  // namespace frechet::test
