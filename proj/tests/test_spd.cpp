#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "frechet_risk/spd.hpp"
#include "test_support.hpp"

using namespace frechet;
using namespace frechet::test;

TEST_CASE("sqrt_spd identity and diagonal") {
  CHECK((sqrt_spd(Matrix::Identity(3, 3)) - Matrix::Identity(3, 3)).norm() < 1e-14);

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 4.0;
  d(1, 1) = 9.0;
  const Matrix r = sqrt_spd(d);
  CHECK(r(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(r(1, 1) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(std::abs(r(0, 1)) < 1e-14);
}

TEST_CASE("sqrt_spd rotated spectrum reproduces Q diag Q^T") {
  std::mt19937_64 rng(7);
  const Matrix q = random_orthogonal(2, rng);
  Vector lam(2);
  lam << 1.0, 4.0;
  const Matrix a = symmetrize(q * lam.asDiagonal() * q.transpose());
  const Matrix x = sqrt_spd(a);
  const Matrix expected = symmetrize(q * lam.cwiseSqrt().asDiagonal() * q.transpose());
  CHECK((x - expected).norm() < 1e-12);
  CHECK((x * x - a).norm() < 1e-12);
}

TEST_CASE("sqrt_spd residual over random SPD, d in {1,2,5,10}") {
  std::mt19937_64 rng(11);
  for (int d : {1, 2, 5, 10}) {
    for (int rep = 0; rep < 100; ++rep) {
      const Matrix a = random_spd(d, rng, 50.0);
      const Matrix x = sqrt_spd(a);
      CHECK((x * x - a).norm() <= 1e-10 * a.norm());
      CHECK((x - x.transpose()).norm() < 1e-12 * (1.0 + x.norm()));
    }
  }
}

TEST_CASE("sqrt_spd rejects non-SPD input") {
  Matrix bad = Matrix::Identity(2, 2);
  bad(1, 1) = -1.0;
  CHECK_THROWS_AS(sqrt_spd(bad), NumericalError);
  Matrix asym(2, 2);
  asym << 1.0, 0.5, -0.5, 1.0;
  CHECK_THROWS_AS(sqrt_spd(asym), NumericalError);
}

TEST_CASE("sylvester scalar case 2*g*y = c") {
  const Matrix g = Matrix::Constant(1, 1, 3.0);
  const Matrix c = Matrix::Constant(1, 1, 12.0);
  CHECK(solve_sylvester_spd(g, c)(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("sylvester with identity coefficient returns C/2") {
  std::mt19937_64 rng(3);
  const Matrix c = random_symmetric(4, rng);
  CHECK((solve_sylvester_spd(Matrix::Identity(4, 4), c) - 0.5 * c).norm() < 1e-13);
}

TEST_CASE("sylvester residual and symmetry, random d=4") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix g = random_spd(4, rng);
    const Matrix c = random_symmetric(4, rng, 3.0);
    const Matrix y = solve_sylvester_spd(g, c);
    CHECK((y * g + g * y - c).norm() <= 1e-10 * (c.norm() + 1.0));
    CHECK((y - y.transpose()).norm() < 1e-12 * (1.0 + y.norm()));
  }
}

TEST_CASE("sylvester matches brute-force linearized solve, d <= 5") {
  std::mt19937_64 rng(13);
  for (int d : {1, 2, 3, 4, 5}) {
    for (int rep = 0; rep < 20; ++rep) {
      const Matrix g = random_spd(d, rng, 20.0);
      const Matrix c = random_symmetric(d, rng, 2.0);
      const Matrix y = solve_sylvester_spd(g, c);
      const Matrix y_ref = sylvester_bruteforce(g, c);
      CHECK((y - y_ref).norm() <= 1e-9 * (1.0 + y_ref.norm()));
    }
  }
}

TEST_CASE("geometric mean idempotence and diagonal case") {
  std::mt19937_64 rng(17);
  const Matrix a = random_spd(3, rng);
  CHECK((geometric_mean(a, a) - a).norm() < 1e-10 * a.norm());

  Matrix x = Matrix::Zero(2, 2), y = Matrix::Zero(2, 2);
  x.diagonal() << 1.0, 4.0;
  y.diagonal() << 4.0, 1.0;
  const Matrix g = geometric_mean(x, y);
  CHECK(g(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(g(1, 1) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("geometric mean symmetry and Riccati property") {
  std::mt19937_64 rng(19);
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix a = random_spd(3, rng);
    const Matrix b = random_spd(3, rng);
    const Matrix g1 = geometric_mean(a, b);
    const Matrix g2 = geometric_mean(b, a);
    CHECK((g1 - g2).norm() < 1e-9 * (1.0 + g1.norm()));
    // (A#B) A^{-1} (A#B) = B
    const Matrix riccati = g1 * a.inverse() * g1;
    CHECK((riccati - b).norm() < 1e-9 * (1.0 + b.norm()));
    CHECK(is_spd(g1));
  }
}

TEST_CASE("trace identity: Tr(2 sum w_i Y_i(T)) equals Tr(sum w_i (S^{-1} # S_i) T)") {
  // the derivative of the scatter Frechet function via per-prior Sylvester
  // solves against the geometric-mean form
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 10; ++rep) {
    const int d = 3, n = 3;
    const Matrix s = random_spd(d, rng);
    const Matrix t = random_symmetric(d, rng);
    std::vector<Matrix> si;
    const double w = 1.0 / n;
    double lhs = 0.0, rhs = 0.0;
    for (int i = 0; i < n; ++i) {
      si.push_back(random_spd(d, rng));
      const Matrix bi = sqrt_spd(si[i]);
      const Matrix gi = sqrt_spd(symmetrize(bi * s * bi));
      const Matrix yi = solve_sylvester_spd(gi, symmetrize(bi * t * bi));
      lhs += 2.0 * w * yi.trace();
      rhs += w * (geometric_mean(s.inverse(), si[i]) * t).trace();
    }
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
  }
}

TEST_CASE("SPD-in/SPD-out closure") {
  std::mt19937_64 rng(29);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix a = random_spd(4, rng, 100.0);
    const Matrix b = random_spd(4, rng, 100.0);
    CHECK(is_spd(sqrt_spd(a)));
    CHECK(is_spd(inv_sqrt_spd(a)));
    CHECK(is_spd(geometric_mean(a, b)));
  }
}
