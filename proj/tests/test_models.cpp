#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "frechet_risk/models.hpp"
#include "test_support.hpp"

using namespace frechet;
using namespace frechet::test;

namespace {

PriorSet two_gaussian_quantiles() {
  return PriorSet::of({QuantileModel::normal(0.0, 1.0), QuantileModel::normal(2.0, 1.0)},
                      WeightVector::uniform(2));
}

}  // namespace

TEST_CASE("validate_prior_set accepts well-formed input") {
  CHECK(validate_prior_set(two_gaussian_quantiles()).ok());
}

TEST_CASE("validate_prior_set flags simplex violation") {
  auto ps = two_gaussian_quantiles();
  ps.weights.w = {0.7, 0.4};
  const auto report = validate_prior_set(ps);
  REQUIRE_FALSE(report.ok());
  CHECK(report.str().find("weights sum 1.1") != std::string::npos);
}

TEST_CASE("validate_prior_set flags non-monotone quantile with index") {
  QuantileModel bad{{0.25, 0.75}, {1.0, 0.5}};
  auto ps = PriorSet::of({bad}, WeightVector::uniform(1));
  const auto report = validate_prior_set(ps);
  REQUIRE_FALSE(report.ok());
  CHECK(report.str().find("non-monotone quantile at index 1") != std::string::npos);
}

TEST_CASE("validate_prior_set flags non-SPD scatter and mixed grids") {
  Matrix bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;  // indefinite
  auto ps = PriorSet::of({LocationScatterModel{Vector::Zero(2), bad, CentralLaw::normal()}},
                         WeightVector::uniform(1));
  CHECK_FALSE(validate_prior_set(ps).ok());

  auto mixed = PriorSet::of({QuantileModel::normal(0, 1, 101), QuantileModel::normal(0, 1, 51)},
                            WeightVector::uniform(2));
  const auto report = validate_prior_set(mixed);
  REQUIRE_FALSE(report.ok());
  CHECK(report.str().find("mixed grids") != std::string::npos);
}

TEST_CASE("validation is idempotent") {
  auto ps = two_gaussian_quantiles();
  ps.weights.w = {0.7, 0.4};
  const auto a = validate_prior_set(ps);
  const auto b = validate_prior_set(ps);
  CHECK(a.str() == b.str());
}

TEST_CASE("quantile_expectation constant and linear cases") {
  const auto phi_id = RiskMapping::affine(0.0, 1.0);
  CHECK(quantile_expectation(QuantileModel::constant(3.0), phi_id) ==
        doctest::Approx(3.0).epsilon(1e-14));

  // g(s) = s on the midpoint lattice: the rule integrates linear g exactly
  QuantileModel ramp{midpoint_grid(2001), midpoint_grid(2001)};
  CHECK(quantile_expectation(ramp, phi_id) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("quantile_expectation second moment of the standard normal") {
  const auto q = QuantileModel::normal(0.0, 1.0, 2001);
  const auto phi_sq = RiskMapping::custom([](const Vector& z) { return z(0) * z(0); });
  CHECK(quantile_expectation(q, phi_sq) == doctest::Approx(1.0).epsilon(1e-3));
  // grid refinement shrinks the tail error
  const auto q8 = QuantileModel::normal(0.0, 1.0, 8001);
  CHECK(std::abs(quantile_expectation(q8, phi_sq) - 1.0) <
        std::abs(quantile_expectation(q, phi_sq) - 1.0));
}

TEST_CASE("student quantile model has unit variance and heavier tails") {
  const auto q = QuantileModel::student(6.0, 0.0, 1.0, 4001);
  CHECK(q.mean() == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(q.variance() == doctest::Approx(1.0).epsilon(2e-2));
  const auto n = QuantileModel::normal(0.0, 1.0, 4001);
  CHECK(q.values.back() > n.values.back());
}

TEST_CASE("ls_expectation exact moment formulas") {
  // linear: <a, m> regardless of S
  Vector a(2), m(2);
  a << 1.0, 0.0;
  m << 2.0, 3.0;
  std::mt19937_64 rng(31);
  const Matrix s = random_spd(2, rng);
  const LocationScatterModel model{m, s, CentralLaw::normal()};
  CHECK(ls_expectation(model, RiskMapping::linear_multi(a), 10, 1) ==
        doctest::Approx(2.0).epsilon(1e-14));

  // quadratic with a = 0, A = I, m = 0, S = I: Tr(I) = 2
  const LocationScatterModel iso{Vector::Zero(2), Matrix::Identity(2, 2),
                                 CentralLaw::normal()};
  CHECK(ls_expectation(iso, RiskMapping::quadratic_multi(Vector::Zero(2), Matrix::Identity(2, 2)),
                       10, 1) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("ls_expectation Monte Carlo path: odd moment vanishes") {
  const LocationScatterModel iso{Vector::Zero(2), Matrix::Identity(2, 2),
                                 CentralLaw::normal()};
  const auto cube = RiskMapping::custom([](const Vector& z) { return z(0) * z(0) * z(0); });
  const int n = 200000;
  const double est = ls_expectation(iso, cube, n, 99);
  CHECK(std::abs(est) < 4.0 * std::sqrt(15.0) / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("ls_expectation: Monte Carlo agrees with exact path for quadratic tags") {
  std::mt19937_64 rng(37);
  const Matrix s = random_spd(2, rng);
  const Vector m = random_vector(2, rng);
  const Matrix A = random_symmetric(2, rng, 0.5);
  const Vector a = random_vector(2, rng);
  const LocationScatterModel model{m, s, CentralLaw::normal()};
  const auto quad = RiskMapping::quadratic_multi(a, A);
  const double exact = ls_expectation(model, quad, 1, 1);
  // route the same mapping through the sampling path
  const auto custom = RiskMapping::custom([&](const Vector& z) { return quad.eval(z); });
  const int n = 400000;
  const double mc = ls_expectation(model, custom, n, 123);
  CHECK(std::abs(mc - exact) < 5.0 * 10.0 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("central laws have zero mean and unit coordinate variance") {
  for (const auto& law : {CentralLaw::normal(), CentralLaw::student(6.0)}) {
    std::mt19937_64 rng(41);
    const int n = 100000;
    const Matrix z = law.sample_matrix(rng, n, 2);
    const double tol = 5.0 / std::sqrt(static_cast<double>(n));
    for (int j = 0; j < 2; ++j) {
      CHECK(std::abs(z.col(j).mean()) < tol);
      CHECK(std::abs(z.col(j).squaredNorm() / n - 1.0) < 3.0 * tol);
    }
    // cross-covariance of the two coordinates
    CHECK(std::abs(z.col(0).dot(z.col(1)) / n) < 3.0 * tol);
  }
}

TEST_CASE("student central law requires df > 4") {
  CHECK_THROWS_AS(CentralLaw::student(3.0), ValidationError);
}

TEST_CASE("custom mapping without gradient gets finite differences") {
  const auto phi = RiskMapping::custom([](const Vector& z) { return std::sin(z(0)); });
  const double g = phi.grad1d(0.7);
  CHECK(g == doctest::Approx(std::cos(0.7)).epsilon(1e-8));
}
