#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "frechet_risk/risk1d.hpp"
#include "test_support.hpp"

using namespace frechet;

namespace {

PriorSet shifted_normals() {
  return PriorSet::of({QuantileModel::normal(0.0, 1.0), QuantileModel::normal(2.0, 1.0)},
                      WeightVector::uniform(2));
}

RiskMapping softplus() {
  return RiskMapping::custom(
      [](const Vector& z) { return std::log1p(std::exp(z(0))); },
      [](const Vector& z) { return Vector::Constant(1, 1.0 / (1.0 + std::exp(-z(0)))); });
}

}  // namespace

TEST_CASE("affine closed form: value and shifted maximizer") {
  auto ps = shifted_normals();
  const auto rep = risk_1d_affine(ps, 0.0, 1.0, 0.1);
  CHECK(rep.value == doctest::Approx(1.05).epsilon(1e-9));
  const auto expected = QuantileModel::normal(1.0, 1.0);
  for (std::size_t j = 0; j < expected.values.size(); ++j) {
    CHECK(std::abs(rep.maximizer.values[j] - (expected.values[j] + 0.1)) < 1e-9);
  }
  CHECK(rep.method == "closed-form");
}

TEST_CASE("affine with b=0 returns alpha for any gamma") {
  auto ps = shifted_normals();
  for (double gamma : {1e-3, 0.1, 2.0}) {
    CHECK(risk_1d_affine(ps, 1.7, 0.0, gamma).value == doctest::Approx(1.7).epsilon(1e-12));
  }
}

TEST_CASE("gamma -> 0 limit recovers the barycenter expectation") {
  auto ps = shifted_normals();
  const double expectation = quantile_expectation(quantile_barycenter(ps).quantile,
                                                  RiskMapping::affine(0.0, 1.0));
  CHECK(risk_1d_affine(ps, 0.0, 1.0, 1e-12).value ==
        doctest::Approx(expectation).epsilon(1e-9));
}

TEST_CASE("quadratic with c=0 reduces to the affine solver") {
  auto ps = shifted_normals();
  const auto q = risk_1d_quadratic(ps, 0.3, 1.2, 0.0, 0.07);
  const auto a = risk_1d_affine(ps, 0.3, 1.2, 0.07);
  CHECK(q.value == doctest::Approx(a.value).epsilon(1e-12));
}

TEST_CASE("quadratic closed form cross-checked by the direct solver") {
  auto ps = shifted_normals();
  const auto closed = risk_1d_quadratic(ps, 0.0, 0.0, 0.5, 0.2);
  const auto direct = risk_1d_direct(ps, RiskMapping::quadratic(0.0, 0.0, 0.5), 0.2);
  CHECK(std::abs(closed.value - direct.value) < 1e-5 * (1.0 + std::abs(closed.value)));
  // lambda = 0.9: maximizer is g_B / 0.9
  const auto gb = quantile_barycenter(ps).quantile;
  for (std::size_t j = 0; j < gb.values.size(); j += 250) {
    CHECK(closed.maximizer.values[j] == doctest::Approx(gb.values[j] / 0.9).epsilon(1e-10));
  }
}

TEST_CASE("quadratic beyond the well-posed boundary raises") {
  auto ps = shifted_normals();
  CHECK_THROWS_WITH_AS(risk_1d_quadratic(ps, 0.0, 0.0, 1.0, 1.0),
                       doctest::Contains("exceeds 1/gamma"), NumericalError);
}

TEST_CASE("foc on an affine mapping reproduces the closed-form maximizer") {
  auto ps = shifted_normals();
  const auto foc = risk_1d_foc(ps, RiskMapping::affine(0.0, 1.0), 0.1);
  const auto closed = risk_1d_affine(ps, 0.0, 1.0, 0.1);
  for (std::size_t j = 0; j < foc.maximizer.values.size(); j += 100) {
    CHECK(std::abs(foc.maximizer.values[j] - closed.maximizer.values[j]) < 1e-10);
  }
  CHECK(std::abs(foc.value - closed.value) < 1e-10);
}

TEST_CASE("foc on softplus: tiny residual, agrees with direct") {
  auto ps = PriorSet::of({QuantileModel::normal(0.0, 1.0), QuantileModel::normal(1.0, 1.0)},
                         WeightVector::uniform(2));
  const auto foc = risk_1d_foc(ps, softplus(), 0.1);
  CHECK(foc.residual <= 1e-10);
  const auto direct = risk_1d_direct(ps, softplus(), 0.1);
  CHECK(std::abs(foc.value - direct.value) < 1e-5);
}

TEST_CASE("foc matches the quadratic closed form to 1e-8") {
  auto ps = shifted_normals();
  for (double c : {-0.8, 0.4, 0.9}) {
    const double gamma = 0.2;
    const auto closed = risk_1d_quadratic(ps, 0.1, 0.5, c, gamma);
    const auto foc = risk_1d_foc(ps, RiskMapping::quadratic(0.1, 0.5, c), gamma);
    CHECK(std::abs(closed.value - foc.value) <= 1e-8 * (1.0 + std::abs(closed.value)));
  }
}

TEST_CASE("direct solver matches the affine closed form") {
  auto ps = shifted_normals();
  const auto direct = risk_1d_direct(ps, RiskMapping::affine(0.2, 1.5), 0.15);
  const auto closed = risk_1d_affine(ps, 0.2, 1.5, 0.15);
  CHECK(std::abs(direct.value - closed.value) <= 1e-6 * (1.0 + std::abs(closed.value)));
}

TEST_CASE("direct value decreases toward the barycenter expectation as gamma drops") {
  auto ps = shifted_normals();
  const auto phi = softplus();
  const double floor =
      quantile_expectation(quantile_barycenter(ps).quantile, phi);
  double prev = std::numeric_limits<double>::infinity();
  for (double gamma : {0.1, 0.01, 0.001}) {
    const double v = risk_1d_direct(ps, phi, gamma).value;
    CHECK(v <= prev + 1e-12);
    CHECK(v >= floor - 1e-8);
    prev = v;
  }
  CHECK(prev - floor < 1e-3);
}

TEST_CASE("single prior: maximizer approaches it as gamma drops") {
  auto ps = PriorSet::of({QuantileModel::normal(0.5, 1.3)}, WeightVector::uniform(1));
  const auto phi = softplus();
  double prev = std::numeric_limits<double>::infinity();
  for (double gamma : {0.5, 0.05, 0.005}) {
    const auto rep = risk_1d_direct(ps, phi, gamma);
    double dist = 0.0;
    for (std::size_t j = 0; j < rep.maximizer.values.size(); ++j) {
      dist = std::max(dist, std::abs(rep.maximizer.values[j] - ps.quantiles[0].values[j]));
    }
    CHECK(dist < prev);
    prev = dist;
  }
}

TEST_CASE("perturbative is exact for affine mappings") {
  auto ps = shifted_normals();
  for (double gamma : {0.01, 0.2, 1.0}) {
    const auto pert = risk_1d_perturbative(ps, RiskMapping::affine(0.0, 2.0), gamma);
    const auto closed = risk_1d_affine(ps, 0.0, 2.0, gamma);
    CHECK(pert.value == doctest::Approx(closed.value).epsilon(1e-12));
  }
}

TEST_CASE("perturbative at gamma=0 is the barycenter expectation") {
  auto ps = shifted_normals();
  const auto pert = risk_1d_perturbative(ps, softplus(), 0.0);
  CHECK(pert.value == doctest::Approx(pert.zeroth_order).epsilon(1e-14));
}

TEST_CASE("perturbative error shrinks at second order in gamma") {
  auto ps = PriorSet::of({QuantileModel::normal(0.0, 1.0), QuantileModel::normal(1.0, 1.0)},
                         WeightVector::uniform(2));
  const auto phi = softplus();
  const double g1 = 0.2, g2 = 0.1;
  const double e1 =
      std::abs(risk_1d_perturbative(ps, phi, g1).value - risk_1d_direct(ps, phi, g1).value);
  const double e2 =
      std::abs(risk_1d_perturbative(ps, phi, g2).value - risk_1d_direct(ps, phi, g2).value);
  const double factor = e1 / e2;
  CHECK(factor > 3.3);
  CHECK(factor < 4.7);
}

TEST_CASE("cash invariance across solvers") {
  auto ps = shifted_normals();
  const double kappa = 0.8, gamma = 0.15;
  // affine
  CHECK(risk_1d_affine(ps, -kappa, 1.0, gamma).value ==
        doctest::Approx(risk_1d_affine(ps, 0.0, 1.0, gamma).value - kappa).epsilon(1e-12));
  // custom through foc and direct
  const auto phi = softplus();
  const auto phi_cash = RiskMapping::custom(
      [kappa](const Vector& z) { return std::log1p(std::exp(z(0))) - kappa; },
      [](const Vector& z) { return Vector::Constant(1, 1.0 / (1.0 + std::exp(-z(0)))); });
  CHECK(std::abs(risk_1d_foc(ps, phi_cash, gamma).value -
                 (risk_1d_foc(ps, phi, gamma).value - kappa)) < 1e-9);
  CHECK(std::abs(risk_1d_direct(ps, phi_cash, gamma).value -
                 (risk_1d_direct(ps, phi, gamma).value - kappa)) < 1e-9);
}

TEST_CASE("monotonicity in the mapping") {
  auto ps = shifted_normals();
  const auto lo = softplus();
  const auto hi = RiskMapping::custom(
      [](const Vector& z) { return std::log1p(std::exp(z(0))) + 0.1 * std::cos(z(0)) + 0.1; },
      nullptr);
  // hi >= lo pointwise (cos >= -1)
  CHECK(risk_1d_direct(ps, lo, 0.1).value <= risk_1d_direct(ps, hi, 0.1).value + 1e-9);
}

TEST_CASE("gamma-monotonicity over a 5-point grid, all solvers") {
  auto ps = shifted_normals();
  const auto phi = softplus();
  const double gammas[5] = {0.02, 0.05, 0.1, 0.2, 0.4};
  double prev_foc = -1e300, prev_dir = -1e300, prev_aff = -1e300;
  for (double g : gammas) {
    const double vf = risk_1d_foc(ps, phi, g).value;
    const double vd = risk_1d_direct(ps, phi, g).value;
    const double va = risk_1d_affine(ps, 0.0, 1.0, g).value;
    CHECK(vf >= prev_foc - 1e-9);
    CHECK(vd >= prev_dir - 1e-9);
    CHECK(va >= prev_aff - 1e-9);
    prev_foc = vf;
    prev_dir = vd;
    prev_aff = va;
  }
}

TEST_CASE("barycenter lower bound holds on every solver") {
  auto ps = shifted_normals();
  const auto phi = softplus();
  const double floor = quantile_expectation(quantile_barycenter(ps).quantile, phi);
  CHECK(risk_1d_foc(ps, phi, 0.05).value >= floor - 1e-8);
  CHECK(risk_1d_direct(ps, phi, 0.05).value >= floor - 1e-8);
  CHECK(risk_1d_perturbative(ps, phi, 0.05).value >= floor - 1e-8);
}

TEST_CASE("auto dispatch picks closed form, then foc, then direct") {
  auto ps = shifted_normals();
  CHECK(risk_1d_auto(ps, RiskMapping::affine(0, 1), 0.1).method == "closed-form");
  CHECK(risk_1d_auto(ps, softplus(), 0.1).method == "foc");
  // softplus curvature is at most 1/4, so gamma = 8 makes z - gamma phi'
  // non-monotone and auto must fall back to the direct solver
  const auto rep = risk_1d_auto(ps, softplus(), 8.0);
  CHECK(rep.method == "direct");
}

TEST_CASE("foc reports when the solution leaves quantile space") {
  // a mapping whose derivative dips sharply re-orders the grid values
  const auto wiggle = RiskMapping::custom(
      [](const Vector& z) { return -2.0 * std::cos(3.0 * z(0)); },
      [](const Vector& z) { return Vector::Constant(1, 6.0 * std::sin(3.0 * z(0))); });
  auto ps = shifted_normals();
  CHECK_THROWS_AS(risk_1d_foc(ps, wiggle, 0.5), NumericalError);
}
