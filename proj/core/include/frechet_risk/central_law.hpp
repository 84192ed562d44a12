#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "frechet_risk/types.hpp"

namespace frechet {

/// Central variable Z0 of a location-scatter family: zero mean, identity
/// covariance, iid coordinates. Shipped families: standard normal and
/// Student-t (df > 4) rescaled to unit variance.
struct CentralLaw {
  enum class Family { normal, student_t };

  Family family{Family::normal};
  double df{6.0};  // student_t only

  static CentralLaw normal();
  static CentralLaw student(double df);

  /// Unit-variance quantile of one coordinate.
  double quantile(double p) const;

  /// Log density of one coordinate (unit variance).
  double log_pdf(double z) const;

  double sample(std::mt19937_64& rng) const;

  /// n x d matrix of iid coordinate draws.
  Matrix sample_matrix(std::mt19937_64& rng, int n, int d) const;

  std::string name() const;
  bool operator==(const CentralLaw& other) const;
};

/// Standard normal quantile (unit variance).
double normal_quantile(double p);

/// Student-t quantile with df degrees of freedom (not rescaled).
double student_t_quantile(double p, double df);

/// Deterministic seed derivation for sharded/parallel sampling.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

}  // namespace frechet
