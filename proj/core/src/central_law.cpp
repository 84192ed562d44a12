#include "frechet_risk/central_law.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>

namespace frechet {

CentralLaw CentralLaw::normal() { return CentralLaw{Family::normal, 0.0}; }

CentralLaw CentralLaw::student(double df) {
  if (!(df > 4.0)) {
    throw ValidationError("CentralLaw::student: df must exceed 4");
  }
  return CentralLaw{Family::student_t, df};
}

double normal_quantile(double p) {
  static const boost::math::normal_distribution<double> dist(0.0, 1.0);
  return boost::math::quantile(dist, p);
}

double student_t_quantile(double p, double df) {
  const boost::math::students_t_distribution<double> dist(df);
  return boost::math::quantile(dist, p);
}

double CentralLaw::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) {
    throw ValidationError("CentralLaw::quantile: p must lie in (0,1)");
  }
  switch (family) {
    case Family::normal:
      return normal_quantile(p);
    case Family::student_t:
      // variance of t(df) is df/(df-2); rescale to unit variance
      return student_t_quantile(p, df) * std::sqrt((df - 2.0) / df);
  }
  throw NumericalError("CentralLaw::quantile: unknown family");
}

double CentralLaw::log_pdf(double z) const {
  switch (family) {
    case Family::normal:
      return -0.5 * z * z - 0.5 * std::log(2.0 * M_PI);
    case Family::student_t: {
      const double c = std::sqrt(df / (df - 2.0));  // unit-variance -> t scale
      const double t = z * c;
      const boost::math::students_t_distribution<double> dist(df);
      return std::log(boost::math::pdf(dist, t) * c);
    }
  }
  throw NumericalError("CentralLaw::log_pdf: unknown family");
}

double CentralLaw::sample(std::mt19937_64& rng) const {
  switch (family) {
    case Family::normal: {
      std::normal_distribution<double> d(0.0, 1.0);
      return d(rng);
    }
    case Family::student_t: {
      std::student_t_distribution<double> d(df);
      return d(rng) * std::sqrt((df - 2.0) / df);
    }
  }
  throw NumericalError("CentralLaw::sample: unknown family");
}

Matrix CentralLaw::sample_matrix(std::mt19937_64& rng, int n, int d) const {
  Matrix z(n, d);
  if (family == Family::normal) {
    std::normal_distribution<double> dist(0.0, 1.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j) z(i, j) = dist(rng);
  } else {
    std::student_t_distribution<double> dist(df);
    const double scale = std::sqrt((df - 2.0) / df);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j) z(i, j) = dist(rng) * scale;
  }
  return z;
}

std::string CentralLaw::name() const {
  return family == Family::normal ? "normal" : "student-t";
}

bool CentralLaw::operator==(const CentralLaw& other) const {
  if (family != other.family) return false;
  return family == Family::normal || df == other.df;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c) {
  // splitmix64 finalizer over the mixed words
  std::uint64_t x = master;
  for (std::uint64_t w : {a, b, c}) {
    x ^= w + 0x9e3779b97f4a7c15ULL + (x << 6) + (x >> 2);
    std::uint64_t z = x + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    x = z ^ (z >> 31);
  }
  return x;
}

}  // namespace frechet
