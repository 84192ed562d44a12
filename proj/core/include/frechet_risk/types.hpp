#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace frechet {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Bad or inconsistent inputs (maps to CLI exit code 1).
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// A computation failed numerically: divergence, ill-posed problem,
/// non-finite intermediate (maps to CLI exit code 2).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace frechet
