#pragma once

#include "frechet_risk/types.hpp"

namespace frechet {

// Dense SPD kernels. All routines expect symmetric positive definite input
// (checked; eigenvalues below kSpdEigFloor * lambda_max are rejected, not
// clipped) and return symmetric output.

inline constexpr double kSpdSymTol = 1e-10;    // relative symmetry tolerance
inline constexpr double kSpdEigFloor = 1e-12;  // relative eigenvalue floor

Matrix symmetrize(const Matrix& a);

bool is_spd(const Matrix& a, double sym_tol = kSpdSymTol, double eig_floor = kSpdEigFloor);

/// Throws NumericalError naming `what` if `a` is not SPD.
void require_spd(const Matrix& a, const std::string& what);

/// Symmetric X with X*X = a, via eigendecomposition.
Matrix sqrt_spd(const Matrix& a);

/// Symmetric X with X*X = a^{-1}.
Matrix inv_sqrt_spd(const Matrix& a);

/// Solves Y*G + G*Y = c for SPD G. In G's eigenbasis the solution is
/// Yhat_ij = Chat_ij / (lambda_i + lambda_j); Y is symmetric whenever c is.
Matrix solve_sylvester_spd(const Matrix& g, const Matrix& c);

/// Geometric mean a # b = a^{1/2} (a^{-1/2} b a^{-1/2})^{1/2} a^{1/2};
/// the unique SPD solution of X a^{-1} X = b.
Matrix geometric_mean(const Matrix& a, const Matrix& b);

}  // namespace frechet
