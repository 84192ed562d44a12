#pragma once

#include <vector>

namespace frechet {

// The shared quantile grid: M midpoints s_j = (j - 1/2) / M of (0,1). All
// 1-D modules use this lattice so quantile arithmetic is pointwise. On it,
// integrals over (0,1) reduce to the midpoint rule (1/M) * sum f(s_j), which
// is exact for affine integrands and keeps the tail cells of unbounded
// quantile functions (an endpoint trapezoid on the interior points would
// drop them).

inline constexpr int kDefaultGridSize = 2001;

std::vector<double> midpoint_grid(int m);

bool is_midpoint_grid(const std::vector<double>& grid);

/// Integral of a tabulated function over (0,1): midpoint rule on the
/// canonical lattice, trapezoid on the covered range otherwise.
double integrate_unit(const std::vector<double>& grid, const std::vector<double>& values);

/// L2 projection onto non-decreasing vectors (pool adjacent violators).
std::vector<double> isotonic_projection(const std::vector<double>& v);

bool is_non_decreasing(const std::vector<double>& v, double slack = 0.0);

}  // namespace frechet
