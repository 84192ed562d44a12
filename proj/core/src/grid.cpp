#include "frechet_risk/grid.hpp"

#include <cmath>
#include <cstddef>

#include "frechet_risk/types.hpp"

namespace frechet {

std::vector<double> midpoint_grid(int m) {
  if (m < 1) throw ValidationError("midpoint_grid: need at least one point");
  std::vector<double> s(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) s[j] = (j + 0.5) / m;
  return s;
}

bool is_midpoint_grid(const std::vector<double>& grid) {
  const int m = static_cast<int>(grid.size());
  if (m < 1) return false;
  for (int j = 0; j < m; ++j) {
    if (std::abs(grid[j] - (j + 0.5) / m) > 1e-12) return false;
  }
  return true;
}

double integrate_unit(const std::vector<double>& grid, const std::vector<double>& values) {
  if (grid.size() != values.size() || grid.empty()) {
    throw ValidationError("integrate_unit: grid/value size mismatch");
  }
  const std::size_t m = grid.size();
  if (is_midpoint_grid(grid)) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc / static_cast<double>(m);
  }
  if (m == 1) return values[0];
  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < m; ++j) {
    acc += 0.5 * (values[j] + values[j + 1]) * (grid[j + 1] - grid[j]);
  }
  return acc;
}

std::vector<double> isotonic_projection(const std::vector<double>& v) {
  // PAVA with uniform weights: maintain a stack of blocks (mean, count).
  std::vector<double> mean;
  std::vector<int> count;
  mean.reserve(v.size());
  count.reserve(v.size());
  for (double x : v) {
    double m = x;
    int c = 1;
    while (!mean.empty() && mean.back() > m) {
      m = (m * c + mean.back() * count.back()) / (c + count.back());
      c += count.back();
      mean.pop_back();
      count.pop_back();
    }
    mean.push_back(m);
    count.push_back(c);
  }
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t b = 0; b < mean.size(); ++b) {
    out.insert(out.end(), static_cast<std::size_t>(count[b]), mean[b]);
  }
  return out;
}

bool is_non_decreasing(const std::vector<double>& v, double slack) {
  for (std::size_t j = 1; j < v.size(); ++j) {
    if (v[j] < v[j - 1] - slack) return false;
  }
  return true;
}

}  // namespace frechet
