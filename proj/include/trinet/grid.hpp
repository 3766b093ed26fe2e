#pragma once

#include <Eigen/Dense>
#include <vector>

#include "trinet/common.hpp"
#include "trinet/errors.hpp"

namespace trinet::grid {

/// Quadrature weights on the uniform unit grid with boundary-corrected end
/// weights (fourth-order accurate for smooth integrands); interior weight dx.
inline std::vector<double> quad_weights(int n) {
  if (n < 8) throw DegenerateInput("quadrature needs at least 8 nodes");
  const double dx = 1.0 / (n - 1);
  std::vector<double> w(static_cast<std::size_t>(n), dx);
  w[0] = w[n - 1] = dx * 3.0 / 8.0;
  w[1] = w[n - 2] = dx * 7.0 / 6.0;
  w[2] = w[n - 3] = dx * 23.0 / 24.0;
  return w;
}

inline double integrate(const std::vector<double>& w,
                        const std::vector<double>& f) {
  double s = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * f[j];
  return s;
}

/// d/dx on the uniform unit grid, fourth order: five-point centered stencil
/// in the interior, one-sided five-point stencils at and next to each end.
template <class T>
inline std::vector<T> derivative(const std::vector<T>& f) {
  const int n = static_cast<int>(f.size());
  if (n < 8) throw DegenerateInput("derivative needs at least 8 nodes");
  const double s = static_cast<double>(n - 1) / 12.0;  // 1/(12 dx)
  std::vector<T> d(f.size());
  d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * s;
  d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * s;
  for (int j = 2; j <= n - 3; ++j)
    d[j] = (f[j - 2] - 8.0 * f[j - 1] + 8.0 * f[j + 1] - f[j + 2]) * s;
  d[n - 2] = (-f[n - 5] + 6.0 * f[n - 4] - 18.0 * f[n - 3] + 10.0 * f[n - 2] +
              3.0 * f[n - 1]) * s;
  d[n - 1] = (3.0 * f[n - 5] - 16.0 * f[n - 4] + 36.0 * f[n - 3] -
              48.0 * f[n - 2] + 25.0 * f[n - 1]) * s;
  return d;
}

/// Dense matrix form of `derivative` for operator assembly.
inline Eigen::MatrixXd derivative_matrix(int n) {
  if (n < 8) throw DegenerateInput("derivative needs at least 8 nodes");
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  const double s = static_cast<double>(n - 1) / 12.0;
  const double head[2][5] = {{-25.0, 48.0, -36.0, 16.0, -3.0},
                             {-3.0, -10.0, 18.0, -6.0, 1.0}};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 5; ++c) {
      D(r, c) = head[r][c] * s;
      D(n - 1 - r, n - 1 - c) = -head[r][c] * s;
    }
  for (int j = 2; j <= n - 3; ++j) {
    D(j, j - 2) = s;
    D(j, j - 1) = -8.0 * s;
    D(j, j + 1) = 8.0 * s;
    D(j, j + 2) = -s;
  }
  return D;
}

}  // namespace trinet::grid
