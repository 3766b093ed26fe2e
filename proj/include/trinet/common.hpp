#pragma once

// Shared scalar/vector aliases and small numeric helpers used across the
// library.  Everything is double precision; planar vectors are Eigen types.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

namespace trinet {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

/// Anticlockwise rotation by +90 degrees: (x,y) -> (-y,x).
/// This is the `perp` convention used for normals throughout: nu = perp(tau).
inline Vec2 perp(const Vec2& v) { return Vec2(-v.y(), v.x()); }

/// 2x2 determinant of the column pair (a,b); equals perp(a).dot(b) * (-1)^0.
inline double det2(const Vec2& a, const Vec2& b) {
  return a.x() * b.y() - a.y() * b.x();
}

/// Cyclic successor on {0,1,2}.
inline int next3(int i) { return (i + 1) % 3; }
/// Cyclic predecessor on {0,1,2}.
inline int prev3(int i) { return (i + 2) % 3; }

/// acos clamped into its domain; guards 1+eps roundoff on unit dot products.
inline double safe_acos(double c) { return std::acos(std::clamp(c, -1.0, 1.0)); }

/// Deterministic uniform double in [0,1) from a 64-bit engine.
/// Hand-rolled (53 mantissa bits) so output is identical across platforms,
/// unlike std::uniform_real_distribution.
inline double u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform double in [a,b).
inline double uniform(std::mt19937_64& rng, double a, double b) {
  return a + (b - a) * u01(rng);
}

/// Shortest-round-trip decimal formatting; used by every CSV/JSON writer so
/// that repeated runs with the same seed are byte-identical.
inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Discrete sup norm.
inline double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace trinet
