#pragma once

// Shared generators and oracles for the test suites.

#include <random>

#include "trinet/anisotropy.hpp"
#include "trinet/reference_frame.hpp"

namespace testutil {

using namespace trinet;

/// Random triangle with no tiny angles (junction minimizer stays interior for
/// the anisotropies used in the tests); random similarity applied for
/// coverage.
inline std::array<Vec2, 3> random_fat_triangle(std::mt19937_64& rng) {
  const double u = uniform(rng, 0.25, 0.75);
  const double v = uniform(rng, 0.55, 1.1);
  const double rot = uniform(rng, 0.0, 2.0 * M_PI);
  const double scale = uniform(rng, 0.7, 1.4);
  const Vec2 shift(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
  Mat2 R;
  R << std::cos(rot), -std::sin(rot), std::sin(rot), std::cos(rot);
  std::array<Vec2, 3> P = {Vec2(0.0, 0.0), Vec2(1.0, 0.0), Vec2(u, v)};
  for (auto& p : P) p = shift + scale * (R * p);
  return P;
}

/// Random SPD matrix with eigenvalues in [0.6, 4].
inline Mat2 random_spd(std::mt19937_64& rng) {
  const double l1 = uniform(rng, 0.6, 4.0);
  const double l2 = uniform(rng, 0.6, 4.0);
  const double t = uniform(rng, 0.0, M_PI);
  Mat2 R;
  R << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  Mat2 D = Mat2::Zero();
  D(0, 0) = l1;
  D(1, 1) = l2;
  return R * D * R.transpose();
}

/// Keep drawing triangles until the frame builds (interior minimizer).
inline ReferenceFrame random_frame(std::mt19937_64& rng,
                                   const Anisotropy& phi_polar, int N) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    const auto P = random_fat_triangle(rng);
    try {
      return build_frame(P[0], P[1], P[2], phi_polar, N);
    } catch (const DegenerateMinimizer&) {
      continue;
    } catch (const NewtonDivergence&) {
      continue;
    }
  }
  throw std::runtime_error("random_frame: no admissible triangle found");
}

/// Admissible height field: sine modes (h(0)=0 automatically) plus a smooth
/// x^2 junction mode per curve, with the junction values projected onto the
/// force-balance constraint sum_i alpha_i h^i(1) = 0.
inline HeightField random_admissible_field(const ReferenceFrame& fr,
                                           std::mt19937_64& rng, double amp,
                                           bool junction_modes = true) {
  const int n = fr.N;
  std::array<double, 3> b = {0.0, 0.0, 0.0};
  std::array<std::array<double, 3>, 3> a{};
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 3; ++k) a[i][k] = amp * uniform(rng, -1.0, 1.0);
    if (junction_modes) b[i] = amp * uniform(rng, -1.0, 1.0);
  }
  if (junction_modes) {
    const auto& al = fr.junction_data.weights;
    const double dot = al[0] * b[0] + al[1] * b[1] + al[2] * b[2];
    const double nrm2 = al[0] * al[0] + al[1] * al[1] + al[2] * al[2];
    for (int i = 0; i < 3; ++i) b[i] -= al[i] * dot / nrm2;
  }
  HeightField h = HeightField::zero(n);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = static_cast<double>(j) / (n - 1);
      double val = b[i] * x * x;
      for (int k = 0; k < 3; ++k) val += a[i][k] * std::sin((k + 1) * M_PI * x);
      h[i][j] = val;
    }
  }
  return h;
}

/// Independent oracle for the junction minimizer: iteratively refined grid
/// search over a box containing the endpoints.
inline Vec2 grid_search_min(const std::array<Vec2, 3>& P,
                            const Anisotropy& phi_polar) {
  auto star_E = [&](const Vec2& s) {
    double e = 0.0;
    for (int i = 0; i < 3; ++i) {
      const Vec2 d = s - P[i];
      if (d.norm() <= 1e-9) return 1e300;
      e += phi_polar.eval(perp(d));
    }
    return e;
  };
  Vec2 lo = P[0], hi = P[0];
  for (const auto& p : P) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  Vec2 c = 0.5 * (lo + hi);
  Vec2 w = 0.6 * (hi - lo) + Vec2(0.1, 0.1);
  Vec2 best = c;
  for (int round = 0; round < 9; ++round) {
    double fbest = 1e300;
    Vec2 argbest = best;
    for (int iy = 0; iy <= 40; ++iy) {
      for (int ix = 0; ix <= 40; ++ix) {
        const Vec2 s(c.x() - w.x() + 2.0 * w.x() * ix / 40.0,
                     c.y() - w.y() + 2.0 * w.y() * iy / 40.0);
        const double f = star_E(s);
        if (f < fbest) {
          fbest = f;
          argbest = s;
        }
      }
    }
    best = argbest;
    c = argbest;
    w /= 8.0;
  }
  return best;
}

}  // namespace testutil
