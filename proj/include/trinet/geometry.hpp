#pragma once

// Discrete planar curves and triple-junction networks.
//
// A curve is sampled at N >= 8 nodes on the uniform parameter grid
// x_j = j/(N-1) over [0,1].  Curve i runs from its fixed endpoint P^i
// (x = 0) to the mobile triple junction (x = 1).  Tangents are normalized
// parameter derivatives; normals are the anticlockwise rotation nu = perp(tau),
// and the signed curvature is kappa = det(gamma', gamma'') / |gamma'|^3.
//
// Derivatives use second-order stencils (central in the interior, one-sided
// at the ends); integrals use the trapezoidal rule.

#include "trinet/anisotropy.hpp"
#include "trinet/common.hpp"
#include "trinet/errors.hpp"

namespace trinet {

struct DiscreteCurve {
  std::vector<Vec2> points;

  int size() const { return static_cast<int>(points.size()); }
  double dx() const { return 1.0 / (size() - 1); }
};

struct Network {
  std::array<DiscreteCurve, 3> curves;
  std::array<Vec2, 3> endpoints;  // fixed ends, one per curve, at x = 0
  Vec2 junction;                  // common mobile end at x = 1
};

/// Junction description: angles[i] is the (unsigned) angle between the
/// normals of the *other two* curves; weights are the force-balance
/// coefficients with sum_i weights[i] * nu^i(1) = 0, normalized so
/// weights[2] = 1.
struct JunctionData {
  std::array<double, 3> angles;
  std::array<double, 3> weights;
};

/// Per-node differential frame of one curve.
struct CurveFrames {
  std::vector<Vec2> deriv;   // gamma'
  std::vector<Vec2> tau;     // unit tangent
  std::vector<Vec2> nu;      // unit normal, perp(tau)
  std::vector<double> speed; // |gamma'|
};

namespace detail {

inline void require_curve(const DiscreteCurve& c) {
  if (c.size() < 8)
    throw DegenerateCurve("curve must carry at least 8 nodes");
}

/// First parameter derivative, second order (central + one-sided ends).
inline std::vector<Vec2> d1(const std::vector<Vec2>& p, double dx) {
  const int n = static_cast<int>(p.size());
  std::vector<Vec2> d(n);
  d[0] = (-3.0 * p[0] + 4.0 * p[1] - p[2]) / (2.0 * dx);
  for (int j = 1; j < n - 1; ++j) d[j] = (p[j + 1] - p[j - 1]) / (2.0 * dx);
  d[n - 1] = (3.0 * p[n - 1] - 4.0 * p[n - 2] + p[n - 3]) / (2.0 * dx);
  return d;
}

/// Second parameter derivative, second order.
inline std::vector<Vec2> d2(const std::vector<Vec2>& p, double dx) {
  const int n = static_cast<int>(p.size());
  const double h2 = dx * dx;
  std::vector<Vec2> d(n);
  d[0] = (2.0 * p[0] - 5.0 * p[1] + 4.0 * p[2] - p[3]) / h2;
  for (int j = 1; j < n - 1; ++j) d[j] = (p[j + 1] - 2.0 * p[j] + p[j - 1]) / h2;
  d[n - 1] = (2.0 * p[n - 1] - 5.0 * p[n - 2] + 4.0 * p[n - 3] - p[n - 4]) / h2;
  return d;
}

inline double trapz(const std::vector<double>& f, double dx) {
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t j = 1; j + 1 < f.size(); ++j) s += f[j];
  return s * dx;
}

}  // namespace detail

/// Tangent/normal frame at every node.  Throws DegenerateCurve when the
/// parametrization loses regularity.
inline CurveFrames frames(const DiscreteCurve& c) {
  detail::require_curve(c);
  CurveFrames f;
  f.deriv = detail::d1(c.points, c.dx());
  const int n = c.size();
  f.tau.resize(n);
  f.nu.resize(n);
  f.speed.resize(n);
  for (int j = 0; j < n; ++j) {
    const double s = f.deriv[j].norm();
    if (s <= 1e-12)
      throw DegenerateCurve("vanishing parameter derivative");
    f.speed[j] = s;
    f.tau[j] = f.deriv[j] / s;
    f.nu[j] = perp(f.tau[j]);
  }
  return f;
}

/// Signed curvature at every node.
inline std::vector<double> curvature(const DiscreteCurve& c) {
  detail::require_curve(c);
  const auto g1 = detail::d1(c.points, c.dx());
  const auto g2 = detail::d2(c.points, c.dx());
  std::vector<double> k(c.size());
  for (int j = 0; j < c.size(); ++j) {
    const double s = g1[j].norm();
    if (s <= 1e-12)
      throw DegenerateCurve("vanishing parameter derivative");
    k[j] = det2(g1[j], g2[j]) / (s * s * s);
  }
  return k;
}

/// Anisotropic curvature kappa_phi = (D^2 phi_polar(nu) tau . tau) * kappa.
inline std::vector<double> kappa_phi(const DiscreteCurve& c,
                                     const Anisotropy& phi_polar) {
  const auto f = frames(c);
  auto k = curvature(c);
  for (int j = 0; j < c.size(); ++j)
    k[j] *= f.tau[j].dot(phi_polar.hess(f.nu[j]) * f.tau[j]);
  return k;
}

/// Anisotropic length of one curve: integral of phi_polar(perp(gamma')) dx,
/// which equals the line integral of phi_polar(nu) ds by 1-homogeneity.
inline double curve_energy(const DiscreteCurve& c, const Anisotropy& phi_polar) {
  detail::require_curve(c);
  const auto g1 = detail::d1(c.points, c.dx());
  std::vector<double> f(c.size());
  for (int j = 0; j < c.size(); ++j) f[j] = phi_polar.eval(perp(g1[j]));
  return detail::trapz(f, c.dx());
}

/// Total anisotropic length of the network.
inline double energy(const Network& net, const Anisotropy& phi_polar) {
  double e = 0.0;
  for (const auto& c : net.curves) e += curve_energy(c, phi_polar);
  return e;
}

/// Unit normals of the three curves at the junction (x = 1).
inline std::array<Vec2, 3> junction_normals(const Network& net) {
  std::array<Vec2, 3> nu;
  for (int i = 0; i < 3; ++i) nu[i] = frames(net.curves[i]).nu.back();
  return nu;
}

/// Angles/weights from three unit junction normals.  Throws DegenerateAngles
/// when the normals fail to span positively (some weight non-positive) or an
/// angle degenerates.
inline JunctionData junction_data_from_normals(const std::array<Vec2, 3>& nu) {
  JunctionData jd;
  for (int i = 0; i < 3; ++i) {
    const int j = next3(i), k = prev3(i);
    jd.angles[i] = safe_acos(nu[j].dot(nu[k]));
    if (std::sin(jd.angles[i]) <= 1e-8)
      throw DegenerateAngles("junction angle degenerates (parallel normals)");
  }
  if (std::abs(jd.angles[0] + jd.angles[1] + jd.angles[2] - 2.0 * M_PI) > 1e-6)
    throw DegenerateAngles("junction normals do not span the plane positively");
  // Force balance: alpha^1 nu^1 + alpha^2 nu^2 = -nu^3 with alpha^3 = 1.
  const double det = det2(nu[0], nu[1]);
  if (std::abs(det) <= 1e-12)
    throw DegenerateAngles("junction normals nearly parallel");
  jd.weights[0] = det2(-nu[2], nu[1]) / det;
  jd.weights[1] = det2(nu[0], -nu[2]) / det;
  jd.weights[2] = 1.0;
  if (jd.weights[0] <= 0.0 || jd.weights[1] <= 0.0)
    throw DegenerateAngles("force-balance weights must be positive");
  return jd;
}

/// Junction data of a discrete network (normals read off at x = 1).
inline JunctionData junction_data(const Network& net) {
  return junction_data_from_normals(junction_normals(net));
}

/// Norm of the summed Cahn-Hoffmann vectors at the junction; zero exactly at
/// a balanced (Herring) junction.
inline double herring_residual(const Network& net, const Anisotropy& phi_polar) {
  const auto nu = junction_normals(net);
  Vec2 s = Vec2::Zero();
  for (int i = 0; i < 3; ++i) s += cahn_hoffmann(phi_polar, nu[i]);
  return s.norm();
}

/// Structural residuals of the network container itself: how far curve ends
/// are from the declared endpoints/junction.
struct NetworkResiduals {
  double endpoint;     // max_i |curve_i(0) - P^i|
  double concurrency;  // max_i |curve_i(1) - junction|
};

inline NetworkResiduals network_residuals(const Network& net) {
  NetworkResiduals r{0.0, 0.0};
  for (int i = 0; i < 3; ++i) {
    r.endpoint =
        std::max(r.endpoint, (net.curves[i].points.front() - net.endpoints[i]).norm());
    r.concurrency =
        std::max(r.concurrency, (net.curves[i].points.back() - net.junction).norm());
  }
  return r;
}

/// Maximum |kappa_phi| over the whole network.
inline double max_kappa_phi(const Network& net, const Anisotropy& phi_polar) {
  double m = 0.0;
  for (const auto& c : net.curves) m = std::max(m, sup_norm(kappa_phi(c, phi_polar)));
  return m;
}

namespace detail {

inline double point_segment_distance(const Vec2& p, const Vec2& a,
                                     const Vec2& b) {
  const Vec2 d = b - a;
  const double len2 = d.squaredNorm();
  if (len2 <= 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
  return (p - (a + t * d)).norm();
}

inline double one_sided_hausdorff(const Network& from, const Network& to) {
  double worst = 0.0;
  for (const auto& c : from.curves) {
    for (const Vec2& p : c.points) {
      double best = 1e300;
      for (const auto& d : to.curves)
        for (std::size_t j = 0; j + 1 < d.points.size(); ++j)
          best = std::min(best,
                          point_segment_distance(p, d.points[j], d.points[j + 1]));
      worst = std::max(worst, best);
    }
  }
  return worst;
}

}  // namespace detail

/// Symmetric Hausdorff distance between two networks, measuring each node
/// set against the other's polygonal curves.
inline double symmetric_hausdorff(const Network& a, const Network& b) {
  return std::max(detail::one_sided_hausdorff(a, b),
                  detail::one_sided_hausdorff(b, a));
}

/// Diameter of the node set (for relative tolerances).
inline double network_diameter(const Network& net) {
  double d = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int k = i; k < 3; ++k)
      for (const Vec2& p : net.curves[i].points)
        for (const Vec2& q : net.curves[k].points)
          d = std::max(d, (p - q).norm());
  return d;
}

}  // namespace trinet
