#pragma once

// Reference frames: the straight-line network that locally minimizes the
// anisotropic length over junction positions, together with the machinery to
// write nearby networks as normal graphs over it.
//
// The frame's three segments are parametrized with constant speed
// |gamma*'| = L_i = |Sigma* - P^i| on [0,1]; every formula downstream carries
// the explicit |gamma*'| factors, so nothing assumes unit speed.
//
// A height field h = (h^1,h^2,h^3) describes the normal offsets; the
// tangential offsets are slaved pointwise through mu = I h, where the 3x3
// matrix I is determined by the junction normals: whenever the three normal
// offsets come from one junction displacement delta (h^i = delta.nu*^i), the
// tangential offsets must be mu^i = delta.tau*^i to keep the curves
// concurrent.  I is assembled directly from that geometric requirement.

#include "trinet/anisotropy.hpp"
#include "trinet/common.hpp"
#include "trinet/errors.hpp"
#include "trinet/geometry.hpp"

namespace trinet {

struct HeightField {
  std::array<std::vector<double>, 3> comp;

  int size() const { return static_cast<int>(comp[0].size()); }
  std::vector<double>& operator[](int i) { return comp[i]; }
  const std::vector<double>& operator[](int i) const { return comp[i]; }

  static HeightField zero(int n) {
    HeightField h;
    for (auto& c : h.comp) c.assign(n, 0.0);
    return h;
  }
};

/// Monotone parameter maps Phi^i: [0,1] -> [0,1], one per curve.
struct Reparametrization {
  std::array<std::vector<double>, 3> Phi;
};

struct ReferenceFrame {
  std::array<Vec2, 3> endpoints;
  Vec2 junction;                        // Sigma*
  std::array<double, 3> lengths;        // L_i = |gamma*^i'| (constant speed)
  std::array<Vec2, 3> tau_star;
  std::array<Vec2, 3> nu_star;
  std::array<DiscreteCurve, 3> gamma_star;
  JunctionData junction_data;
  Mat3 I_matrix;
  int N = 0;

  double min_length() const {
    return std::min({lengths[0], lengths[1], lengths[2]});
  }
};

struct FrameOptions {
  double newton_tol = 1e-12;   // gradient norm tolerance in minimize
  int max_iters = 50;
  double closeness_gate = 0.2; // fraction of min segment length
};

namespace detail {

/// d/dx on a scalar grid function, second order.
inline std::vector<double> d1s(const std::vector<double>& f, double dx) {
  const int n = static_cast<int>(f.size());
  std::vector<double> d(n);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dx);
  for (int j = 1; j < n - 1; ++j) d[j] = (f[j + 1] - f[j - 1]) / (2.0 * dx);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dx);
  return d;
}

/// d^2/dx^2 on a scalar grid function, second order.
inline std::vector<double> d2s(const std::vector<double>& f, double dx) {
  const int n = static_cast<int>(f.size());
  const double h2 = dx * dx;
  std::vector<double> d(n);
  d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
  for (int j = 1; j < n - 1; ++j) d[j] = (f[j + 1] - 2.0 * f[j] + f[j - 1]) / h2;
  d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
  return d;
}

/// Energy of the straight star with junction at s: sum of
/// phi_polar(perp(s - P^i)); exact since each segment is straight.
inline double star_energy(const std::array<Vec2, 3>& P, const Vec2& s,
                          const Anisotropy& phi_polar) {
  double e = 0.0;
  for (int i = 0; i < 3; ++i) {
    const Vec2 d = s - P[i];
    if (d.norm() <= 1e-9) return 1e300;  // barrier: junction on an endpoint
    e += phi_polar.eval(perp(d));
  }
  return e;
}

/// Catmull-Rom interpolation of a uniformly sampled curve with clamped end
/// ghosts; evaluates position and parameter derivative at t (extended
/// linearly outside [0,1]).
struct CurveInterp {
  const std::vector<Vec2>* pts;
  int n;

  explicit CurveInterp(const DiscreteCurve& c)
      : pts(&c.points), n(c.size()) {}

  Vec2 ghost(int m) const {
    const auto& p = *pts;
    if (m < 0) return 2.0 * p[0] - p[-m];
    if (m >= n) return 2.0 * p[n - 1] - p[2 * (n - 1) - m];
    return p[m];
  }

  void eval(double t, Vec2* pos, Vec2* deriv) const {
    const double u = t * (n - 1);
    int m = static_cast<int>(std::floor(u));
    m = std::clamp(m, 0, n - 2);
    const double s = u - m;
    const Vec2 p0 = ghost(m - 1), p1 = ghost(m), p2 = ghost(m + 1),
               p3 = ghost(m + 2);
    const Vec2 a = 0.5 * (p2 - p0);
    const Vec2 b = p0 - 2.5 * p1 + 2.0 * p2 - 0.5 * p3;
    const Vec2 c = -0.5 * p0 + 1.5 * p1 - 1.5 * p2 + 0.5 * p3;
    *pos = p1 + s * (a + s * (b + s * c));
    *deriv = (a + s * (2.0 * b + 3.0 * s * c)) * (n - 1);
  }
};

}  // namespace detail

/// Junction position minimizing the anisotropic length of the straight star
/// over the three fixed endpoints.  Damped Newton; at the optimum the summed
/// Cahn-Hoffmann vectors vanish (balanced junction).
inline Vec2 minimize(const Vec2& P1, const Vec2& P2, const Vec2& P3,
                     const Anisotropy& phi_polar,
                     const FrameOptions& opts = {}) {
  const std::array<Vec2, 3> P = {P1, P2, P3};
  double pmin = 1e300;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) pmin = std::min(pmin, (P[i] - P[j]).norm());
  if (pmin <= 1e-12)
    throw DegenerateMinimizer("endpoints coincide");

  Mat2 R;
  R << 0.0, -1.0, 1.0, 0.0;  // perp as a matrix
  Vec2 s = (P1 + P2 + P3) / 3.0;
  double f = detail::star_energy(P, s, phi_polar);

  int it = 0;
  for (; it < opts.max_iters; ++it) {
    Vec2 g = Vec2::Zero();
    Mat2 H = Mat2::Zero();
    for (int i = 0; i < 3; ++i) {
      const Vec2 d = R * (s - P[i]);
      g += R.transpose() * phi_polar.grad(d);
      H += R.transpose() * phi_polar.hess(d) * R;
    }
    if (g.norm() <= opts.newton_tol * (1.0 + std::abs(f))) break;

    // Levenberg guard for the (rank-deficient per term) Hessian sum.
    Eigen::SelfAdjointEigenSolver<Mat2> es(H);
    if (es.eigenvalues().minCoeff() <= 1e-12 * (1.0 + H.trace()))
      H += (1e-8 + 1e-4 * g.norm()) * Mat2::Identity();
    const Vec2 step = H.ldlt().solve(-g);

    double scale = 1.0;
    bool accepted = false;
    for (int halve = 0; halve < 30; ++halve) {
      const Vec2 cand = s + scale * step;
      const double fc = detail::star_energy(P, cand, phi_polar);
      if (fc <= f - 1e-4 * scale * std::abs(g.dot(step))) {
        s = cand;
        f = fc;
        accepted = true;
        break;
      }
      scale *= 0.5;
    }
    // Iterates attracted into an endpoint signal a vertex-optimal (Steiner
    // degenerate) configuration: the objective loses smoothness there, so
    // report degeneracy rather than a solver failure.
    for (int i = 0; i < 3; ++i)
      if ((s - P[i]).norm() < opts.closeness_gate * pmin)
        throw DegenerateMinimizer(
            "optimal junction collapses onto an endpoint (closeness gate)");
    if (!accepted)
      throw NewtonDivergence("junction minimization stalled in line search");
  }
  if (it >= opts.max_iters)
    throw NewtonDivergence("junction minimization did not converge");
  for (int i = 0; i < 3; ++i)
    if ((s - P[i]).norm() < opts.closeness_gate * pmin)
      throw DegenerateMinimizer(
          "optimal junction collapses onto an endpoint (closeness gate)");
  return s;
}

/// Tangential coupling matrix from explicit junction normals/tangents.
/// Row i solves the 2x2 system expressing the junction displacement in the
/// basis (nu^j, nu^k) and reads off its tau^i component, so by construction
/// I maps (delta.nu^i)_i to (delta.tau^i)_i for every delta in R^2.
inline Mat3 build_I(const std::array<Vec2, 3>& nu,
                    const std::array<Vec2, 3>& tau) {
  Mat3 I = Mat3::Zero();
  for (int i = 0; i < 3; ++i) {
    const int j = next3(i), k = prev3(i);
    const double c = nu[j].dot(nu[k]);
    const double denom = 1.0 - c * c;
    if (denom <= 1e-12)
      throw DegenerateAngles("parallel junction normals in tangential coupling");
    const double tj = nu[j].dot(tau[i]);
    const double tk = nu[k].dot(tau[i]);
    I(i, j) = (tj - c * tk) / denom;
    I(i, k) = (tk - c * tj) / denom;
  }
  return I;
}

/// Tangential coupling matrix from junction data alone; reconstructs an
/// anticlockwise-ordered set of normals realizing the stored angles.
inline Mat3 build_I(const JunctionData& jd) {
  std::array<Vec2, 3> nu, tau;
  // Gap between nu^i and nu^{i+1} equals the angle opposite the third index.
  const double args[3] = {0.0, jd.angles[2], jd.angles[2] + jd.angles[0]};
  for (int i = 0; i < 3; ++i) {
    nu[i] = Vec2(std::cos(args[i]), std::sin(args[i]));
    tau[i] = -perp(nu[i]);
  }
  return build_I(nu, tau);
}

/// Build the full reference frame over endpoints (P1,P2,P3) with N nodes per
/// segment.
inline ReferenceFrame build_frame(const Vec2& P1, const Vec2& P2, const Vec2& P3,
                                  const Anisotropy& phi_polar, int N,
                                  const FrameOptions& opts = {}) {
  if (N < 8) throw DegenerateCurve("frame grid needs at least 8 nodes");
  ReferenceFrame fr;
  fr.endpoints = {P1, P2, P3};
  fr.junction = minimize(P1, P2, P3, phi_polar, opts);
  fr.N = N;
  for (int i = 0; i < 3; ++i) {
    const Vec2 d = fr.junction - fr.endpoints[i];
    fr.lengths[i] = d.norm();
    fr.tau_star[i] = d / fr.lengths[i];
    fr.nu_star[i] = perp(fr.tau_star[i]);
    fr.gamma_star[i].points.resize(N);
    for (int j = 0; j < N; ++j) {
      const double x = static_cast<double>(j) / (N - 1);
      fr.gamma_star[i].points[j] = fr.endpoints[i] + x * d;
    }
  }
  fr.junction_data = junction_data_from_normals(fr.nu_star);
  fr.I_matrix = build_I(fr.nu_star, fr.tau_star);
  return fr;
}

/// Slaved tangential field mu = I h, applied pointwise in x.
inline HeightField mu_of_h(const ReferenceFrame& fr, const HeightField& h) {
  HeightField mu = HeightField::zero(h.size());
  for (int j = 0; j < h.size(); ++j) {
    const Vec3 hj(h[0][j], h[1][j], h[2][j]);
    const Vec3 mj = fr.I_matrix * hj;
    for (int i = 0; i < 3; ++i) mu[i][j] = mj[i];
  }
  return mu;
}

/// Network described by the height field over the frame:
/// gamma^i = gamma*^i + h^i nu*^i + (I h)^i tau*^i.
inline Network reconstruct(const ReferenceFrame& fr, const HeightField& h) {
  if (h.size() != fr.N)
    throw DegenerateCurve("height field resolution differs from frame grid");
  const HeightField mu = mu_of_h(fr, h);
  Network net;
  net.endpoints = fr.endpoints;
  for (int i = 0; i < 3; ++i) {
    net.curves[i].points.resize(fr.N);
    for (int j = 0; j < fr.N; ++j)
      net.curves[i].points[j] = fr.gamma_star[i].points[j] +
                                h[i][j] * fr.nu_star[i] +
                                mu[i][j] * fr.tau_star[i];
  }
  // The three curve ends coincide exactly when the junction-sum constraint
  // holds; expose their mean as the junction point.
  net.junction = (net.curves[0].points.back() + net.curves[1].points.back() +
                  net.curves[2].points.back()) /
                 3.0;
  return net;
}

/// Invert the graph representation: find (h, Phi) with
/// net^i(Phi^i(x)) = gamma*^i(x) + h^i(x) nu*^i + (I h)^i(x) tau*^i
/// at every grid node.  The three curves couple through I, so each node
/// solves one 6-dimensional Newton system (positions + heights).
inline std::pair<HeightField, Reparametrization> graph_reparametrize(
    const ReferenceFrame& fr, const Network& net, const FrameOptions& opts = {}) {
  const int N = fr.N;
  for (int i = 0; i < 3; ++i)
    if (net.curves[i].size() < 8)
      throw DegenerateCurve("network curve needs at least 8 nodes");

  // Closeness gate: every network node must stay near the frame's segment.
  const double gate = opts.closeness_gate * fr.min_length();
  for (int i = 0; i < 3; ++i) {
    const Vec2 a = fr.endpoints[i], b = fr.junction;
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    for (const Vec2& q : net.curves[i].points) {
      const double t = std::clamp((q - a).dot(ab) / len2, 0.0, 1.0);
      if ((q - (a + t * ab)).norm() > gate)
        throw NewtonDivergence(
            "network exceeds the closeness gate of the reference frame");
    }
  }

  std::array<detail::CurveInterp, 3> interp = {
      detail::CurveInterp(net.curves[0]), detail::CurveInterp(net.curves[1]),
      detail::CurveInterp(net.curves[2])};

  HeightField h = HeightField::zero(N);
  Reparametrization rep;
  for (auto& p : rep.Phi) p.assign(N, 0.0);

  Eigen::Matrix<double, 6, 1> z = Eigen::Matrix<double, 6, 1>::Zero();
  const double scale = fr.min_length();
  for (int j = 1; j < N; ++j) {
    const double x = static_cast<double>(j) / (N - 1);
    // Warm start: advance the previous node's solution by one grid cell.
    z[0] = std::min(z[0] + 1.0 / (N - 1), 1.0);
    z[1] = std::min(z[1] + 1.0 / (N - 1), 1.0);
    z[2] = std::min(z[2] + 1.0 / (N - 1), 1.0);

    bool converged = false;
    for (int it = 0; it < opts.max_iters; ++it) {
      Eigen::Matrix<double, 6, 1> F;
      Eigen::Matrix<double, 6, 6> J = Eigen::Matrix<double, 6, 6>::Zero();
      const Vec3 hvec(z[3], z[4], z[5]);
      const Vec3 mu = fr.I_matrix * hvec;
      for (int i = 0; i < 3; ++i) {
        Vec2 pos, deriv;
        interp[i].eval(z[i], &pos, &deriv);
        const Vec2 res = pos - fr.gamma_star[i].points[j] -
                         z[3 + i] * fr.nu_star[i] - mu[i] * fr.tau_star[i];
        F[2 * i] = res.x();
        F[2 * i + 1] = res.y();
        J.block<2, 1>(2 * i, i) = deriv;
        for (int k = 0; k < 3; ++k) {
          Vec2 dh = -fr.I_matrix(i, k) * fr.tau_star[i];
          if (k == i) dh -= fr.nu_star[i];
          J.block<2, 1>(2 * i, 3 + k) = dh;
        }
      }
      if (F.cwiseAbs().maxCoeff() <= opts.newton_tol * (1.0 + scale)) {
        converged = true;
        break;
      }
      const Eigen::Matrix<double, 6, 1> step = J.fullPivLu().solve(-F);
      // Damped update: backtrack on the residual norm.
      const double f0 = F.norm();
      double damp = 1.0;
      bool ok = false;
      for (int halve = 0; halve < 30; ++halve) {
        const Eigen::Matrix<double, 6, 1> cand = z + damp * step;
        Eigen::Matrix<double, 6, 1> Fc;
        const Vec3 hc(cand[3], cand[4], cand[5]);
        const Vec3 muc = fr.I_matrix * hc;
        for (int i = 0; i < 3; ++i) {
          Vec2 pos, deriv;
          interp[i].eval(cand[i], &pos, &deriv);
          const Vec2 res = pos - fr.gamma_star[i].points[j] -
                           cand[3 + i] * fr.nu_star[i] - muc[i] * fr.tau_star[i];
          Fc[2 * i] = res.x();
          Fc[2 * i + 1] = res.y();
        }
        if (Fc.norm() < f0) {
          z = cand;
          ok = true;
          break;
        }
        damp *= 0.5;
      }
      if (!ok)
        throw NewtonDivergence("nodewise graph Newton stalled");
    }
    if (!converged)
      throw NewtonDivergence("nodewise graph Newton did not converge");
    for (int i = 0; i < 3; ++i) {
      rep.Phi[i][j] = z[i];
      h[i][j] = z[3 + i];
    }
    (void)x;
  }

  for (int i = 0; i < 3; ++i) {
    rep.Phi[i][0] = 0.0;
    h[i][0] = 0.0;
    for (int j = 1; j < N; ++j)
      if (rep.Phi[i][j] <= rep.Phi[i][j - 1])
        throw NonMonotoneReparametrization(
            "recovered parameter map is not strictly increasing");
  }
  return {h, rep};
}

/// Discrete C0/C1/C2 sup norms of a height field on the frame grid.
struct CkNorms {
  double c0 = 0.0, c1 = 0.0, c2 = 0.0;
};

inline CkNorms height_norms(const HeightField& h) {
  CkNorms out;
  const int n = h.size();
  const double dx = 1.0 / (n - 1);
  for (int i = 0; i < 3; ++i) {
    out.c0 = std::max(out.c0, sup_norm(h[i]));
    out.c1 = std::max(out.c1, sup_norm(detail::d1s(h[i], dx)));
    out.c2 = std::max(out.c2, sup_norm(detail::d2s(h[i], dx)));
  }
  return out;
}

}  // namespace trinet
