#pragma once

// Time discretizations of the weighted-curvature flow of a triple-junction
// network, in two equivalent formulations:
//
//   * a parametric solver moving every node of every curve with normal
//     velocity (mobility * curvature) plus the tangential motion of the
//     "special" parametrization u_t = Q(nu) u_xx / |u_x|^2, and
//   * a graph solver evolving the three height functions over a fixed
//     reference frame, F_h dh/dt = (Q kappa)(h), which stays meaningful up
//     to the invertibility of the normal-velocity transfer matrix F_h.
//
// Both steps are semi-implicit: the stiff second-derivative term is solved
// implicitly with coefficients frozen at the current state, and the junction
// conditions (the three curve ends stay concurrent and the weighted normals
// balance) are closed by a small Newton iteration in two unknowns.  Each
// accepted step must not raise the discrete energy beyond a slack
// proportional to the current energy; otherwise it is rejected.

#include <array>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

#include "trinet/variations.hpp"

namespace trinet {

enum class FlowMode { Parametric, Graph };

/// One instant of the evolution.  Graph states carry the frame and the
/// height field, and their network equals reconstruct(frame, h) by
/// construction; parametric states carry the frame only for reporting
/// (energy gap, gradient norm) and leave h empty.
struct FlowState {
  double t = 0.0;
  Network network;
  std::optional<ReferenceFrame> frame;
  std::optional<HeightField> h;
};

inline FlowState make_graph_state(const ReferenceFrame& fr,
                                  const HeightField& h, double t = 0.0) {
  FlowState s;
  s.t = t;
  s.network = reconstruct(fr, h);
  s.frame = fr;
  s.h = h;
  return s;
}

inline FlowState make_parametric_state(const ReferenceFrame& fr,
                                       const Network& net, double t = 0.0) {
  FlowState s;
  s.t = t;
  s.network = net;
  s.frame = fr;
  s.h.reset();
  return s;
}

/// Per-node 3x3 matrices converting height velocities into normal
/// velocities:  F(i,i) += nu_h^i . nu*_i  and  F(i,k) += (nu_h^i . tau*_i)
/// times the tangential-coupling matrix entry.  At h = 0 every node carries
/// the identity.
struct FhMatrix {
  std::vector<Mat3> at;  // one matrix per grid node
};

inline FhMatrix build_Fh(const ReferenceFrame& fr, const HeightField& h) {
  const Network net = reconstruct(fr, h);
  std::array<CurveFrames, 3> cf;
  for (int i = 0; i < 3; ++i) cf[i] = frames(net.curves[i]);
  FhMatrix F;
  F.at.assign(fr.N, Mat3::Zero());
  for (int j = 0; j < fr.N; ++j) {
    Mat3 m = Mat3::Zero();
    for (int i = 0; i < 3; ++i) {
      const Vec2 nuh = cf[i].nu[j];
      m(i, i) += nuh.dot(fr.nu_star[i]);
      m.row(i) += nuh.dot(fr.tau_star[i]) * fr.I_matrix.row(i);
    }
    F.at[j] = m;
  }
  return F;
}

/// Residuals of the conditions a network must satisfy to serve as flow
/// initial data: ends pinned, curve ends concurrent at the junction, the
/// weighted normals balanced there, and vanishing weighted curvature at the
/// fixed ends.  The compatibility of the linearized junction operator is
/// not checkable from a single network; the flag records that it was not
/// examined.
struct AdmissibilityReport {
  double endpoint = 0.0;
  double concurrency = 0.0;
  double herring = 0.0;
  double kappa_phi_zero = 0.0;
  bool lambda_checked = false;

  double max_residual() const {
    return std::max({endpoint, concurrency, herring, kappa_phi_zero});
  }
};

inline AdmissibilityReport check_admissible(const Network& net,
                                            const Anisotropy& phi_polar) {
  AdmissibilityReport rep;
  const NetworkResiduals r = network_residuals(net);
  rep.endpoint = r.endpoint;
  rep.concurrency = r.concurrency;
  rep.herring = herring_residual(net, phi_polar);
  for (const auto& c : net.curves)
    rep.kappa_phi_zero =
        std::max(rep.kappa_phi_zero, std::abs(kappa_phi(c, phi_polar).front()));
  rep.lambda_checked = false;
  return rep;
}

namespace detail {

/// One-sided end tangent vector (gamma' at x = 1), second order.
inline Vec2 end_derivative(const DiscreteCurve& c) {
  const int n = c.size();
  return (3.0 * c.points[n - 1] - 4.0 * c.points[n - 2] + c.points[n - 3]) /
         (2.0 * c.dx());
}

/// Sum of Cahn-Hoffmann vectors at the junction (force-balance residual).
inline Vec2 herring_vector(const Network& net, const Anisotropy& phi_polar) {
  Vec2 s = Vec2::Zero();
  for (const auto& c : net.curves) {
    const Vec2 g = end_derivative(c);
    const double J = g.norm();
    if (J <= 1e-12) throw DegenerateCurve("vanishing end derivative");
    s += phi_polar.grad(perp(g / J));
  }
  return s;
}

/// Signed weighted sum of the normal-velocity components the junction sees:
/// sum_i alpha_i [F(1)^{-1} (Q kappa)(1)]_i.  Throws SingularFh when F(1)
/// cannot be inverted.
inline double junction_velocity_sum(const ReferenceFrame& fr,
                                    const HeightField& h,
                                    const Anisotropy& phi_polar) {
  const Network net = reconstruct(fr, h);
  Vec3 y;
  Mat3 F = Mat3::Zero();
  for (int i = 0; i < 3; ++i) {
    const auto& c = net.curves[i];
    const Vec2 g = end_derivative(c);
    const double J = g.norm();
    if (J <= 1e-12) throw DegenerateCurve("vanishing end derivative");
    const Vec2 tau = g / J;
    const Vec2 nu = perp(tau);
    const double Q = phi_polar.eval(nu) * tau.dot(phi_polar.hess(nu) * tau);
    y[i] = Q * curvature(c).back();
    F(i, i) += nu.dot(fr.nu_star[i]);
    F.row(i) += nu.dot(fr.tau_star[i]) * fr.I_matrix.row(i);
  }
  if (std::abs(F.determinant()) < 1e-8)
    throw SingularFh("junction transfer matrix is numerically singular");
  const Vec3 v = F.partialPivLu().solve(y);
  double s = 0.0;
  for (int i = 0; i < 3; ++i) s += fr.junction_data.weights[i] * v[i];
  return s;
}

}  // namespace detail

/// Residuals of the compatibility conditions a height field must satisfy to
/// start the graph flow: zero at the fixed ends, weighted end values summing
/// to zero (so the three deformed ends stay concurrent), vanishing weighted
/// curvature at x = 0, force balance at the junction, and a junction-velocity
/// sum of zero (the junction can move consistently at t = 0).
struct CompatibilityReport {
  double h_at_zero = 0.0;
  double junction_sum = 0.0;
  double kappa_at_zero = 0.0;
  double herring = 0.0;
  double velocity_sum = 0.0;

  double max_residual() const {
    return std::max(
        {h_at_zero, junction_sum, kappa_at_zero, herring, velocity_sum});
  }
};

inline CompatibilityReport check_h_compatibility(const ReferenceFrame& fr,
                                                 const HeightField& h,
                                                 const Anisotropy& phi_polar) {
  if (h.size() != fr.N)
    throw DegenerateCurve("height field resolution differs from frame grid");
  CompatibilityReport rep;
  double jsum = 0.0;
  for (int i = 0; i < 3; ++i) {
    rep.h_at_zero = std::max(rep.h_at_zero, std::abs(h[i][0]));
    jsum += fr.junction_data.weights[i] * h[i][fr.N - 1];
  }
  rep.junction_sum = std::abs(jsum);
  const Network net = reconstruct(fr, h);
  for (const auto& c : net.curves)
    rep.kappa_at_zero =
        std::max(rep.kappa_at_zero, std::abs(kappa_phi(c, phi_polar).front()));
  rep.herring = herring_residual(net, phi_polar);
  rep.velocity_sum =
      std::abs(detail::junction_velocity_sum(fr, h, phi_polar));
  return rep;
}

/// Controls for a single time step.
struct StepOptions {
  double newton_tol = 1e-10;       // junction force-balance residual
  int max_newton_iters = 40;
  double dissipation_slack = -1.0; // absolute; negative = 1e-10 * (1 + E_old)
};

namespace detail {

/// LU-style factorization of a block-tridiagonal system with 3x3 blocks:
/// A_j x_{j-1} + B_j x_j + C_j x_{j+1} = r_j for j = 0..m-1 (A_0 and
/// C_{m-1} unused).  Factor once, then solve for several right-hand sides.
struct BlockThomas {
  std::vector<Mat3> Binv;   // inverses of the eliminated diagonal blocks
  std::vector<Mat3> mult;   // multipliers A_j * Binv_{j-1}
  std::vector<Mat3> upper;  // copies of C_j

  void factor(const std::vector<Mat3>& A, const std::vector<Mat3>& B,
              const std::vector<Mat3>& C) {
    const int m = static_cast<int>(B.size());
    Binv.resize(m);
    mult.assign(m, Mat3::Zero());
    upper = C;
    Mat3 Btil = B[0];
    Binv[0] = Btil.inverse();
    for (int j = 1; j < m; ++j) {
      mult[j] = A[j] * Binv[j - 1];
      Btil = B[j] - mult[j] * C[j - 1];
      Binv[j] = Btil.inverse();
    }
  }

  std::vector<Vec3> solve(std::vector<Vec3> r) const {
    const int m = static_cast<int>(r.size());
    for (int j = 1; j < m; ++j) r[j] -= mult[j] * r[j - 1];
    std::vector<Vec3> x(m);
    x[m - 1] = Binv[m - 1] * r[m - 1];
    for (int j = m - 2; j >= 0; --j)
      x[j] = Binv[j] * (r[j] - upper[j] * x[j + 1]);
    return x;
  }
};

/// Scalar tridiagonal factorization (Thomas algorithm), same conventions.
struct ScalarThomas {
  std::vector<double> binv, mult, upper;

  void factor(const std::vector<double>& a, const std::vector<double>& b,
              const std::vector<double>& c) {
    const int m = static_cast<int>(b.size());
    binv.resize(m);
    mult.assign(m, 0.0);
    upper = c;
    double btil = b[0];
    binv[0] = 1.0 / btil;
    for (int j = 1; j < m; ++j) {
      mult[j] = a[j] * binv[j - 1];
      btil = b[j] - mult[j] * c[j - 1];
      binv[j] = 1.0 / btil;
    }
  }

  std::vector<double> solve(std::vector<double> r) const {
    const int m = static_cast<int>(r.size());
    for (int j = 1; j < m; ++j) r[j] -= mult[j] * r[j - 1];
    std::vector<double> x(m);
    x[m - 1] = binv[m - 1] * r[m - 1];
    for (int j = m - 2; j >= 0; --j)
      x[j] = binv[j] * (r[j] - upper[j] * x[j + 1]);
    return x;
  }
};

inline double default_slack(double e_old, double slack) {
  return slack >= 0.0 ? slack : 1e-10 * (1.0 + e_old);
}

}  // namespace detail

/// One semi-implicit step of the graph flow F_h dh/dt = (Q kappa)(h).
/// The second-derivative response of the curvature is implicit (through the
/// same tangential coupling that defines the reconstruction); everything
/// else is frozen at the current state.  The junction end values carry two
/// degrees of freedom (the third is slaved to keep the weighted end sum
/// exact); they are determined by a Newton iteration that closes the force
/// balance of the stepped network.
inline FlowState h_flow_step(const FlowState& state, double dt,
                             const Anisotropy& phi_polar,
                             const StepOptions& opts = {}) {
  if (!state.frame || !state.h)
    throw DegenerateInput("graph step requires a frame and a height field");
  if (!(dt > 0.0)) throw DegenerateInput("time step must be positive");
  const ReferenceFrame& fr = *state.frame;
  const HeightField& h = *state.h;
  const int n = fr.N;
  const double dx = 1.0 / (n - 1);

  const Network net = reconstruct(fr, h);
  const double e_old = discrete_energy(net, phi_polar);
  const double slack = detail::default_slack(e_old, opts.dissipation_slack);

  // Frozen per-node data of the current state.
  const FhMatrix F = build_Fh(fr, h);
  for (const Mat3& m : F.at)
    if (std::abs(m.determinant()) < 1e-10)
      throw SingularFh("normal-velocity transfer matrix degenerates");

  std::array<std::vector<Vec2>, 3> g1;
  std::array<std::vector<double>, 3> P, kap;
  for (int i = 0; i < 3; ++i) {
    const auto& c = net.curves[i];
    g1[i] = detail::d1(c.points, dx);
    const auto g2 = detail::d2(c.points, dx);
    P[i].resize(n);
    kap[i].resize(n);
    for (int j = 0; j < n; ++j) {
      const double J = g1[i][j].norm();
      if (J <= 1e-12) throw DegenerateCurve("vanishing parameter derivative");
      const Vec2 tau = g1[i][j] / J;
      const Vec2 nu = perp(tau);
      P[i][j] = phi_polar.eval(nu) * tau.dot(phi_polar.hess(nu) * tau);
      kap[i][j] = det2(g1[i][j], g2[j]) / (J * J * J);
    }
  }

  // Interior block system over nodes j = 1..n-2.
  const int m = n - 2;
  std::vector<Mat3> A(m), B(m), C(m);
  std::vector<Vec3> base_rhs(m);
  std::vector<Mat3> theta(m);
  for (int j = 1; j <= m; ++j) {
    Mat3 th = Mat3::Zero();
    Vec3 r;
    for (int i = 0; i < 3; ++i) {
      const double J = g1[i][j].norm();
      const double J3 = J * J * J;
      th(i, i) += P[i][j] * det2(g1[i][j], fr.nu_star[i]) / J3;
      th.row(i) +=
          (P[i][j] * det2(g1[i][j], fr.tau_star[i]) / J3) * fr.I_matrix.row(i);
      r[i] = P[i][j] * kap[i][j];
    }
    theta[j - 1] = th / (dx * dx);
    A[j - 1] = -theta[j - 1];
    C[j - 1] = -theta[j - 1];
    B[j - 1] = F.at[j] / dt + 2.0 * theta[j - 1];
    base_rhs[j - 1] = r;
  }

  detail::BlockThomas solver;
  solver.factor(A, B, C);

  // Junction end-value increments: two free components, third slaved so the
  // weighted end sum is preserved exactly.
  const auto& al = fr.junction_data.weights;
  auto end_increment = [&](const Vec2& w) {
    Vec3 d;
    d[0] = w[0];
    d[1] = w[1];
    d[2] = -(al[0] * w[0] + al[1] * w[1]) / al[2];
    return d;
  };

  auto stepped_field = [&](const Vec2& w) {
    std::vector<Vec3> rhs = base_rhs;
    const Vec3 dend = end_increment(w);
    rhs[m - 1] += theta[m - 1] * dend;
    const std::vector<Vec3> delta = solver.solve(std::move(rhs));
    HeightField hn = h;
    for (int i = 0; i < 3; ++i) {
      for (int j = 1; j <= m; ++j) hn[i][j] += delta[j - 1][i];
      hn[i][n - 1] += dend[i];
    }
    return hn;
  };

  auto residual = [&](const Vec2& w) {
    return detail::herring_vector(reconstruct(fr, stepped_field(w)),
                                  phi_polar);
  };

  Vec2 w = Vec2::Zero();
  Vec2 R = residual(w);
  bool converged = R.norm() <= opts.newton_tol;
  for (int it = 0; it < opts.max_newton_iters && !converged; ++it) {
    const double eps = 1e-7 * (1.0 + w.cwiseAbs().maxCoeff());
    Mat2 Jac;
    for (int k = 0; k < 2; ++k) {
      Vec2 wp = w;
      wp[k] += eps;
      Jac.col(k) = (residual(wp) - R) / eps;
    }
    if (std::abs(Jac.determinant()) < 1e-300)
      throw JunctionNewtonDivergence("junction Jacobian is singular");
    w -= Jac.partialPivLu().solve(R);
    R = residual(w);
    converged = R.norm() <= opts.newton_tol;
  }
  if (!converged)
    throw JunctionNewtonDivergence(
        "junction force balance did not converge within the step");

  const HeightField h_new = stepped_field(w);
  const Network net_new = reconstruct(fr, h_new);
  const double e_new = discrete_energy(net_new, phi_polar);
  if (e_new > e_old + slack)
    throw StepRejected("step raised the discrete energy beyond tolerance");

  FlowState out;
  out.t = state.t + dt;
  out.network = net_new;
  out.frame = fr;
  out.h = h_new;
  return out;
}

/// One semi-implicit step of the parametric flow u_t = Q(nu) u_xx / |u_x|^2
/// (normal speed Q kappa plus the tangential motion that keeps the special
/// parametrization).  The scalar coefficient is frozen at the current state,
/// the fixed ends stay pinned, and the shared junction position is the
/// Newton unknown closing the force balance.
inline FlowState special_flow_step(const FlowState& state, double dt,
                                   const Anisotropy& phi_polar,
                                   const StepOptions& opts = {}) {
  if (!(dt > 0.0)) throw DegenerateInput("time step must be positive");
  const Network& net = state.network;
  const int n = net.curves[0].size();
  for (const auto& c : net.curves)
    if (c.size() != n)
      throw DegenerateCurve("curves must share one parameter grid");
  const double dx = 1.0 / (n - 1);
  const double e_old = discrete_energy(net, phi_polar);
  const double slack = detail::default_slack(e_old, opts.dissipation_slack);

  // Frozen diffusion coefficients c_j = Q_j / |gamma'_j|^2 and factorized
  // tridiagonal operators, one per curve (shared by both components).
  const int m = n - 2;
  std::array<detail::ScalarThomas, 3> solver;
  std::array<std::vector<double>, 3> coeff;
  for (int i = 0; i < 3; ++i) {
    const auto& c = net.curves[i];
    const auto g1 = detail::d1(c.points, dx);
    coeff[i].resize(n);
    for (int j = 0; j < n; ++j) {
      const double J = g1[j].norm();
      if (J <= 1e-12) throw DegenerateCurve("vanishing parameter derivative");
      const Vec2 tau = g1[j] / J;
      const Vec2 nu = perp(tau);
      coeff[i][j] =
          phi_polar.eval(nu) * tau.dot(phi_polar.hess(nu) * tau) / (J * J);
    }
    std::vector<double> a(m), b(m), cc(m);
    for (int j = 1; j <= m; ++j) {
      const double lam = dt * coeff[i][j] / (dx * dx);
      a[j - 1] = -lam;
      cc[j - 1] = -lam;
      b[j - 1] = 1.0 + 2.0 * lam;
    }
    solver[i].factor(a, b, cc);
  }

  auto stepped_network = [&](const Vec2& sigma) {
    Network out = net;
    out.junction = sigma;
    for (int i = 0; i < 3; ++i) {
      const auto& c = net.curves[i];
      for (int comp = 0; comp < 2; ++comp) {
        std::vector<double> rhs(m);
        for (int j = 1; j <= m; ++j) rhs[j - 1] = c.points[j][comp];
        rhs[0] += dt * coeff[i][1] / (dx * dx) * c.points[0][comp];
        rhs[m - 1] += dt * coeff[i][m] / (dx * dx) * sigma[comp];
        const std::vector<double> x = solver[i].solve(std::move(rhs));
        for (int j = 1; j <= m; ++j) out.curves[i].points[j][comp] = x[j - 1];
      }
      out.curves[i].points[n - 1] = sigma;
    }
    return out;
  };

  // Newton in the junction increment (translation invariant by design).
  Vec2 v = Vec2::Zero();
  const Vec2 sigma0 = net.junction;
  auto residual = [&](const Vec2& vv) {
    return detail::herring_vector(stepped_network(sigma0 + vv), phi_polar);
  };
  Vec2 R = residual(v);
  bool converged = R.norm() <= opts.newton_tol;
  for (int it = 0; it < opts.max_newton_iters && !converged; ++it) {
    const double eps = 1e-7 * (1.0 + v.cwiseAbs().maxCoeff());
    Mat2 Jac;
    for (int k = 0; k < 2; ++k) {
      Vec2 vp = v;
      vp[k] += eps;
      Jac.col(k) = (residual(vp) - R) / eps;
    }
    if (std::abs(Jac.determinant()) < 1e-300)
      throw JunctionNewtonDivergence("junction Jacobian is singular");
    v -= Jac.partialPivLu().solve(R);
    R = residual(v);
    converged = R.norm() <= opts.newton_tol;
  }
  if (!converged)
    throw JunctionNewtonDivergence(
        "junction force balance did not converge within the step");

  Network net_new = stepped_network(sigma0 + v);
  const double e_new = discrete_energy(net_new, phi_polar);
  if (e_new > e_old + slack)
    throw StepRejected("step raised the discrete energy beyond tolerance");

  FlowState out;
  out.t = state.t + dt;
  out.network = std::move(net_new);
  out.frame = state.frame;
  out.h.reset();
  return out;
}

/// Random initial height fields for flow experiments.  Sine modes (amplitude
/// decaying like 1/k^2) are blended with polynomial correctors so that, on
/// the discrete grid and with the discrete one-sided stencils, the field has
/// exact zeros at the fixed ends, an exactly balanced junction (optionally
/// displaced by a smooth junction mode), zero end slope contribution to the
/// force balance, zero second derivative at x = 0, and a vanishing
/// junction-velocity sum.  All residuals reported by check_h_compatibility
/// are then at rounding/truncation level.
inline HeightField perturb_heights(const ReferenceFrame& fr,
                                   const Anisotropy& phi_polar,
                                   std::mt19937_64& rng, double amplitude,
                                   int modes, double junction_amplitude) {
  if (amplitude < 0.0 || junction_amplitude < 0.0)
    throw DegenerateInput("perturbation amplitudes must be non-negative");
  if (modes < 0) throw DegenerateInput("mode count must be non-negative");
  const int n = fr.N;
  const double dx = 1.0 / (n - 1);
  HeightField h = HeightField::zero(n);

  auto grid_x = [&](int j) { return static_cast<double>(j) / (n - 1); };

  // Corrected sine modes: value/slope zero at x = 1, curvature zero at x = 0.
  for (int k = 1; k <= modes; ++k) {
    std::array<double, 3> amp{};
    for (int i = 0; i < 3; ++i)
      amp[i] = amplitude * uniform(rng, -1.0, 1.0) / (k * k);
    const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < n; ++j) {
        const double x = grid_x(j);
        const double p4 = x * x * x * (x - 1.0);
        h[i][j] += amp[i] * (std::sin(k * M_PI * x) - k * M_PI * sgn * p4);
      }
  }

  // Smooth junction displacement: h_i gains (delta . nu*_i) j(x) with the
  // quintic step j (value 1 and flat to second order at x = 1, flat at 0).
  const double psi = uniform(rng, 0.0, 2.0 * M_PI);
  if (junction_amplitude > 0.0) {
    const Vec2 delta =
        junction_amplitude * Vec2(std::cos(psi), std::sin(psi));
    for (int i = 0; i < 3; ++i) {
      const double a = delta.dot(fr.nu_star[i]);
      for (int j = 0; j < n; ++j) {
        const double x = grid_x(j);
        const double jm =
            x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
        h[i][j] += a * jm;
      }
    }
  }

  // Discrete correctors.  e1 has unit end slope (and zero end value and end
  // curvature), e2 has unit curvature at x = 0 (zero end data), e3 has unit
  // curvature at x = 1.  The pair (e1, e2) is used to cancel the discrete
  // end-slope and x=0-curvature functionals exactly; e3, pre-orthogonalized
  // against both, adjusts the junction-velocity sum without disturbing them.
  std::vector<double> e1(n), e2(n), e3(n);
  for (int j = 0; j < n; ++j) {
    const double x = grid_x(j);
    const double p4 = x * x * x * (x - 1.0);
    const double p5 = x * x * x * (x - 1.0) * (x - 1.0);
    e1[j] = p4 - 3.0 * p5;
    e2[j] = x * x * (1.0 - x) * (1.0 - x) * (1.0 - x);
    e3[j] = 0.5 * p5;
  }
  auto end_slope = [&](const std::vector<double>& f) {
    return (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * dx);
  };
  auto zero_curv = [&](const std::vector<double>& f) {
    return (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / (dx * dx);
  };
  Mat2 M2;
  M2 << end_slope(e1), end_slope(e2), zero_curv(e1), zero_curv(e2);
  const auto correct = [&](std::vector<double>& f) {
    const Vec2 beta = M2.partialPivLu().solve(Vec2(end_slope(f), zero_curv(f)));
    for (int j = 0; j < n; ++j) f[j] -= beta[0] * e1[j] + beta[1] * e2[j];
  };
  for (int i = 0; i < 3; ++i) correct(h.comp[i]);

  // Velocity-sum corrector along e3 (orthogonalized), secant iteration.
  std::vector<double> e3v = e3;
  {
    const Vec2 cc =
        M2.partialPivLu().solve(Vec2(end_slope(e3), zero_curv(e3)));
    for (int j = 0; j < n; ++j) e3v[j] -= cc[0] * e1[j] + cc[1] * e2[j];
  }
  auto vsum_at = [&](double t) {
    HeightField ht = h;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < n; ++j) ht[i][j] += t * e3v[j];
    return detail::junction_velocity_sum(fr, ht, phi_polar);
  };
  double t0 = 0.0, s0 = vsum_at(0.0);
  if (std::abs(s0) > 1e-15) {
    double t1 = 0.01 * (1.0 + amplitude), s1 = vsum_at(t1);
    for (int it = 0; it < 60 && std::abs(s1) > 1e-13 * (1.0 + std::abs(s0));
         ++it) {
      if (std::abs(s1 - s0) < 1e-300) break;
      const double t2 = t1 - s1 * (t1 - t0) / (s1 - s0);
      t0 = t1;
      s0 = s1;
      t1 = t2;
      s1 = vsum_at(t1);
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < n; ++j) h[i][j] += t1 * e3v[j];
  }
  return h;
}

/// One recorded instant of a run.
struct TrajectorySample {
  double t = 0.0;
  double energy = 0.0;
  double grad_norm = 0.0;
  Vec2 junction = Vec2::Zero();
  double max_kappa_phi = 0.0;
  double h_c0 = 0.0, h_c1 = 0.0, h_c2 = 0.0;  // zero in parametric mode
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::vector<FlowState> snapshots;
  double e_star = 0.0;          // energy of the straight reference network
  bool reached_stationary = false;
};

struct RunOptions {
  int snapshot_stride = 0;          // 0: keep only initial and final states
  double stationarity_factor = 1e-9;  // floor on the gradient norm
  double collapse_floor = -1.0;     // negative: 1e-4 * initial min length
  long max_steps = 2000000;
  StepOptions step;
};

namespace detail {

inline double polygonal_length(const DiscreteCurve& c) {
  double len = 0.0;
  for (std::size_t j = 0; j + 1 < c.points.size(); ++j)
    len += (c.points[j + 1] - c.points[j]).norm();
  return len;
}

inline double min_polygonal_length(const Network& net) {
  double len = 1e300;
  for (const auto& c : net.curves)
    len = std::min(len, polygonal_length(c));
  return len;
}

inline TrajectorySample sample_state(const FlowState& s,
                                     const Anisotropy& phi_polar) {
  TrajectorySample out;
  out.t = s.t;
  out.energy = discrete_energy(s.network, phi_polar);
  const ReferenceFrame& fr = *s.frame;
  const GradientElement g =
      s.h ? gradient_M(fr, *s.h, phi_polar)
          : gradient_M_network(fr, s.network, phi_polar);
  out.grad_norm = w_norm(g, fr);
  out.junction = s.network.junction;
  out.max_kappa_phi = max_kappa_phi(s.network, phi_polar);
  if (s.h) {
    const CkNorms nn = height_norms(*s.h);
    out.h_c0 = nn.c0;
    out.h_c1 = nn.c1;
    out.h_c2 = nn.c2;
  }
  return out;
}

}  // namespace detail

/// Drive the flow from `initial` until t_end, the stationarity floor, a
/// collapse, or the step budget.  Rejected steps are retried with a halved
/// step (up to ten times); the base step is restored afterwards.  Samples
/// are recorded at t = 0 and after every accepted step; snapshots keep the
/// initial state, every stride-th state, and the final state.
inline Trajectory run_flow(const FlowState& initial, double t_end, double dt,
                           FlowMode mode, const Anisotropy& phi_polar,
                           const RunOptions& opts = {}) {
  if (!(dt > 0.0)) throw DegenerateInput("time step must be positive");
  if (!(t_end >= initial.t)) throw DegenerateInput("t_end precedes the state");
  if (!initial.frame)
    throw DegenerateInput("flow runs require a reference frame");
  if (mode == FlowMode::Graph && !initial.h)
    throw DegenerateInput("graph runs require a height field");

  const ReferenceFrame& fr = *initial.frame;
  Trajectory tr;
  tr.e_star =
      discrete_energy(reconstruct(fr, HeightField::zero(fr.N)), phi_polar);
  const double grad_floor = opts.stationarity_factor * (1.0 + tr.e_star);

  FlowState state = initial;
  if (mode == FlowMode::Parametric) state.h.reset();

  const double floor =
      opts.collapse_floor >= 0.0
          ? opts.collapse_floor
          : 1e-4 * detail::min_polygonal_length(state.network);

  tr.samples.push_back(detail::sample_state(state, phi_polar));
  tr.snapshots.push_back(state);
  const double e0 = tr.samples.front().energy;
  StepOptions sopts = opts.step;
  if (sopts.dissipation_slack < 0.0) sopts.dissipation_slack = 1e-10 * e0;

  if (detail::min_polygonal_length(state.network) < floor)
    throw CollapseDetected("a curve is below the collapse floor");
  if (tr.samples.front().grad_norm < grad_floor) {
    tr.reached_stationary = true;
    return tr;
  }

  long steps = 0;
  const double t_eps = 1e-12 * (1.0 + std::abs(t_end));
  while (state.t < t_end - t_eps) {
    if (steps >= opts.max_steps)
      throw MaxStepsExceeded("step budget exhausted before t_end");
    double dt_try = std::min(dt, t_end - state.t);
    FlowState next;
    for (int attempt = 0;; ++attempt) {
      try {
        next = (mode == FlowMode::Graph)
                   ? h_flow_step(state, dt_try, phi_polar, sopts)
                   : special_flow_step(state, dt_try, phi_polar, sopts);
        break;
      } catch (const StepRejected&) {
        if (attempt >= 10) throw;
        dt_try *= 0.5;
      }
    }
    state = std::move(next);
    ++steps;
    tr.samples.push_back(detail::sample_state(state, phi_polar));
    if (opts.snapshot_stride > 0 && steps % opts.snapshot_stride == 0)
      tr.snapshots.push_back(state);
    if (detail::min_polygonal_length(state.network) < floor)
      throw CollapseDetected("a curve shrank below the collapse floor");
    if (tr.samples.back().grad_norm < grad_floor) {
      tr.reached_stationary = true;
      break;
    }
  }
  if (tr.snapshots.back().t != state.t) tr.snapshots.push_back(state);
  return tr;
}

}  // namespace trinet
