#pragma once

// Post-hoc analysis of flow trajectories:
//
//   * fit_lsi       — least-squares exponent fit of the gradient-energy
//                     inequality  |E - E*|^{1-theta} <= C ||grad||_W, with
//                     the constant chosen as the max-ratio envelope so the
//                     inequality holds at every fitted sample by construction;
//   * convergence_report — stationarity summary (energy gap, curvature,
//                     Cauchy decay of the height field towards its limit);
//   * assemble_linearized / lopatinskii_shapiro_check — coefficients of the
//                     flow linearized at the straight network, and the
//                     complex junction determinant certifying that the
//                     boundary conditions admit no decaying kernel;
//   * smoothing_probe — grid proxy for instant regularization (third
//                     divided differences stay bounded by the initial C^2
//                     size away from t = 0).

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "trinet/flow.hpp"

namespace trinet {

struct LsiFit {
  double theta = 0.0;    // fitted exponent in (0, 1/2]
  double C_lsi = 0.0;    // max-ratio envelope constant
  double t_start = 0.0;  // fitted window
  double t_end = 0.0;
  double residual = 0.0; // R^2 of the log-log regression
  int n_samples = 0;
};

/// Fit the gradient inequality on the largest initial stretch of the
/// trajectory along which the energy strictly decreases and stays above the
/// logarithm floor 1e-13 * (1 + E*).  Throws EnergyAtMinimum when the floor
/// cuts the window below 20 samples, InsufficientData when the trajectory
/// itself is too short.
inline LsiFit fit_lsi(const Trajectory& traj) {
  const double floor = 1e-13 * (1.0 + std::abs(traj.e_star));
  std::vector<double> lx, ly, ts;
  bool hit_floor = false;
  double prev_energy = 0.0;
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    const auto& s = traj.samples[k];
    const double gap = s.energy - traj.e_star;
    if (gap <= floor) {
      hit_floor = true;
      break;
    }
    if (k > 0 && s.energy >= prev_energy) break;
    if (s.grad_norm <= 0.0) break;
    prev_energy = s.energy;
    lx.push_back(std::log(gap));
    ly.push_back(std::log(s.grad_norm));
    ts.push_back(s.t);
  }
  const int n = static_cast<int>(lx.size());
  if (n < 20) {
    if (hit_floor)
      throw EnergyAtMinimum("energy gap at the log floor before 20 samples");
    throw InsufficientData("fewer than 20 usable trajectory samples");
  }

  double mx = 0.0, my = 0.0;
  for (int k = 0; k < n; ++k) {
    mx += lx[k];
    my += ly[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int k = 0; k < n; ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
    syy += (ly[k] - my) * (ly[k] - my);
  }
  if (sxx <= 0.0)
    throw InsufficientData("energy gap does not vary over the window");
  const double slope = sxy / sxx;

  LsiFit fit;
  fit.theta = std::min(0.5, std::max(1e-6, 1.0 - slope));
  fit.t_start = ts.front();
  fit.t_end = ts.back();
  fit.n_samples = n;
  double cmax = 0.0;
  for (int k = 0; k < n; ++k)
    cmax = std::max(cmax, std::exp((1.0 - fit.theta) * lx[k] - ly[k]));
  fit.C_lsi = cmax;
  double ss_res = 0.0;
  for (int k = 0; k < n; ++k) {
    const double pred = my + slope * (lx[k] - mx);
    ss_res += (ly[k] - pred) * (ly[k] - pred);
  }
  fit.residual = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

/// Summary of a run that reached the stationarity floor.
struct ConvergenceReport {
  double grad_norm = 0.0;      // final gradient norm
  double energy_gap = 0.0;     // |E_final - E*|
  double max_kappa_phi = 0.0;  // final weighted curvature
  double max_kappa = 0.0;      // final unweighted curvature (straightness)
  // Discrete C^k distances of each snapshot's height field to the final one
  // (empty for parametric runs).
  std::vector<double> c0_dist, c1_dist, c2_dist;
};

inline ConvergenceReport convergence_report(const Trajectory& traj,
                                            const ReferenceFrame& fr,
                                            const Anisotropy& phi_polar) {
  (void)fr;
  if (!traj.reached_stationary)
    throw NotConverged("trajectory did not reach the stationarity floor");
  ConvergenceReport rep;
  const TrajectorySample& last = traj.samples.back();
  rep.grad_norm = last.grad_norm;
  rep.energy_gap = std::abs(last.energy - traj.e_star);
  rep.max_kappa_phi = last.max_kappa_phi;
  const FlowState& fin = traj.snapshots.back();
  for (const auto& c : fin.network.curves)
    rep.max_kappa = std::max(rep.max_kappa, sup_norm(curvature(c)));
  (void)phi_polar;

  if (fin.h) {
    const HeightField& hinf = *fin.h;
    for (const FlowState& s : traj.snapshots) {
      if (!s.h) continue;
      HeightField diff = *s.h;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < diff.size(); ++j) diff[i][j] -= hinf[i][j];
      const CkNorms nn = height_norms(diff);
      rep.c0_dist.push_back(nn.c0);
      rep.c1_dist.push_back(nn.c1);
      rep.c2_dist.push_back(nn.c2);
    }
  }
  return rep;
}

/// Coefficients of the flow linearized at the zero height field:
/// per-curve diffusion rates, the (vanishing, since the reference curves are
/// affine) first-order coefficients, and the junction slope-coupling ratios.
struct LinearizedSystem {
  std::array<double, 3> d{};                 // diffusion coefficients, > 0
  std::array<std::vector<double>, 3> lot;    // coefficient of h_x per node
  double r1 = 0.0;                           // slope ratios at the junction,
  double r2 = 0.0;                           // both negative
};

inline LinearizedSystem assemble_linearized(const ReferenceFrame& fr,
                                            const Anisotropy& phi_polar) {
  LinearizedSystem ls;
  std::array<double, 3> Dw{};
  for (int i = 0; i < 3; ++i) {
    Dw[i] = fr.tau_star[i].dot(phi_polar.hess(fr.nu_star[i]) * fr.tau_star[i]);
    ls.d[i] = phi_polar.eval(fr.nu_star[i]) * Dw[i] /
              (fr.lengths[i] * fr.lengths[i]);
    if (!(ls.d[i] > 0.0))
      throw NotElliptic("diffusion coefficient lost positivity");
    // First-order coefficient -phi(nu*) Dw <gamma*'' / |gamma*'|^3, tau*>.
    const auto g2 =
        detail::d2(fr.gamma_star[i].points, fr.gamma_star[i].dx());
    ls.lot[i].resize(fr.N);
    const double L3 = std::pow(fr.lengths[i], 3);
    for (int j = 0; j < fr.N; ++j)
      ls.lot[i][j] = -phi_polar.eval(fr.nu_star[i]) * Dw[i] *
                     g2[j].dot(fr.tau_star[i]) / L3;
  }
  const double den1 = Dw[1] * fr.tau_star[1].dot(fr.nu_star[0]);
  const double den2 = Dw[0] * fr.tau_star[0].dot(fr.nu_star[1]);
  if (std::abs(den1) <= 1e-12 || std::abs(den2) <= 1e-12)
    throw DegenerateAngles("junction slope coupling degenerates");
  ls.r1 = Dw[2] * fr.tau_star[2].dot(fr.nu_star[0]) / den1;
  ls.r2 = Dw[2] * fr.tau_star[2].dot(fr.nu_star[1]) / den2;
  if (!(ls.r1 < 0.0) || !(ls.r2 < 0.0))
    throw DegenerateAngles("junction slope ratios lost their sign");
  return ls;
}

/// One probe of the junction determinant.
struct LsSample {
  std::complex<double> lambda;
  double abs_det = 0.0;
};

struct LsReport {
  std::vector<LsSample> rows;
  double min_abs_det = 0.0;
  // The fixed ends impose plain Dirichlet rows (one per curve, decoupled);
  // their determinant is identically one, recorded for completeness.
  double dirichlet_abs_det = 1.0;
};

/// The spectral parameter grid used by default: five moduli per decade
/// around one, nine arguments strictly inside the right half plane.
inline std::vector<std::complex<double>> default_lambda_grid() {
  std::vector<std::complex<double>> grid;
  for (int k = -2; k <= 2; ++k)
    for (int j = 1; j <= 9; ++j) {
      const double psi = -M_PI / 2.0 + M_PI * j / 10.0;
      grid.push_back(std::pow(10.0, k) *
                     std::complex<double>(std::cos(psi), std::sin(psi)));
    }
  return grid;
}

/// Evaluate, for each spectral parameter, the 3x3 complex determinant of the
/// junction boundary rows applied to the decaying ansatz
/// A_i exp(-sqrt(lambda/d_i) y): weighted sum of values, and the two
/// slope-coupling rows.  A determinant bounded away from zero certifies that
/// the linearized junction conditions admit no nontrivial decaying solution.
inline LsReport lopatinskii_shapiro_check(
    const LinearizedSystem& ls, const std::array<double, 3>& alpha_star,
    const std::vector<std::complex<double>>& lambdas) {
  LsReport rep;
  rep.min_abs_det = 1e300;
  for (const auto& lam : lambdas) {
    if (!(lam.real() > 0.0))
      throw InvalidLambda("spectral parameter must have positive real part");
    std::array<std::complex<double>, 3> mu;
    for (int i = 0; i < 3; ++i) {
      mu[i] = std::sqrt(lam / ls.d[i]);
      if (mu[i].real() < 0.0) mu[i] = -mu[i];  // enforce decay at infinity
    }
    Eigen::Matrix3cd M = Eigen::Matrix3cd::Zero();
    M(0, 0) = alpha_star[0];
    M(0, 1) = alpha_star[1];
    M(0, 2) = alpha_star[2];
    M(1, 1) = -mu[1];
    M(1, 2) = -ls.r1 * mu[2];
    M(2, 0) = -mu[0];
    M(2, 2) = -ls.r2 * mu[2];
    LsSample row;
    row.lambda = lam;
    row.abs_det = std::abs(M.determinant());
    rep.min_abs_det = std::min(rep.min_abs_det, row.abs_det);
    rep.rows.push_back(row);
  }
  return rep;
}

/// Grid proxy for parabolic smoothing: the sup of third divided differences
/// over the second half of the run, compared against the initial C^2 size.
struct SmoothingReport {
  double h0_c2 = 0.0;
  double max_c3 = 0.0;
  double ratio = 0.0;        // max_c3 / (1 + h0_c2)
  bool tail_monotone = true; // proxies non-increasing over the window
  std::vector<double> times;
  std::vector<double> c3;
};

inline SmoothingReport smoothing_probe(const Trajectory& traj) {
  std::vector<const FlowState*> graph_snaps;
  for (const auto& s : traj.snapshots)
    if (s.h) graph_snaps.push_back(&s);
  if (graph_snaps.size() < 2)
    throw InsufficientData("smoothing probe needs graph-mode snapshots");

  auto c3_proxy = [](const HeightField& h) {
    const double dx = 1.0 / (h.size() - 1);
    double m = 0.0;
    for (int i = 0; i < 3; ++i)
      m = std::max(m, sup_norm(detail::d1s(detail::d2s(h[i], dx), dx)));
    return m;
  };

  SmoothingReport rep;
  rep.h0_c2 = height_norms(*graph_snaps.front()->h).c2;
  const double T = graph_snaps.back()->t;
  for (const FlowState* s : graph_snaps) {
    if (s->t < 0.5 * T) continue;
    rep.times.push_back(s->t);
    rep.c3.push_back(c3_proxy(*s->h));
  }
  if (rep.c3.size() < 2)
    throw InsufficientData("smoothing window holds fewer than two snapshots");
  rep.max_c3 = *std::max_element(rep.c3.begin(), rep.c3.end());
  rep.ratio = rep.max_c3 / (1.0 + rep.h0_c2);
  for (std::size_t k = 0; k + 1 < rep.c3.size(); ++k)
    if (rep.c3[k + 1] > rep.c3[k] + 1e-12) rep.tail_monotone = false;
  return rep;
}

}  // namespace trinet
