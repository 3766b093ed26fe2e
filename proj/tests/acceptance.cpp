// End-to-end acceptance checks for the triple-junction flow laboratory.
// Each numbered criterion prints exactly one PASS/FAIL line; the process
// exits nonzero if any criterion fails.

#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "helpers.hpp"
#include "trinet/diagnostics.hpp"
#include "trinet/io.hpp"

using namespace trinet;
namespace fs = std::filesystem;

namespace {

struct Check {
  bool ok = true;
  std::ostringstream detail;

  template <typename T>
  Check& operator<<(const T& v) {
    detail << v;
    return *this;
  }
  void require(bool cond, const std::string& why) {
    if (!cond && ok) {
      ok = false;
      detail.str("");
      detail << why;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

Vec2 equilateral_top() { return Vec2(0.5, std::sqrt(3.0) / 2.0); }

// Shared state between dependent criteria.
struct Shared {
  std::vector<std::pair<std::array<Vec2, 3>, Mat2>> triangles;  // criterion 2
  ReferenceFrame iso_fr;                                        // criterion 5
  HeightField iso_h0;
  Trajectory iso_short;  // the 1000-step window
  Trajectory iso_full;   // continued to the stationarity floor
  bool have_run = false;
};

// --------------------------------------------------------------------------
// 1. Anisotropy identities.
Check criterion1() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);

  std::vector<Anisotropy> densities;
  densities.push_back(Anisotropy::euclidean());
  densities.push_back(Anisotropy::quadratic((Mat2() << 4, 0, 0, 1).finished()));
  densities.push_back(
      Anisotropy::quadratic((Mat2() << 2.0, 0.6, 0.6, 1.1).finished()));
  const std::size_t base = densities.size();
  for (std::size_t k = 0; k < base; ++k)
    densities.push_back(densities[k].polar());

  double max_euler = 0.0, max_kernel = 0.0, max_bipolar = 0.0;
  for (const auto& phi : densities) {
    for (int k = 0; k < 200; ++k) {
      Vec2 p;
      do {
        p = Vec2(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)) *
            std::pow(10.0, uniform(rng, -1.0, 1.0));
      } while (p.norm() < 1e-3);
      const double v = phi.eval(p);
      max_euler = std::max(max_euler, std::abs(phi.grad(p).dot(p) - v) / v);
      max_kernel = std::max(max_kernel, (phi.hess(p) * p).norm());
    }
    const Anisotropy bipolar = phi.polar().polar();
    for (int k = 0; k < 64; ++k) {
      const double t = 2.0 * M_PI * k / 64.0;
      const Vec2 d(std::cos(t), std::sin(t));
      max_bipolar =
          std::max(max_bipolar, std::abs(bipolar.eval(d) - phi.eval(d)));
    }
  }
  const double dt = seconds_since(t0);
  c.require(max_euler <= 1e-8, "Euler identity residual " + fmt17(max_euler));
  c.require(max_kernel <= 1e-6, "Hessian kernel residual " + fmt17(max_kernel));
  c.require(max_bipolar <= 1e-6, "bipolar mismatch " + fmt17(max_bipolar));
  c.require(dt < 1.0, "runtime " + fmt17(dt) + " s exceeds 1 s");
  if (c.ok)
    c << "euler " << fmt17(max_euler) << ", kernel " << fmt17(max_kernel)
      << ", bipolar " << fmt17(max_bipolar) << ", " << fmt17(dt) << " s";
  return c;
}

// --------------------------------------------------------------------------
// 2. Minimizer correctness.
Check criterion2(Shared& sh) {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  const Anisotropy iso = Anisotropy::euclidean();

  const Vec2 s0 = minimize(Vec2(0, 0), Vec2(1, 0), equilateral_top(), iso);
  c.require((s0 - Vec2(0.5, std::sqrt(3.0) / 6.0)).norm() < 1e-8,
            "equilateral junction off by " +
                fmt17((s0 - Vec2(0.5, std::sqrt(3.0) / 6.0)).norm()));
  const ReferenceFrame fr0 =
      build_frame(Vec2(0, 0), Vec2(1, 0), equilateral_top(), iso, 32);
  for (int i = 0; i < 3; ++i)
    c.require(std::abs(fr0.junction_data.angles[i] - 2.0 * M_PI / 3.0) < 1e-8,
              "equilateral angle " + std::to_string(i) + " off");

  std::mt19937_64 rng(202);
  double max_herring = 0.0, max_oracle = 0.0;
  while (sh.triangles.size() < 20) {
    const auto P = testutil::random_fat_triangle(rng);
    const Mat2 A = testutil::random_spd(rng);
    try {
      minimize(P[0], P[1], P[2], iso);
      minimize(P[0], P[1], P[2], Anisotropy::quadratic(A).polar());
    } catch (const Error&) {
      continue;
    }
    sh.triangles.push_back({P, A});
  }
  for (const auto& [P, A] : sh.triangles) {
    for (int fam = 0; fam < 2; ++fam) {
      const Anisotropy pol =
          fam == 0 ? iso : Anisotropy::quadratic(A).polar();
      const Vec2 s = minimize(P[0], P[1], P[2], pol);
      const ReferenceFrame fr = build_frame(P[0], P[1], P[2], pol, 16);
      max_herring = std::max(
          max_herring,
          herring_residual(reconstruct(fr, HeightField::zero(fr.N)), pol));
      max_oracle =
          std::max(max_oracle, (s - testutil::grid_search_min(P, pol)).norm());
    }
  }
  const double dt = seconds_since(t0);
  c.require(max_herring < 1e-8, "junction balance " + fmt17(max_herring));
  c.require(max_oracle < 1e-6, "grid-oracle gap " + fmt17(max_oracle));
  c.require(dt < 10.0, "runtime " + fmt17(dt) + " s exceeds 10 s");
  if (c.ok)
    c << "20 triangles x 2 densities, balance " << fmt17(max_herring)
      << ", oracle gap " << fmt17(max_oracle) << ", " << fmt17(dt) << " s";
  return c;
}

// --------------------------------------------------------------------------
// 3. Matrix facts: coupling matrix rank and junction matrix positivity.
Check criterion3() {
  Check c;
  std::mt19937_64 rng(303);
  const Anisotropy iso = Anisotropy::euclidean();
  double max_det_I = 0.0, min_response = 1e300, min_det_F = 1e300;
  for (int trial = 0; trial < 50; ++trial) {
    const Anisotropy pol =
        (trial % 2 == 0)
            ? iso
            : Anisotropy::quadratic(testutil::random_spd(rng)).polar();
    const ReferenceFrame fr = testutil::random_frame(rng, pol, 16);
    max_det_I = std::max(max_det_I, std::abs(fr.I_matrix.determinant()));
    const auto& al = fr.junction_data.weights;
    const Vec3 v(0.0, -1.0 / al[1], 1.0 / al[2]);
    const Vec3 w(-1.0 / al[0], 0.0, 1.0 / al[2]);
    min_response = std::min({min_response, (fr.I_matrix * v).norm(),
                             (fr.I_matrix * w).norm()});
    min_det_F = std::min(min_det_F, boundary_matrix_F(fr, pol).second);
  }
  c.require(max_det_I <= 1e-12, "coupling det " + fmt17(max_det_I));
  c.require(min_response > 1e-8,
            "coupling response " + fmt17(min_response) + " vanishes");
  c.require(min_det_F > 0.0, "junction matrix det " + fmt17(min_det_F));

  const ReferenceFrame fr0 =
      build_frame(Vec2(0, 0), Vec2(1, 0), equilateral_top(), iso, 16);
  const auto [F, detF] = boundary_matrix_F(fr0, iso);
  Mat2 expected;
  expected << 2, 1, 1, 2;
  c.require((F - expected).cwiseAbs().maxCoeff() < 1e-12,
            "symmetric junction matrix off by " +
                fmt17((F - expected).cwiseAbs().maxCoeff()));
  c.require(std::abs(detF - 3.0) < 1e-12,
            "symmetric junction det " + fmt17(detF));
  if (c.ok)
    c << "50 frames: |det I| <= " << fmt17(max_det_I) << ", det F >= "
      << fmt17(min_det_F) << ", symmetric case exact";
  return c;
}

// --------------------------------------------------------------------------
// 4. Variational consistency.
Check criterion4() {
  Check c;
  std::mt19937_64 rng(404);
  const Anisotropy iso = Anisotropy::euclidean();
  const Anisotropy quad =
      Anisotropy::quadratic((Mat2() << 3.0, 0.5, 0.5, 1.2).finished()).polar();

  double max_pair_err = 0.0, max_zero = 0.0, max_sym = 0.0, max_fd2 = 0.0;
  double min_quadratic_form = 1e300;
  for (int fam = 0; fam < 2; ++fam) {
    const Anisotropy& pp = fam == 0 ? iso : quad;
    const ReferenceFrame fr = testutil::random_frame(rng, pp, 128);
    const double amp = 0.01 * fr.min_length();

    // Gradient pairing against a central difference of the energy.
    const HeightField h0 = testutil::random_admissible_field(fr, rng, amp);
    const GradientElement g = gradient_M(fr, h0, pp);
    for (int k = 0; k < 10; ++k) {
      const HeightField h1 =
          testutil::random_admissible_field(fr, rng, 5.0 * amp);
      const double pair = duality_pairing(g, h1);
      const double eps = 1e-5;
      HeightField hp = h0, hm = h0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < fr.N; ++j) {
          hp[i][j] += eps * h1[i][j];
          hm[i][j] -= eps * h1[i][j];
        }
      const double fd =
          (energy_of_h(fr, hp, pp) - energy_of_h(fr, hm, pp)) / (2.0 * eps);
      max_pair_err = std::max(
          max_pair_err, std::abs(pair - fd) / std::max(std::abs(fd), 1e-10));
    }

    max_zero = std::max(
        max_zero, w_norm(gradient_M(fr, HeightField::zero(fr.N), pp), fr));

    for (int k = 0; k < 10; ++k) {
      const HeightField ha = testutil::random_admissible_field(fr, rng, amp);
      const HeightField hb = testutil::random_admissible_field(fr, rng, amp);
      const double sab = second_variation(fr, ha, hb, pp);
      const double sba = second_variation(fr, hb, ha, pp);
      max_sym = std::max(max_sym,
                         std::abs(sab - sba) / (1.0 + std::abs(sab)));
    }

    const HeightField h = testutil::random_admissible_field(fr, rng, amp);
    const double sv = second_variation(fr, h, h, pp);
    const double e0 = energy_of_h(fr, HeightField::zero(fr.N), pp);
    const double eps = 1e-3;
    HeightField hp = HeightField::zero(fr.N), hm = HeightField::zero(fr.N);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < fr.N; ++j) {
        hp[i][j] = eps * h[i][j];
        hm[i][j] = -eps * h[i][j];
      }
    const double fd2 =
        (energy_of_h(fr, hp, pp) - 2.0 * e0 + energy_of_h(fr, hm, pp)) /
        (eps * eps);
    max_fd2 = std::max(max_fd2,
                       std::abs(fd2 - sv) / std::max(std::abs(sv), 1e-10));

    for (int k = 0; k < 25; ++k) {
      const HeightField hq = testutil::random_admissible_field(fr, rng, amp);
      min_quadratic_form =
          std::min(min_quadratic_form, second_variation(fr, hq, hq, pp));
    }
  }
  c.require(max_pair_err <= 1e-4, "pairing FD error " + fmt17(max_pair_err));
  c.require(max_zero <= 1e-10, "gradient at zero " + fmt17(max_zero));
  c.require(max_sym <= 1e-10, "asymmetry " + fmt17(max_sym));
  c.require(max_fd2 <= 1e-4, "second-variation FD error " + fmt17(max_fd2));
  c.require(min_quadratic_form > 0.0,
            "quadratic form " + fmt17(min_quadratic_form) + " not positive");
  if (c.ok)
    c << "pairing " << fmt17(max_pair_err) << ", grad(0) " << fmt17(max_zero)
      << ", symmetry " << fmt17(max_sym) << ", FD " << fmt17(max_fd2)
      << ", E''(0)hh >= " << fmt17(min_quadratic_form);
  return c;
}

// --------------------------------------------------------------------------
// 5. Flow dissipation and constraints over the 1000-step window.
Check criterion5(Shared& sh) {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();
  const Anisotropy iso = Anisotropy::euclidean();
  sh.iso_fr = build_frame(Vec2(0, 0), Vec2(1, 0), equilateral_top(), iso, 128);
  std::mt19937_64 rng(2025);
  const double amp = 0.02 * sh.iso_fr.min_length();
  sh.iso_h0 = perturb_heights(sh.iso_fr, iso, rng, amp, 2, 0.5 * amp);

  RunOptions ro;
  ro.snapshot_stride = 1;
  sh.iso_short = run_flow(make_graph_state(sh.iso_fr, sh.iso_h0), 0.2, 2e-4,
                          FlowMode::Graph, iso, ro);
  sh.have_run = true;

  const auto& samples = sh.iso_short.samples;
  c.require(samples.size() >= 1001,
            "only " + std::to_string(samples.size() - 1) + " steps accepted");
  const double e0 = samples.front().energy;
  double max_uptick = 0.0, max_conc = 0.0, max_herring = 0.0;
  for (std::size_t k = 1; k < samples.size(); ++k)
    max_uptick =
        std::max(max_uptick, samples[k].energy - samples[k - 1].energy);
  for (const auto& snap : sh.iso_short.snapshots) {
    max_conc = std::max(max_conc, network_residuals(snap.network).concurrency);
    max_herring = std::max(max_herring, herring_residual(snap.network, iso));
  }
  const double dt = seconds_since(t0);
  c.require(max_uptick <= 1e-13 * (1.0 + e0),
            "energy rose by " + fmt17(max_uptick));
  c.require(max_conc <= 1e-10, "concurrency " + fmt17(max_conc));
  c.require(max_herring <= 1e-8, "junction balance " + fmt17(max_herring));
  c.require(dt < 60.0, "runtime " + fmt17(dt) + " s exceeds 60 s");
  if (c.ok)
    c << samples.size() - 1 << " steps, max energy increment "
      << fmt17(max_uptick) << ", concurrency " << fmt17(max_conc)
      << ", balance " << fmt17(max_herring) << ", " << fmt17(dt) << " s";
  return c;
}

// Stationarity run + C^2 Cauchy tail for one density.
Check stability_run(const Anisotropy& pp, const std::string& label,
                    double t_end, int stride, Trajectory* keep) {
  Check c;
  const ReferenceFrame fr =
      build_frame(Vec2(0, 0), Vec2(1, 0), equilateral_top(), pp, 128);
  std::mt19937_64 rng(2025);
  const double amp = 0.02 * fr.min_length();
  const HeightField h0 = perturb_heights(fr, pp, rng, amp, 2, 0.5 * amp);

  RunOptions ro;
  ro.snapshot_stride = stride;
  const Trajectory traj =
      run_flow(make_graph_state(fr, h0), t_end, 2e-4, FlowMode::Graph, pp, ro);
  if (keep) *keep = traj;

  const auto& last = traj.samples.back();
  c.require(traj.reached_stationary,
            label + ": stationarity floor not reached by t = " +
                fmt17(last.t));
  c.require(last.grad_norm < 1e-8,
            label + ": final gradient " + fmt17(last.grad_norm));
  c.require(std::abs(last.energy - traj.e_star) < 1e-7,
            label + ": energy gap " + fmt17(std::abs(last.energy - traj.e_star)));
  c.require(last.max_kappa_phi < 1e-5,
            label + ": final curvature " + fmt17(last.max_kappa_phi));

  // Discrete C^2 Cauchy property: distance to the final state contracts by
  // more than half whenever t doubles (checked over the tail).
  const HeightField& hinf = *traj.snapshots.back().h;
  std::vector<std::pair<double, double>> dist;  // (t, c2 distance)
  for (const auto& snap : traj.snapshots) {
    if (!snap.h || snap.t <= 0.0) continue;
    HeightField d = *snap.h;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < fr.N; ++j) d[i][j] -= hinf[i][j];
    dist.push_back({snap.t, height_norms(d).c2});
  }
  const double t_max = dist.empty() ? 0.0 : dist.back().first;
  int pairs = 0;
  double worst_ratio = 0.0;
  for (const auto& [t, c2v] : dist) {
    if (t < t_max / 8.0 || c2v <= 1e-11) continue;
    for (const auto& [t2, c2v2] : dist) {
      if (std::abs(t2 - 2.0 * t) <= 1e-9 * (1.0 + t2)) {
        ++pairs;
        worst_ratio = std::max(worst_ratio, c2v2 / c2v);
      }
    }
  }
  c.require(pairs >= 2, label + ": only " + std::to_string(pairs) +
                            " doubling pairs available");
  c.require(worst_ratio < 0.5,
            label + ": doubling ratio " + fmt17(worst_ratio));
  if (c.ok)
    c << label << " stationary at t = " << fmt17(last.t) << ", gap "
      << fmt17(std::abs(last.energy - traj.e_star)) << ", curvature "
      << fmt17(last.max_kappa_phi) << ", " << pairs
      << " doubling pairs, worst ratio " << fmt17(worst_ratio);
  return c;
}

// --------------------------------------------------------------------------
// 6. Stability: convergence to the minimizer for both densities.
Check criterion6(Shared& sh) {
  Check c;
  if (!sh.have_run) {
    c.require(false, "prerequisite run of criterion 5 missing");
    return c;
  }
  const Check iso_check = stability_run(Anisotropy::euclidean(), "isotropic",
                                        8.0, 250, &sh.iso_full);
  const Anisotropy quad =
      Anisotropy::quadratic((Mat2() << 4, 0, 0, 1).finished()).polar();
  const Check quad_check = stability_run(quad, "diag(4,1)-dual", 40.0, 1000,
                                         nullptr);
  c.require(iso_check.ok, iso_check.detail.str());
  c.require(quad_check.ok, quad_check.detail.str());
  if (c.ok) c << iso_check.detail.str() << "; " << quad_check.detail.str();
  return c;
}

// --------------------------------------------------------------------------
// 7. Solver equivalence under refinement.
Check criterion7() {
  Check c;
  const Anisotropy iso = Anisotropy::euclidean();
  const std::array<std::pair<int, double>, 3> levels = {
      {{64, 4e-4}, {128, 2e-4}, {256, 1e-4}}};
  std::vector<double> dists, bounds;
  for (const auto& [n, dt] : levels) {
    const ReferenceFrame fr =
        build_frame(Vec2(0, 0), Vec2(1, 0), equilateral_top(), iso, n);
    std::mt19937_64 rng(4242);
    const double amp = 0.02 * fr.min_length();
    const HeightField h0 = perturb_heights(fr, iso, rng, amp, 2, 0.5 * amp);

    const Trajectory g = run_flow(make_graph_state(fr, h0), 0.01, dt,
                                  FlowMode::Graph, iso, {});
    const Trajectory p =
        run_flow(make_parametric_state(fr, reconstruct(fr, h0)), 0.01, dt,
                 FlowMode::Parametric, iso, {});
    const Network& ng = g.snapshots.back().network;
    const Network& np = p.snapshots.back().network;
    dists.push_back(symmetric_hausdorff(ng, np));
    bounds.push_back(5.0 * (dt + 1.0 / (static_cast<double>(n) * n)) *
                     network_diameter(ng));
  }
  for (std::size_t k = 0; k < dists.size(); ++k)
    c.require(dists[k] < bounds[k],
              "level " + std::to_string(k) + ": distance " + fmt17(dists[k]) +
                  " exceeds " + fmt17(bounds[k]));
  for (std::size_t k = 0; k + 1 < dists.size(); ++k)
    c.require(dists[k + 1] < dists[k] / 1.4,
              "refinement " + std::to_string(k) + "->" + std::to_string(k + 1) +
                  " contracted only " + fmt17(dists[k] / dists[k + 1]) + "x");
  if (c.ok)
    c << "distances " << fmt17(dists[0]) << " / " << fmt17(dists[1]) << " / "
      << fmt17(dists[2]) << ", contraction " << fmt17(dists[0] / dists[1])
      << "x and " << fmt17(dists[1] / dists[2]) << "x per dt halving";
  return c;
}

// --------------------------------------------------------------------------
// 8. Lojasiewicz fit: real trajectory inequality + synthetic recovery.
Check criterion8(const Shared& sh) {
  Check c;
  if (sh.iso_full.samples.empty()) {
    c.require(false, "prerequisite run of criterion 6 missing");
    return c;
  }
  const LsiFit fit = fit_lsi(sh.iso_full);
  c.require(fit.theta > 0.0 && fit.theta <= 0.5,
            "exponent " + fmt17(fit.theta) + " outside (0, 1/2]");
  int checked = 0, violated = 0;
  for (const auto& s : sh.iso_full.samples) {
    if (s.t < fit.t_start || s.t > fit.t_end) continue;
    const double gap = std::abs(s.energy - sh.iso_full.e_star);
    if (gap <= 1e-13 * (1.0 + sh.iso_full.e_star)) continue;
    ++checked;
    if (std::pow(gap, 1.0 - fit.theta) >
        fit.C_lsi * s.grad_norm * (1.0 + 1e-9))
      ++violated;
  }
  c.require(checked >= 20, "only " + std::to_string(checked) +
                               " window samples checked");
  c.require(violated == 0, std::to_string(violated) +
                               " window samples violate the inequality");

  // Synthetic recovery of known exponents.
  std::mt19937_64 rng(808);
  double worst = 0.0;
  for (const double theta : {0.5, 0.35, 0.25}) {
    Trajectory traj;
    traj.e_star = 1.0;
    for (int k = 0; k < 60; ++k) {
      TrajectorySample s;
      s.t = 0.05 * k;
      const double gap = std::exp(-2.0 * s.t);
      s.energy = traj.e_star + gap;
      s.grad_norm =
          std::pow(gap, 1.0 - theta) * (1.0 + 1e-3 * uniform(rng, -1.0, 1.0));
      traj.samples.push_back(s);
    }
    const LsiFit f = fit_lsi(traj);
    worst = std::max(worst, std::abs(f.theta - theta));
  }
  c.require(worst <= 0.02, "synthetic recovery error " + fmt17(worst));
  if (c.ok)
    c << "theta " << fmt17(fit.theta) << ", " << checked
      << " window samples all satisfy the inequality, synthetic error "
      << fmt17(worst);
  return c;
}

// --------------------------------------------------------------------------
// 9. Boundary-determinant grid on the criterion-2 frames.
Check criterion9(const Shared& sh) {
  Check c;
  if (sh.triangles.empty()) {
    c.require(false, "prerequisite frames of criterion 2 missing");
    return c;
  }
  const Anisotropy iso = Anisotropy::euclidean();
  const auto grid = default_lambda_grid();
  double min_det = 1e300, max_r = -1e300, min_d = 1e300;
  for (const auto& [P, A] : sh.triangles) {
    for (int fam = 0; fam < 2; ++fam) {
      const Anisotropy pol =
          fam == 0 ? iso : Anisotropy::quadratic(A).polar();
      const ReferenceFrame fr = build_frame(P[0], P[1], P[2], pol, 16);
      const LinearizedSystem ls = assemble_linearized(fr, pol);
      max_r = std::max({max_r, ls.r1, ls.r2});
      min_d = std::min({min_d, ls.d[0], ls.d[1], ls.d[2]});
      const LsReport rep =
          lopatinskii_shapiro_check(ls, fr.junction_data.weights, grid);
      c.require(rep.rows.size() == grid.size(), "grid size mismatch");
      min_det = std::min(min_det, rep.min_abs_det);
    }
  }
  c.require(min_det > 1e-3, "minimum |det| " + fmt17(min_det));
  c.require(max_r < 0.0, "slope ratio " + fmt17(max_r) + " not negative");
  c.require(min_d > 0.0, "diffusion coefficient " + fmt17(min_d));
  if (c.ok)
    c << "40 frames x 45 spectral nodes: min |det| " << fmt17(min_det)
      << ", slope ratios <= " << fmt17(max_r) << ", diffusion >= "
      << fmt17(min_d);
  return c;
}

// --------------------------------------------------------------------------
// 10. Determinism of the exported trajectory.
Check criterion10() {
  Check c;
  const fs::path dir = fs::temp_directory_path() / "trinet_acceptance_det";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "cfg.json");
    cfg << "{\"flow\": {\"N\": 32, \"dt\": 0.001, \"t_end\": 0.05},\n"
           " \"perturbation\": {\"amplitude\": 0.02, \"seed\": 7,\n"
           "                    \"junction_amplitude\": 0.01}}\n";
  }
  auto run_once = [&](const std::string& sub) {
    const std::string cmd = std::string(TRINET_CLI_PATH) + " flow --config " +
                            (dir / "cfg.json").string() + " --out " +
                            (dir / sub).string() + " --quiet > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  c.require(run_once("a") == 0, "first driver invocation failed");
  c.require(run_once("b") == 0, "second driver invocation failed");
  const std::string ta = slurp(dir / "a" / "trajectory.csv");
  const std::string tb = slurp(dir / "b" / "trajectory.csv");
  c.require(!ta.empty(), "trajectory artifact missing");
  c.require(ta == tb, "trajectory artifacts differ between invocations");
  if (c.ok)
    c << "two invocations, " << ta.size()
      << " bytes each, byte-identical trajectories";
  return c;
}

}  // namespace

int main() {
  Shared sh;
  const std::array<std::pair<const char*, std::function<Check()>>, 10> crit = {
      {{"anisotropy identities", [&] { return criterion1(); }},
       {"minimizer correctness", [&] { return criterion2(sh); }},
       {"matrix facts", [&] { return criterion3(); }},
       {"variational consistency", [&] { return criterion4(); }},
       {"flow dissipation and constraints", [&] { return criterion5(sh); }},
       {"stability of the minimizer", [&] { return criterion6(sh); }},
       {"solver equivalence", [&] { return criterion7(); }},
       {"energy-gradient inequality fit", [&] { return criterion8(sh); }},
       {"boundary-determinant grid", [&] { return criterion9(sh); }},
       {"deterministic artifacts", [&] { return criterion10(); }}}};

  bool all_ok = true;
  for (std::size_t k = 0; k < crit.size(); ++k) {
    Check c;
    try {
      c = crit[k].second();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail.str("");
      c.detail << "exception: " << e.what();
    }
    all_ok = all_ok && c.ok;
    std::printf("criterion %2zu [%s] %s — %s\n", k + 1, crit[k].first,
                c.ok ? "PASS" : "FAIL", c.detail.str().c_str());
    std::fflush(stdout);
  }
  return all_ok ? 0 : 1;
}
