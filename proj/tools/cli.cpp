// Batch driver for the triple-junction flow laboratory.
//
// Subcommands:
//   minimize  build the energy-minimizing reference network and export it
//   flow      perturb the minimizer and evolve it, exporting a trajectory
//   diagnose  fit stability diagnostics to a previously exported trajectory
//   check     report admissibility / compatibility residuals for a setup
//   wulff     export the unit-ball boundaries of the configured densities
//
// One machine-parsable line is printed to stderr on failure:
//   trinet-error code=<n> type=<TypeName> message="<what>"
// Exit codes: 0 success, 1 configuration/input, 2 degenerate minimizer,
// 3 curve collapse, 4 solver divergence, 5 insufficient or exhausted data.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "trinet/io.hpp"

namespace fs = std::filesystem;
using namespace trinet;

namespace {

struct Driver {
  ExperimentConfig cfg;
  fs::path out;
  bool quiet = false;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  RunManifest manifest;

  void note(const std::string& line) const {
    if (!quiet) std::printf("%s\n", line.c_str());
  }

  std::string artifact(const std::string& name) {
    manifest.artifacts.push_back(name);
    return (out / name).string();
  }

  void finish(const std::string& manifest_name = "manifest.json") {
    manifest.config_hash = config_hash(cfg);
    manifest.versions = library_versions();
    manifest.exit_status = 0;
    manifest.wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    manifest.artifacts.push_back(manifest_name);
    write_manifest((out / manifest_name).string(), manifest);
    note("wrote " + (out / manifest_name).string());
  }

  Anisotropy density() const { return density_from(cfg.anisotropy); }

  ReferenceFrame frame(int n) const {
    FrameOptions fo;
    fo.newton_tol = cfg.frame.newton_tol;
    fo.max_iters = cfg.frame.max_iters;
    fo.closeness_gate = cfg.frame.closeness_gate;
    return build_frame(cfg.endpoints[0], cfg.endpoints[1], cfg.endpoints[2],
                       density(), n, fo);
  }

  HeightField perturbation(const ReferenceFrame& fr) const {
    std::mt19937_64 rng(cfg.perturbation.seed);
    const double scale = fr.min_length();
    return perturb_heights(fr, density(), rng,
                           cfg.perturbation.amplitude * scale,
                           cfg.perturbation.modes,
                           cfg.perturbation.junction_amplitude * scale);
  }
};

void cmd_minimize(Driver& d) {
  const Anisotropy phi_polar = d.density();
  const ReferenceFrame fr = d.frame(d.cfg.flow.N);
  write_frame_json(d.artifact("frame.json"), fr);
  write_wulff_csv(d.artifact("wulff.csv"),
                  wulff_samples(primal_from(d.cfg.anisotropy), 256));
  write_wulff_csv(d.artifact("wulff_polar.csv"), wulff_samples(phi_polar, 256));
  const Network net = reconstruct(fr, HeightField::zero(fr.N));
  d.manifest.extra["herring_residual"] = herring_residual(net, phi_polar);
  d.manifest.extra["energy"] = discrete_energy(net, phi_polar);
  d.note("junction (" + fmt17(fr.junction.x()) + ", " + fmt17(fr.junction.y()) +
         "), herring residual " +
         fmt17(d.manifest.extra["herring_residual"]));
  d.finish();
}

void cmd_flow(Driver& d) {
  const Anisotropy phi_polar = d.density();
  const ReferenceFrame fr = d.frame(d.cfg.flow.N);
  const HeightField h0 = d.perturbation(fr);

  const CompatibilityReport comp = check_h_compatibility(fr, h0, phi_polar);
  if (comp.max_residual() > d.cfg.flow.compat_gate)
    throw ConfigError("initial perturbation fails the compatibility gate: " +
                      fmt17(comp.max_residual()) + " > " +
                      fmt17(d.cfg.flow.compat_gate));

  const bool graph = d.cfg.flow.mode == "graph";
  const FlowState initial =
      graph ? make_graph_state(fr, h0)
            : make_parametric_state(fr, reconstruct(fr, h0));

  RunOptions ro;
  ro.snapshot_stride = d.cfg.flow.snapshot_stride;
  ro.max_steps = d.cfg.flow.max_steps;
  ro.step.newton_tol = d.cfg.flow.newton_tol;
  const Trajectory traj =
      run_flow(initial, d.cfg.flow.t_end, d.cfg.flow.dt,
               graph ? FlowMode::Graph : FlowMode::Parametric, phi_polar, ro);

  write_frame_json(d.artifact("frame.json"), fr);
  write_trajectory_csv(d.artifact("trajectory.csv"), traj);
  const Network& final_net = traj.snapshots.back().network;
  write_network_json(d.artifact("final_network.json"), final_net);
  for (int i = 0; i < 3; ++i)
    write_curve_csv(d.artifact("curve_" + std::to_string(i) + ".csv"),
                    final_net.curves[i], phi_polar);
  for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%03zu.svg", k);
    write_svg(d.artifact(name), traj.snapshots[k].network, phi_polar);
  }
  if (d.cfg.diagnostics.smoothing && graph)
    write_smoothing_json(d.artifact("smoothing.json"), smoothing_probe(traj));

  d.manifest.extra["energy_final"] = traj.samples.back().energy;
  d.manifest.extra["energy_reference"] = traj.e_star;
  d.manifest.extra["grad_norm_final"] = traj.samples.back().grad_norm;
  d.manifest.extra["reached_stationary"] = traj.reached_stationary ? 1.0 : 0.0;
  d.manifest.extra["steps"] =
      static_cast<double>(traj.samples.size()) - 1.0;
  d.note("evolved to t = " + fmt17(traj.samples.back().t) + " in " +
         std::to_string(traj.samples.size() - 1) + " steps, final energy " +
         fmt17(traj.samples.back().energy));
  d.finish();
}

void cmd_diagnose(Driver& d, const std::string& trajectory_path) {
  const Anisotropy phi_polar = d.density();
  const ReferenceFrame fr = d.frame(d.cfg.flow.N);

  Trajectory traj;
  traj.samples = read_trajectory_csv(trajectory_path);
  if (traj.samples.empty())
    throw InsufficientData("trajectory file contains no samples");
  traj.e_star =
      discrete_energy(reconstruct(fr, HeightField::zero(fr.N)), phi_polar);
  traj.reached_stationary =
      traj.samples.back().grad_norm < 1e-9 * (1.0 + traj.e_star);

  const auto& last = traj.samples.back();
  write_convergence_json(d.artifact("convergence.json"), last.grad_norm,
                         std::abs(last.energy - traj.e_star),
                         last.max_kappa_phi, traj.reached_stationary);

  if (d.cfg.diagnostics.lsi) {
    const LsiFit fit = fit_lsi(traj);
    write_lsi_json(d.artifact("lsi.json"), fit);
    d.note("lojasiewicz exponent " + fmt17(fit.theta) + " over [" +
           fmt17(fit.t_start) + ", " + fmt17(fit.t_end) + "]");
  }
  if (d.cfg.diagnostics.ls_grid) {
    const LinearizedSystem ls = assemble_linearized(fr, phi_polar);
    const LsReport rep = lopatinskii_shapiro_check(
        ls, fr.junction_data.weights, default_lambda_grid());
    write_ls_csv(d.artifact("ls_grid.csv"), rep);
    d.manifest.extra["ls_min_abs_det"] = rep.min_abs_det;
    d.note("boundary-determinant minimum " + fmt17(rep.min_abs_det));
  }
  if (d.cfg.diagnostics.spectrum) {
    const ReferenceFrame fr_v = d.frame(d.cfg.variations.N);
    const DiscreteOperator op(fr_v, phi_polar, d.cfg.variations.N);
    write_spectrum_csv(d.artifact("spectrum.csv"), op.spectrum());
  }
  d.finish();
}

void cmd_check(Driver& d) {
  const Anisotropy phi_polar = d.density();
  const ReferenceFrame fr = d.frame(d.cfg.flow.N);
  const HeightField h0 = d.perturbation(fr);
  const AdmissibilityReport adm =
      check_admissible(reconstruct(fr, HeightField::zero(fr.N)), phi_polar);
  const CompatibilityReport comp = check_h_compatibility(fr, h0, phi_polar);
  write_check_json(d.artifact("check.json"), adm, comp);
  d.manifest.extra["admissibility_max"] = adm.max_residual();
  d.manifest.extra["compatibility_max"] = comp.max_residual();
  d.note("admissibility " + fmt17(adm.max_residual()) + ", compatibility " +
         fmt17(comp.max_residual()));
  d.finish();
}

void cmd_wulff(Driver& d) {
  write_wulff_csv(d.artifact("wulff.csv"),
                  wulff_samples(primal_from(d.cfg.anisotropy), 256));
  write_wulff_csv(d.artifact("wulff_polar.csv"),
                  wulff_samples(d.density(), 256));
  d.finish();
}

int fail(int code, const char* type, const std::string& what) {
  std::fprintf(stderr, "trinet-error code=%d type=%s message=\"%s\"\n", code,
               type, what.c_str());
  return code;
}

int run_guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const ConfigError& e) {
    return fail(1, "ConfigError", e.what());
  } catch (const DegenerateMinimizer& e) {
    return fail(2, "DegenerateMinimizer", e.what());
  } catch (const DegenerateAngles& e) {
    return fail(2, "DegenerateAngles", e.what());
  } catch (const CollapseDetected& e) {
    return fail(3, "CollapseDetected", e.what());
  } catch (const JunctionNewtonDivergence& e) {
    return fail(4, "JunctionNewtonDivergence", e.what());
  } catch (const NewtonDivergence& e) {
    return fail(4, "NewtonDivergence", e.what());
  } catch (const StepRejected& e) {
    return fail(4, "StepRejected", e.what());
  } catch (const MaxStepsExceeded& e) {
    return fail(4, "MaxStepsExceeded", e.what());
  } catch (const SingularFh& e) {
    return fail(4, "SingularFh", e.what());
  } catch (const InsufficientData& e) {
    return fail(5, "InsufficientData", e.what());
  } catch (const EnergyAtMinimum& e) {
    return fail(5, "EnergyAtMinimum", e.what());
  } catch (const NotConverged& e) {
    return fail(5, "NotConverged", e.what());
  } catch (const Error& e) {
    return fail(1, "Error", e.what());
  } catch (const std::exception& e) {
    return fail(1, "Exception", e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"triple-junction anisotropic flow laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::uint64_t seed_override = 0;
  bool seed_given = false;
  bool quiet = false;
  app.add_option("--config", config_path, "configuration file (JSON)");
  app.add_option("--out", out_override, "output directory override");
  app.add_option("--seed", seed_override, "perturbation seed override")
      ->each([&](const std::string&) { seed_given = true; });
  app.add_flag("--quiet", quiet, "suppress progress output");

  auto* sub_minimize =
      app.add_subcommand("minimize", "export the reference minimizer");
  auto* sub_flow = app.add_subcommand("flow", "evolve a perturbed network");
  auto* sub_diagnose =
      app.add_subcommand("diagnose", "stability diagnostics for a trajectory");
  std::string trajectory_path;
  sub_diagnose->add_option("--trajectory", trajectory_path,
                           "trajectory CSV (default <out>/trajectory.csv)");
  auto* sub_check =
      app.add_subcommand("check", "report admissibility and compatibility");
  auto* sub_wulff =
      app.add_subcommand("wulff", "export the density unit balls");
  for (auto* sub : {sub_minimize, sub_flow, sub_diagnose, sub_check, sub_wulff})
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 1;
  }

  return run_guarded([&] {
    Driver d;
    if (!config_path.empty()) d.cfg = parse_config_file(config_path);
    if (!out_override.empty()) d.cfg.out = out_override;
    if (seed_given) d.cfg.perturbation.seed = seed_override;
    d.quiet = quiet;
    d.out = d.cfg.out;
    std::error_code ec;
    fs::create_directories(d.out, ec);
    if (ec)
      throw ConfigError("cannot create output directory: " + d.out.string());

    if (sub_minimize->parsed()) {
      cmd_minimize(d);
    } else if (sub_flow->parsed()) {
      cmd_flow(d);
    } else if (sub_diagnose->parsed()) {
      const std::string path = trajectory_path.empty()
                                   ? (d.out / "trajectory.csv").string()
                                   : trajectory_path;
      cmd_diagnose(d, path);
    } else if (sub_check->parsed()) {
      cmd_check(d);
    } else if (sub_wulff->parsed()) {
      cmd_wulff(d);
    }
  });
}
