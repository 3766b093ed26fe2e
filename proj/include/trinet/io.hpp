#pragma once

// Configuration parsing and artifact serialization for the batch driver.
//
// The experiment configuration is one human-readable JSON tree; every key is
// optional (defaults below), numeric fields are validated on load, and
// unknown keys are rejected with their full path.  All CSV writers format
// doubles with seventeen significant digits so that repeated runs with the
// same configuration and seed produce byte-identical artifacts.

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "trinet/diagnostics.hpp"

namespace trinet {

using nlohmann::json;

// ----------------------------------------------------------------- config --

struct AnisotropyConfig {
  std::string family = "euclidean";  // "euclidean" | "quadratic"
  Mat2 matrix = Mat2::Identity();    // primal quadratic form (quadratic only)
};

struct FrameConfig {
  double newton_tol = 1e-12;
  int max_iters = 50;
  double closeness_gate = 0.2;
};

struct FlowConfig {
  double dt = 2e-4;
  double t_end = 1.0;
  std::string mode = "graph";  // "graph" | "parametric"
  int N = 128;
  double newton_tol = 1e-10;
  int snapshot_stride = 0;
  long max_steps = 2000000;
  double compat_gate = 1e-6;  // max allowed initial compatibility residual
};

struct VariationsConfig {
  int N = 64;
};

struct PerturbationConfig {
  double amplitude = 0.02;  // relative to the shortest reference segment
  int modes = 2;
  std::uint64_t seed = 1;
  double junction_amplitude = 0.01;  // relative, same convention
};

struct DiagnosticsConfig {
  bool lsi = true;
  bool ls_grid = true;
  bool spectrum = false;
  bool smoothing = false;
};

struct ExperimentConfig {
  AnisotropyConfig anisotropy;
  std::array<Vec2, 3> endpoints{Vec2(0.0, 0.0), Vec2(1.0, 0.0),
                                Vec2(0.5, 0.8660254037844386)};
  FrameConfig frame;
  FlowConfig flow;
  VariationsConfig variations;
  PerturbationConfig perturbation;
  DiagnosticsConfig diagnostics;
  std::string out = "out";
};

namespace detail {

inline void reject_unknown_keys(const json& obj, const std::string& path,
                                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    bool ok = false;
    for (const char* key : allowed)
      if (item.key() == key) {
        ok = true;
        break;
      }
    if (!ok)
      throw ConfigError("unknown configuration key: " + path + item.key());
  }
}

inline double require_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path + " must be a number");
  return v.get<double>();
}

}  // namespace detail

/// Parse and validate a configuration tree.  Missing keys take defaults;
/// unknown keys and out-of-range values are rejected with the field name.
inline ExperimentConfig parse_config(const json& root) {
  if (!root.is_object()) throw ConfigError("configuration must be an object");
  detail::reject_unknown_keys(root, "",
                              {"anisotropy", "endpoints", "frame", "flow",
                               "variations", "perturbation", "diagnostics",
                               "out"});
  ExperimentConfig cfg;

  if (root.contains("anisotropy")) {
    const json& a = root["anisotropy"];
    detail::reject_unknown_keys(a, "anisotropy.", {"family", "matrix"});
    if (a.contains("family")) cfg.anisotropy.family = a["family"].get<std::string>();
    if (cfg.anisotropy.family != "euclidean" &&
        cfg.anisotropy.family != "quadratic")
      throw ConfigError("anisotropy.family must be euclidean or quadratic");
    if (a.contains("matrix")) {
      const json& m = a["matrix"];
      if (!m.is_array() || m.size() != 2 || !m[0].is_array() ||
          m[0].size() != 2 || m[1].size() != 2)
        throw ConfigError("anisotropy.matrix must be a 2x2 array");
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
          cfg.anisotropy.matrix(r, c) =
              detail::require_number(m[r][c], "anisotropy.matrix");
    }
  }

  if (root.contains("endpoints")) {
    const json& e = root["endpoints"];
    if (!e.is_array() || e.size() != 3)
      throw ConfigError("endpoints must list exactly three points");
    for (int i = 0; i < 3; ++i) {
      if (!e[i].is_array() || e[i].size() != 2)
        throw ConfigError("endpoints entries must be [x, y] pairs");
      cfg.endpoints[i] =
          Vec2(detail::require_number(e[i][0], "endpoints"),
               detail::require_number(e[i][1], "endpoints"));
    }
  }
  double scale = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int k = i + 1; k < 3; ++k)
      scale = std::max(scale, (cfg.endpoints[i] - cfg.endpoints[k]).norm());
  for (int i = 0; i < 3; ++i)
    for (int k = i + 1; k < 3; ++k)
      if ((cfg.endpoints[i] - cfg.endpoints[k]).norm() <= 1e-12 * (1.0 + scale))
        throw ConfigError("endpoints: two endpoints coincide");

  if (root.contains("frame")) {
    const json& f = root["frame"];
    detail::reject_unknown_keys(f, "frame.",
                                {"newton_tol", "max_iters", "closeness_gate"});
    if (f.contains("newton_tol"))
      cfg.frame.newton_tol = detail::require_number(f["newton_tol"], "frame.newton_tol");
    if (f.contains("max_iters")) cfg.frame.max_iters = f["max_iters"].get<int>();
    if (f.contains("closeness_gate"))
      cfg.frame.closeness_gate =
          detail::require_number(f["closeness_gate"], "frame.closeness_gate");
    if (!(cfg.frame.newton_tol > 0.0))
      throw ConfigError("frame.newton_tol must be positive");
    if (cfg.frame.max_iters < 1)
      throw ConfigError("frame.max_iters must be at least 1");
    if (cfg.frame.closeness_gate < 0.0 || cfg.frame.closeness_gate >= 1.0)
      throw ConfigError("frame.closeness_gate must lie in [0, 1)");
  }

  if (root.contains("flow")) {
    const json& f = root["flow"];
    detail::reject_unknown_keys(
        f, "flow.",
        {"dt", "t_end", "mode", "N", "newton_tol", "snapshot_stride",
         "max_steps", "compat_gate"});
    if (f.contains("dt")) cfg.flow.dt = detail::require_number(f["dt"], "flow.dt");
    if (f.contains("t_end"))
      cfg.flow.t_end = detail::require_number(f["t_end"], "flow.t_end");
    if (f.contains("mode")) cfg.flow.mode = f["mode"].get<std::string>();
    if (f.contains("N")) cfg.flow.N = f["N"].get<int>();
    if (f.contains("newton_tol"))
      cfg.flow.newton_tol = detail::require_number(f["newton_tol"], "flow.newton_tol");
    if (f.contains("snapshot_stride"))
      cfg.flow.snapshot_stride = f["snapshot_stride"].get<int>();
    if (f.contains("max_steps")) cfg.flow.max_steps = f["max_steps"].get<long>();
    if (f.contains("compat_gate"))
      cfg.flow.compat_gate = detail::require_number(f["compat_gate"], "flow.compat_gate");
    if (!(cfg.flow.dt > 0.0)) throw ConfigError("flow.dt must be positive");
    if (cfg.flow.t_end < 0.0) throw ConfigError("flow.t_end must be non-negative");
    if (cfg.flow.mode != "graph" && cfg.flow.mode != "parametric")
      throw ConfigError("flow.mode must be graph or parametric");
    if (cfg.flow.N < 8) throw ConfigError("flow.N must be at least 8");
    if (!(cfg.flow.newton_tol > 0.0))
      throw ConfigError("flow.newton_tol must be positive");
    if (cfg.flow.snapshot_stride < 0)
      throw ConfigError("flow.snapshot_stride must be non-negative");
    if (cfg.flow.max_steps < 1) throw ConfigError("flow.max_steps must be at least 1");
    if (!(cfg.flow.compat_gate > 0.0))
      throw ConfigError("flow.compat_gate must be positive");
  }

  if (root.contains("variations")) {
    const json& v = root["variations"];
    detail::reject_unknown_keys(v, "variations.", {"N"});
    if (v.contains("N")) cfg.variations.N = v["N"].get<int>();
    if (cfg.variations.N < 8) throw ConfigError("variations.N must be at least 8");
  }

  if (root.contains("perturbation")) {
    const json& p = root["perturbation"];
    detail::reject_unknown_keys(
        p, "perturbation.",
        {"amplitude", "modes", "seed", "junction_amplitude"});
    if (p.contains("amplitude"))
      cfg.perturbation.amplitude =
          detail::require_number(p["amplitude"], "perturbation.amplitude");
    if (p.contains("modes")) cfg.perturbation.modes = p["modes"].get<int>();
    if (p.contains("seed"))
      cfg.perturbation.seed = p["seed"].get<std::uint64_t>();
    if (p.contains("junction_amplitude"))
      cfg.perturbation.junction_amplitude = detail::require_number(
          p["junction_amplitude"], "perturbation.junction_amplitude");
    if (cfg.perturbation.amplitude < 0.0)
      throw ConfigError("perturbation.amplitude must be non-negative");
    if (cfg.perturbation.modes < 0)
      throw ConfigError("perturbation.modes must be non-negative");
    if (cfg.perturbation.junction_amplitude < 0.0)
      throw ConfigError("perturbation.junction_amplitude must be non-negative");
  }

  if (root.contains("diagnostics")) {
    const json& d = root["diagnostics"];
    detail::reject_unknown_keys(d, "diagnostics.",
                                {"lsi", "ls_grid", "spectrum", "smoothing"});
    if (d.contains("lsi")) cfg.diagnostics.lsi = d["lsi"].get<bool>();
    if (d.contains("ls_grid")) cfg.diagnostics.ls_grid = d["ls_grid"].get<bool>();
    if (d.contains("spectrum"))
      cfg.diagnostics.spectrum = d["spectrum"].get<bool>();
    if (d.contains("smoothing"))
      cfg.diagnostics.smoothing = d["smoothing"].get<bool>();
  }

  if (root.contains("out")) cfg.out = root["out"].get<std::string>();
  if (cfg.out.empty()) throw ConfigError("out must be a non-empty path");
  return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file: " + path);
  json root;
  try {
    in >> root;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
  }
  return parse_config(root);
}

/// Canonical serialization (alphabetic keys, full precision); parsing the
/// result reproduces the configuration exactly.
inline json serialize_config(const ExperimentConfig& cfg) {
  json root;
  root["anisotropy"]["family"] = cfg.anisotropy.family;
  root["anisotropy"]["matrix"] = {
      {cfg.anisotropy.matrix(0, 0), cfg.anisotropy.matrix(0, 1)},
      {cfg.anisotropy.matrix(1, 0), cfg.anisotropy.matrix(1, 1)}};
  root["endpoints"] = {{cfg.endpoints[0].x(), cfg.endpoints[0].y()},
                       {cfg.endpoints[1].x(), cfg.endpoints[1].y()},
                       {cfg.endpoints[2].x(), cfg.endpoints[2].y()}};
  root["frame"] = {{"newton_tol", cfg.frame.newton_tol},
                   {"max_iters", cfg.frame.max_iters},
                   {"closeness_gate", cfg.frame.closeness_gate}};
  root["flow"] = {{"dt", cfg.flow.dt},
                  {"t_end", cfg.flow.t_end},
                  {"mode", cfg.flow.mode},
                  {"N", cfg.flow.N},
                  {"newton_tol", cfg.flow.newton_tol},
                  {"snapshot_stride", cfg.flow.snapshot_stride},
                  {"max_steps", cfg.flow.max_steps},
                  {"compat_gate", cfg.flow.compat_gate}};
  root["variations"] = {{"N", cfg.variations.N}};
  root["perturbation"] = {
      {"amplitude", cfg.perturbation.amplitude},
      {"modes", cfg.perturbation.modes},
      {"seed", cfg.perturbation.seed},
      {"junction_amplitude", cfg.perturbation.junction_amplitude}};
  root["diagnostics"] = {{"lsi", cfg.diagnostics.lsi},
                         {"ls_grid", cfg.diagnostics.ls_grid},
                         {"spectrum", cfg.diagnostics.spectrum},
                         {"smoothing", cfg.diagnostics.smoothing}};
  root["out"] = cfg.out;
  return root;
}

/// The mobility density used on normals: the euclidean norm, or the polar
/// of the configured quadratic form.
inline Anisotropy density_from(const AnisotropyConfig& a) {
  if (a.family == "euclidean") return Anisotropy::euclidean();
  return Anisotropy::quadratic(a.matrix).polar();
}

/// The primal density (unit-ball geometry for the wulff artifacts).
inline Anisotropy primal_from(const AnisotropyConfig& a) {
  if (a.family == "euclidean") return Anisotropy::euclidean();
  return Anisotropy::quadratic(a.matrix);
}

/// FNV-1a digest of the canonical configuration dump.
inline std::string config_hash(const ExperimentConfig& cfg) {
  const std::string dump = serialize_config(cfg).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

// -------------------------------------------------------------- artifacts --

namespace detail {

inline void write_text(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write artifact: " + path);
  out << body;
}

}  // namespace detail

inline constexpr const char* kTrajectoryHeader =
    "t,E,grad_W_norm,junction_x,junction_y,max_kappa_phi,h_c0,h_c1,h_c2";

inline void write_trajectory_csv(const std::string& path,
                                 const Trajectory& traj) {
  std::string body = kTrajectoryHeader;
  body += '\n';
  for (const auto& s : traj.samples) {
    body += fmt17(s.t) + ',' + fmt17(s.energy) + ',' + fmt17(s.grad_norm) +
            ',' + fmt17(s.junction.x()) + ',' + fmt17(s.junction.y()) + ',' +
            fmt17(s.max_kappa_phi) + ',' + fmt17(s.h_c0) + ',' +
            fmt17(s.h_c1) + ',' + fmt17(s.h_c2) + '\n';
  }
  detail::write_text(path, body);
}

inline std::vector<TrajectorySample> read_trajectory_csv(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trajectory file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != kTrajectoryHeader)
    throw ConfigError("trajectory file has an unexpected header: " + path);
  std::vector<TrajectorySample> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<double, 9> v{};
    std::size_t pos = 0;
    for (int k = 0; k < 9; ++k) {
      const std::size_t next = line.find(',', pos);
      const std::string cell = line.substr(
          pos, next == std::string::npos ? std::string::npos : next - pos);
      try {
        v[k] = std::stod(cell);
      } catch (const std::exception&) {
        throw ConfigError("malformed trajectory row: " + line);
      }
      if (next == std::string::npos && k < 8)
        throw ConfigError("trajectory row has too few columns: " + line);
      pos = next + 1;
    }
    TrajectorySample s;
    s.t = v[0];
    s.energy = v[1];
    s.grad_norm = v[2];
    s.junction = Vec2(v[3], v[4]);
    s.max_kappa_phi = v[5];
    s.h_c0 = v[6];
    s.h_c1 = v[7];
    s.h_c2 = v[8];
    out.push_back(s);
  }
  return out;
}

inline void write_frame_json(const std::string& path,
                             const ReferenceFrame& fr) {
  json j;
  j["junction"] = {fr.junction.x(), fr.junction.y()};
  j["endpoints"] = {{fr.endpoints[0].x(), fr.endpoints[0].y()},
                    {fr.endpoints[1].x(), fr.endpoints[1].y()},
                    {fr.endpoints[2].x(), fr.endpoints[2].y()}};
  j["theta_star"] = {fr.junction_data.angles[0], fr.junction_data.angles[1],
                     fr.junction_data.angles[2]};
  j["alpha_star"] = {fr.junction_data.weights[0], fr.junction_data.weights[1],
                     fr.junction_data.weights[2]};
  j["I_matrix"] = json::array();
  for (int r = 0; r < 3; ++r)
    j["I_matrix"].push_back(
        {fr.I_matrix(r, 0), fr.I_matrix(r, 1), fr.I_matrix(r, 2)});
  detail::write_text(path, j.dump(2) + "\n");
}

inline void write_network_json(const std::string& path, const Network& net) {
  json j;
  j["junction"] = {net.junction.x(), net.junction.y()};
  j["endpoints"] = {{net.endpoints[0].x(), net.endpoints[0].y()},
                    {net.endpoints[1].x(), net.endpoints[1].y()},
                    {net.endpoints[2].x(), net.endpoints[2].y()}};
  j["curves"] = json::array();
  for (const auto& c : net.curves) {
    json pts = json::array();
    for (const Vec2& p : c.points) pts.push_back({p.x(), p.y()});
    j["curves"].push_back(std::move(pts));
  }
  detail::write_text(path, j.dump(2) + "\n");
}

inline void write_curve_csv(const std::string& path, const DiscreteCurve& c,
                            const Anisotropy& phi_polar) {
  const auto k = curvature(c);
  const auto kp = kappa_phi(c, phi_polar);
  std::string body = "x_param,px,py,kappa,kappa_phi\n";
  for (int j = 0; j < c.size(); ++j) {
    const double x = static_cast<double>(j) / (c.size() - 1);
    body += fmt17(x) + ',' + fmt17(c.points[j].x()) + ',' +
            fmt17(c.points[j].y()) + ',' + fmt17(k[j]) + ',' + fmt17(kp[j]) +
            '\n';
  }
  detail::write_text(path, body);
}

inline void write_lsi_json(const std::string& path, const LsiFit& fit) {
  json j;
  j["theta"] = fit.theta;
  j["C"] = fit.C_lsi;
  j["window"] = {fit.t_start, fit.t_end};
  j["residual"] = fit.residual;
  j["n_samples"] = fit.n_samples;
  detail::write_text(path, j.dump(2) + "\n");
}

inline void write_ls_csv(const std::string& path, const LsReport& rep) {
  std::string body = "re_lambda,im_lambda,abs_det\n";
  for (const auto& row : rep.rows)
    body += fmt17(row.lambda.real()) + ',' + fmt17(row.lambda.imag()) + ',' +
            fmt17(row.abs_det) + '\n';
  detail::write_text(path, body);
}

inline void write_spectrum_csv(const std::string& path,
                               const std::vector<double>& eigenvalues) {
  std::string body = "index,eigenvalue_real,eigenvalue_imag\n";
  for (std::size_t k = 0; k < eigenvalues.size(); ++k)
    body += std::to_string(k) + ',' + fmt17(eigenvalues[k]) + ",0\n";
  detail::write_text(path, body);
}

inline void write_wulff_csv(const std::string& path,
                            const std::vector<Vec2>& samples) {
  std::string body = "x,y\n";
  for (const Vec2& p : samples)
    body += fmt17(p.x()) + ',' + fmt17(p.y()) + '\n';
  detail::write_text(path, body);
}

inline void write_check_json(const std::string& path,
                             const AdmissibilityReport& adm,
                             const CompatibilityReport& comp) {
  json j;
  j["admissibility"] = {{"endpoint", adm.endpoint},
                        {"concurrency", adm.concurrency},
                        {"herring", adm.herring},
                        {"kappa_phi_zero", adm.kappa_phi_zero},
                        {"lambda_checked", adm.lambda_checked}};
  j["compatibility"] = {{"h_at_zero", comp.h_at_zero},
                        {"junction_sum", comp.junction_sum},
                        {"kappa_at_zero", comp.kappa_at_zero},
                        {"herring", comp.herring},
                        {"velocity_sum", comp.velocity_sum}};
  detail::write_text(path, j.dump(2) + "\n");
}

inline void write_convergence_json(const std::string& path, double grad_norm,
                                   double energy_gap, double max_kappa_phi,
                                   bool reached_stationary) {
  json j;
  j["grad_norm"] = grad_norm;
  j["energy_gap"] = energy_gap;
  j["max_kappa_phi"] = max_kappa_phi;
  j["reached_stationary"] = reached_stationary;
  detail::write_text(path, j.dump(2) + "\n");
}

inline void write_smoothing_json(const std::string& path,
                                 const SmoothingReport& rep) {
  json j;
  j["h0_c2"] = rep.h0_c2;
  j["max_c3"] = rep.max_c3;
  j["ratio"] = rep.ratio;
  j["tail_monotone"] = rep.tail_monotone;
  j["times"] = rep.times;
  j["c3"] = rep.c3;
  detail::write_text(path, j.dump(2) + "\n");
}

/// Scalable vector sketch of the network: one polyline per curve, dots at
/// the fixed ends and the junction, and the equilibrium shape of the
/// configured density inset in the top-right corner.
inline void write_svg(const std::string& path, const Network& net,
                      const Anisotropy& phi_polar) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& c : net.curves)
    for (const Vec2& p : c.points) {
      xmin = std::min(xmin, p.x());
      xmax = std::max(xmax, p.x());
      ymin = std::min(ymin, p.y());
      ymax = std::max(ymax, p.y());
    }
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-12});
  const double pad = 0.1 * span;
  xmin -= pad;
  ymin -= pad;
  const double view = span + 2.0 * pad;
  const double scale = 800.0 / view;
  auto X = [&](double x) { return (x - xmin) * scale; };
  auto Y = [&](double y) { return 800.0 - (y - ymin) * scale; };

  std::string body =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" "
      "viewBox=\"0 0 800 800\">\n<rect width=\"800\" height=\"800\" "
      "fill=\"white\"/>\n";
  const char* colors[3] = {"#1f77b4", "#d62728", "#2ca02c"};
  for (int i = 0; i < 3; ++i) {
    body += "<polyline fill=\"none\" stroke=\"";
    body += colors[i];
    body += "\" stroke-width=\"2\" points=\"";
    for (const Vec2& p : net.curves[i].points)
      body += fmt17(X(p.x())) + ',' + fmt17(Y(p.y())) + ' ';
    body += "\"/>\n";
  }
  for (const Vec2& p : net.endpoints)
    body += "<circle cx=\"" + fmt17(X(p.x())) + "\" cy=\"" + fmt17(Y(p.y())) +
            "\" r=\"5\" fill=\"#333333\"/>\n";
  body += "<circle cx=\"" + fmt17(X(net.junction.x())) + "\" cy=\"" +
          fmt17(Y(net.junction.y())) + "\" r=\"5\" fill=\"black\"/>\n";

  // Inset: boundary of the equilibrium (polar unit ball) shape.
  const auto ball = wulff_samples(phi_polar.polar(), 128);
  double r = 1e-12;
  for (const Vec2& p : ball) r = std::max(r, p.norm());
  body += "<polygon fill=\"none\" stroke=\"#888888\" stroke-width=\"1.5\" "
          "points=\"";
  for (const Vec2& p : ball)
    body += fmt17(720.0 + 60.0 * p.x() / r) + ',' +
            fmt17(80.0 - 60.0 * p.y() / r) + ' ';
  body += "\"/>\n</svg>\n";
  detail::write_text(path, body);
}

// --------------------------------------------------------------- manifest --

struct RunManifest {
  std::string config_hash;
  std::vector<std::string> artifacts;
  std::map<std::string, std::string> versions;
  double wall_clock_s = 0.0;
  int exit_status = 0;
  std::map<std::string, double> extra;
};

inline void write_manifest(const std::string& path, const RunManifest& m) {
  json j;
  j["config_hash"] = m.config_hash;
  j["artifacts"] = m.artifacts;
  j["versions"] = m.versions;
  j["wall_clock_s"] = m.wall_clock_s;
  j["exit_status"] = m.exit_status;
  j["extra"] = m.extra;
  detail::write_text(path, j.dump(2) + "\n");
}

inline std::map<std::string, std::string> library_versions() {
  return {{"trinet", "1.0.0"},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                        std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                       std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

}  // namespace trinet
