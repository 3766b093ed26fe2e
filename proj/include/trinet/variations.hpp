#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "trinet/anisotropy.hpp"
#include "trinet/errors.hpp"
#include "trinet/geometry.hpp"
#include "trinet/grid.hpp"
#include "trinet/reference_frame.hpp"

namespace trinet {

/// Riesz-style representation of the energy gradient: three densities paired
/// against the quadrature weights plus two junction charges paired with the
/// independent junction values h^1(1), h^2(1) (the third is slaved to the
/// force-balance constraint).
struct GradientElement {
  HeightField u;
  double a1 = 0.0;
  double a2 = 0.0;
};

namespace detail {

/// Per-node differential data of one deformed curve, via the fourth-order
/// grid derivative (applied twice for the second derivative).
struct DeformedCurve {
  std::vector<double> J;      // |gamma'|
  std::vector<Vec2> tau;      // unit tangent
  std::vector<Vec2> nu;       // anticlockwise unit normal
  std::vector<double> kappa;  // signed curvature
  std::vector<double> Dw;     // D^2 phi_polar(nu) tau . tau
};

inline DeformedCurve deformed_curve(const DiscreteCurve& c,
                                    const Anisotropy& phi_polar) {
  const int n = c.size();
  const auto d1 = grid::derivative(c.points);
  const auto d2 = grid::derivative(d1);
  DeformedCurve out;
  out.J.resize(n);
  out.tau.resize(n);
  out.nu.resize(n);
  out.kappa.resize(n);
  out.Dw.resize(n);
  for (int j = 0; j < n; ++j) {
    const double J = d1[j].norm();
    if (J <= 1e-12) throw DegenerateCurve("deformed curve loses regularity");
    out.J[j] = J;
    out.tau[j] = d1[j] / J;
    out.nu[j] = perp(out.tau[j]);
    out.kappa[j] = det2(d1[j], d2[j]) / (J * J * J);
    out.Dw[j] = out.tau[j].dot(phi_polar.hess(out.nu[j]) * out.tau[j]);
  }
  return out;
}

/// Plain second-derivative weight of the reference direction of curve i.
inline double reference_weight(const ReferenceFrame& fr,
                               const Anisotropy& phi_polar, int i) {
  return fr.tau_star[i].dot(phi_polar.hess(fr.nu_star[i]) * fr.tau_star[i]);
}

}  // namespace detail

/// Network energy evaluated with the high-order grid derivative and
/// boundary-corrected quadrature so that it is differentiable-consistent
/// with the variation formulas below.
inline double discrete_energy(const Network& net, const Anisotropy& phi_polar) {
  double e = 0.0;
  for (int i = 0; i < 3; ++i) {
    const int n = net.curves[i].size();
    const auto w = grid::quad_weights(n);
    const auto d1 = grid::derivative(net.curves[i].points);
    std::vector<double> f(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      const Vec2 p = perp(d1[j]);
      if (p.norm() <= 1e-12)
        throw DegenerateCurve("deformed curve loses regularity");
      f[j] = phi_polar.eval(p);
    }
    e += grid::integrate(w, f);
  }
  return e;
}

/// Energy of the network reconstructed from a height field.
inline double energy_of_h(const ReferenceFrame& fr, const HeightField& h,
                          const Anisotropy& phi_polar) {
  return discrete_energy(reconstruct(fr, h), phi_polar);
}

/// Directional derivative of the energy at h0 in direction h1: curvature
/// integrals over the deformed curves plus the junction term produced by the
/// moving triple point.
inline double first_variation(const ReferenceFrame& fr, const HeightField& h0,
                              const HeightField& h1,
                              const Anisotropy& phi_polar) {
  const int n = fr.N;
  const Network net = reconstruct(fr, h0);
  const HeightField mu1 = mu_of_h(fr, h1);
  const auto w = grid::quad_weights(n);

  double total = 0.0;
  for (int i = 0; i < 3; ++i) {
    const auto dc = detail::deformed_curve(net.curves[i], phi_polar);
    std::vector<double> f(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      const Vec2 zeta = h1[i][j] * fr.nu_star[i] + mu1[i][j] * fr.tau_star[i];
      f[j] = -dc.Dw[j] * dc.kappa[j] * dc.J[j] * dc.nu[j].dot(zeta);
    }
    total += grid::integrate(w, f);
    const Vec2 zeta_end =
        h1[i][n - 1] * fr.nu_star[i] + mu1[i][n - 1] * fr.tau_star[i];
    total += phi_polar.grad(dc.nu[n - 1]).dot(perp(zeta_end));
  }
  return total;
}

/// Gradient of the energy in the density-plus-charges representation,
/// evaluated directly on a network over the given frame. The tangential
/// couplings are folded through the coupling matrix so that pairing the
/// result with any admissible direction reproduces first_variation exactly
/// (same quadrature, same rearrangement).
inline GradientElement gradient_M_network(const ReferenceFrame& fr,
                                          const Network& net,
                                          const Anisotropy& phi_polar) {
  const int n = net.curves[0].size();

  std::array<detail::DeformedCurve, 3> dc;
  for (int i = 0; i < 3; ++i)
    dc[i] = detail::deformed_curve(net.curves[i], phi_polar);

  GradientElement g;
  g.u = HeightField::zero(n);
  for (int k = 0; k < 3; ++k) {
    for (int j = 0; j < n; ++j) {
      const double fk = -dc[k].Dw[j] * dc[k].kappa[j] * dc[k].J[j];
      double val = fk * dc[k].nu[j].dot(fr.nu_star[k]);
      for (int i = 0; i < 3; ++i) {
        const double fi = -dc[i].Dw[j] * dc[i].kappa[j] * dc[i].J[j];
        val += fr.I_matrix(i, k) * fi * dc[i].nu[j].dot(fr.tau_star[i]);
      }
      g.u[k][j] = val;
    }
  }

  std::array<double, 3> C{};
  std::array<double, 3> b{};
  std::array<Vec2, 3> N_end;
  for (int i = 0; i < 3; ++i) {
    N_end[i] = phi_polar.grad(dc[i].nu[n - 1]);
    b[i] = N_end[i].dot(fr.nu_star[i]);
  }
  for (int i = 0; i < 3; ++i) {
    C[i] = -N_end[i].dot(fr.tau_star[i]);
    for (int k = 0; k < 3; ++k) C[i] += fr.I_matrix(k, i) * b[k];
  }
  const auto& al = fr.junction_data.weights;
  g.a1 = C[0] - al[0] / al[2] * C[2];
  g.a2 = C[1] - al[1] / al[2] * C[2];
  return g;
}

/// Gradient of the energy at a height field over its frame.
inline GradientElement gradient_M(const ReferenceFrame& fr,
                                  const HeightField& h0,
                                  const Anisotropy& phi_polar) {
  return gradient_M_network(fr, reconstruct(fr, h0), phi_polar);
}

/// Pairing of a gradient element with an admissible direction: quadrature of
/// the densities plus the charges against the independent junction values.
inline double duality_pairing(const GradientElement& g, const HeightField& h1) {
  const int n = h1.size();
  const auto w = grid::quad_weights(n);
  double s = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < n; ++j) s += w[j] * g.u[i][j] * h1[i][j];
  s += g.a1 * h1[0][n - 1] + g.a2 * h1[1][n - 1];
  return s;
}

/// Norm of the product space (three L^2 densities, two charges); the density
/// norms use plain trapezoidal weights on [0,1].
inline double w_norm(const GradientElement& g, const ReferenceFrame& fr) {
  (void)fr;
  const int n = g.u.size();
  const double dx = 1.0 / (n - 1);
  double s = g.a1 * g.a1 + g.a2 * g.a2;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < n; ++j) {
      const double wj = (j == 0 || j == n - 1) ? 0.5 * dx : dx;
      s += wj * g.u[i][j] * g.u[i][j];
    }
  return std::sqrt(s);
}

/// Second variation at the reference configuration, evaluated in the
/// manifestly symmetric first-derivative form: with straight constant-speed
/// reference curves it reduces to sum_i (D_i/L_i) int h0' h1' dx.
inline double second_variation(const ReferenceFrame& fr, const HeightField& h0,
                               const HeightField& h1,
                               const Anisotropy& phi_polar) {
  const int n = fr.N;
  const auto w = grid::quad_weights(n);
  double s = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double ci =
        detail::reference_weight(fr, phi_polar, i) / fr.lengths[i];
    const auto d0 = grid::derivative(h0[i]);
    const auto d1 = grid::derivative(h1[i]);
    std::vector<double> prod(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) prod[j] = d0[j] * d1[j];
    s += ci * grid::integrate(w, prod);
  }
  return s;
}

/// Discretization of the linearized gradient at the reference configuration
/// on the constrained coordinates (interior values of all three curves plus
/// the two independent junction values).
class DiscreteOperator {
 public:
  DiscreteOperator(const ReferenceFrame& fr, const Anisotropy& phi_polar,
                   int n)
      : n_(n), alpha_(fr.junction_data.weights) {
    if (n < 8) throw DegenerateInput("operator needs at least 8 nodes");
    for (int i = 0; i < 3; ++i)
      c_[i] = detail::reference_weight(fr, phi_polar, i) / fr.lengths[i];
    D_ = grid::derivative_matrix(n);
    const auto w = grid::quad_weights(n);
    w_ = Eigen::Map<const Eigen::VectorXd>(w.data(), n);
    K_ = D_.transpose() * w_.asDiagonal() * D_;

    // Embedding of the constrained coordinates into the full 3n values:
    // h^i(0) = 0 and h^3(1) slaved to the junction constraint.
    const int m = size();
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(3 * n, m);
    for (int i = 0; i < 3; ++i)
      for (int j = 1; j <= n - 2; ++j)
        S(i * n + j, i * (n - 2) + (j - 1)) = 1.0;
    const int j1 = 3 * (n - 2);
    S(0 * n + (n - 1), j1) = 1.0;
    S(1 * n + (n - 1), j1 + 1) = 1.0;
    S(2 * n + (n - 1), j1) = -alpha_[0] / alpha_[2];
    S(2 * n + (n - 1), j1 + 1) = -alpha_[1] / alpha_[2];

    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    Eigen::MatrixXd Wm = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    for (int i = 0; i < 3; ++i) {
      G.block(i * n, i * n, n, n) = c_[i] * K_;
      Wm.block(i * n, i * n, n, n) = w_.asDiagonal();
    }
    A_ = S.transpose() * G * S;
    B_ = S.transpose() * Wm * S;
  }

  int size() const { return 3 * (n_ - 2) + 2; }

  /// Density-plus-charges image of a height field, split so that pairing it
  /// with any admissible direction reproduces quadratic_form exactly.
  GradientElement apply(const HeightField& h) const {
    GradientElement g;
    g.u = HeightField::zero(n_);
    std::array<double, 3> chi{};
    for (int i = 0; i < 3; ++i) {
      const Eigen::Map<const Eigen::VectorXd> hv(h[i].data(), n_);
      Eigen::VectorXd v = c_[i] * (K_ * hv);
      chi[i] = c_[i] * D_.row(n_ - 1).dot(hv);
      v(n_ - 1) -= chi[i];
      for (int j = 0; j < n_; ++j) g.u[i][j] = v(j) / w_(j);
    }
    g.a1 = chi[0] - alpha_[0] / alpha_[2] * chi[2];
    g.a2 = chi[1] - alpha_[1] / alpha_[2] * chi[2];
    return g;
  }

  double quadratic_form(const HeightField& h0, const HeightField& h1) const {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
      const Eigen::Map<const Eigen::VectorXd> a(h0[i].data(), n_);
      const Eigen::Map<const Eigen::VectorXd> b(h1[i].data(), n_);
      s += c_[i] * (D_ * a).dot(w_.asDiagonal() * (D_ * b));
    }
    return s;
  }

  /// Symmetric matrix of the quadratic form on the constrained coordinates.
  const Eigen::MatrixXd& matrix() const { return A_; }

  /// Eigenvalues against the quadrature mass on the constrained coordinates,
  /// ascending (real by symmetry).
  std::vector<double> spectrum() const {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A_, B_);
    const auto& ev = es.eigenvalues();
    return std::vector<double>(ev.data(), ev.data() + ev.size());
  }

 private:
  int n_;
  std::array<double, 3> c_{};
  std::array<double, 3> alpha_{};
  Eigen::MatrixXd D_;
  Eigen::VectorXd w_;
  Eigen::MatrixXd K_;
  Eigen::MatrixXd A_;
  Eigen::MatrixXd B_;
};

inline DiscreteOperator assemble_Mprime0(const ReferenceFrame& fr,
                                         const Anisotropy& phi_polar, int n) {
  return DiscreteOperator(fr, phi_polar, n);
}

/// 2x2 junction matrix coupling the two independent junction values after
/// eliminating the third; positive definite for every valid frame.
inline std::pair<Mat2, double> boundary_matrix_F(const ReferenceFrame& fr,
                                                 const Anisotropy& phi_polar) {
  std::array<double, 3> D{};
  for (int i = 0; i < 3; ++i)
    D[i] = detail::reference_weight(fr, phi_polar, i);
  const auto& al = fr.junction_data.weights;
  const double r1 = al[0] / al[2];
  const double r2 = al[1] / al[2];
  Mat2 F;
  F << D[0] + r1 * r1 * D[2], r1 * r2 * D[2], r1 * r2 * D[2],
      D[1] + r2 * r2 * D[2];
  const double det = D[0] * D[1] + D[0] * D[2] * r2 * r2 + D[1] * D[2] * r1 * r1;
  if (!(det > 0.0))
    throw DegenerateAngles("junction matrix lost positive definiteness");
  return {F, det};
}

}  // namespace trinet
