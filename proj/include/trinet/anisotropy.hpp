#pragma once

// Anisotropy densities (norms on R^2), their derivatives, polar (dual) norms,
// Wulff-shape sampling, and the mobility weight entering the flow.
//
// Conventions:
//   * phi is 1-homogeneous, positive away from 0, and elliptic in the sense
//     that D^2(phi^2) is uniformly positive definite.
//   * The polar norm is phi_polar(x) = sup{ x.zeta : phi(zeta) <= 1 }.
//   * The Cahn-Hoffmann vector of a unit normal nu is D(phi_polar)(nu).
//   * mobility_weight(phi_polar, nu, tau) = phi_polar(nu) *
//     (D^2(phi_polar)(nu) tau . tau), the scalar multiplying the curvature in
//     the normal velocity.

#include <functional>
#include <optional>
#include <utility>

#include "trinet/common.hpp"
#include "trinet/errors.hpp"

namespace trinet {

enum class AnisotropyKind { Euclidean, Quadratic, Custom };

/// Cahn-Hoffmann vector (a plain planar vector; alias for readability).
using CahnHoffmann = Vec2;

namespace detail {
/// Inputs of norm this small are treated as degenerate (norm not smooth at 0).
inline constexpr double kDegenerateFloor = 1e-12;
/// FD step scales for custom densities without supplied derivatives.
inline constexpr double kGradStep = 1e-6;
inline constexpr double kHessStep = 1e-4;
}  // namespace detail

class Anisotropy {
 public:
  using ValueFn = std::function<double(const Vec2&)>;
  using GradFn = std::function<Vec2(const Vec2&)>;
  using HessFn = std::function<Mat2(const Vec2&)>;

  /// Euclidean norm |p|; the isotropic case.
  static Anisotropy euclidean() {
    Anisotropy a;
    a.kind_ = AnisotropyKind::Euclidean;
    a.A_.setIdentity();
    a.ellipticity_ = 2.0;  // D^2(|p|^2) = 2 Id
    return a;
  }

  /// Quadratic norm sqrt(p.Ap) for symmetric positive definite A.
  static Anisotropy quadratic(const Mat2& A) {
    const double scale = A.cwiseAbs().maxCoeff();
    if (std::abs(A(0, 1) - A(1, 0)) > 1e-12 * std::max(scale, 1.0))
      throw NotElliptic("quadratic anisotropy matrix must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat2> es(A);
    if (es.eigenvalues().minCoeff() <= 0.0)
      throw NotElliptic("quadratic anisotropy matrix must be positive definite");
    Anisotropy a;
    a.kind_ = AnisotropyKind::Quadratic;
    a.A_ = 0.5 * (A + A.transpose());
    a.ellipticity_ = 2.0 * es.eigenvalues().minCoeff();  // D^2(phi^2) = 2A
    return a;
  }

  /// User-supplied density.  Derivatives fall back to central differences
  /// when not provided.  Ellipticity is certified numerically on 360 unit
  /// directions (D^2(phi^2) is 0-homogeneous, so the circle suffices).
  static Anisotropy custom(ValueFn value, GradFn grad = nullptr,
                           HessFn hess = nullptr) {
    Anisotropy a;
    a.kind_ = AnisotropyKind::Custom;
    a.value_ = std::move(value);
    a.grad_ = std::move(grad);
    a.hess_ = std::move(hess);
    a.ellipticity_ = a.certify_ellipticity();
    return a;
  }

  AnisotropyKind kind() const { return kind_; }

  /// Matrix of the quadratic family (identity for Euclidean).
  const Mat2& matrix() const { return A_; }

  /// Certified constant c > 0 with D^2(phi^2) >= c * Id.
  double ellipticity_constant() const { return ellipticity_; }

  /// phi(p).  Throws DegenerateInput for |p| at roundoff scale.
  double eval(const Vec2& p) const {
    check_input(p);
    switch (kind_) {
      case AnisotropyKind::Euclidean: return p.norm();
      case AnisotropyKind::Quadratic: return std::sqrt(p.dot(A_ * p));
      case AnisotropyKind::Custom: return value_(p);
    }
    return 0.0;  // unreachable
  }

  /// D phi(p); 0-homogeneous.
  Vec2 grad(const Vec2& p) const {
    check_input(p);
    switch (kind_) {
      case AnisotropyKind::Euclidean: return p.normalized();
      case AnisotropyKind::Quadratic: return (A_ * p) / std::sqrt(p.dot(A_ * p));
      case AnisotropyKind::Custom: break;
    }
    if (grad_) return grad_(p);
    const double h = detail::kGradStep * std::max(p.norm(), 1.0);
    Vec2 g;
    for (int k = 0; k < 2; ++k) {
      Vec2 e = Vec2::Zero();
      e[k] = h;
      g[k] = (value_(p + e) - value_(p - e)) / (2.0 * h);
    }
    return g;
  }

  /// D^2 phi(p); (-1)-homogeneous, annihilates p.
  Mat2 hess(const Vec2& p) const {
    check_input(p);
    switch (kind_) {
      case AnisotropyKind::Euclidean: {
        const double n = p.norm();
        const Vec2 q = p / n;
        return (Mat2::Identity() - q * q.transpose()) / n;
      }
      case AnisotropyKind::Quadratic: {
        const double phi = std::sqrt(p.dot(A_ * p));
        const Vec2 Ap = A_ * p;
        return A_ / phi - (Ap * Ap.transpose()) / (phi * phi * phi);
      }
      case AnisotropyKind::Custom: break;
    }
    if (hess_) return hess_(p);
    if (grad_) {
      // Central difference of the supplied gradient.
      const double h = 1e-5 * std::max(p.norm(), 1.0);
      Mat2 H;
      for (int k = 0; k < 2; ++k) {
        Vec2 e = Vec2::Zero();
        e[k] = h;
        const Vec2 col = (grad_(p + e) - grad_(p - e)) / (2.0 * h);
        H.col(k) = col;
      }
      return 0.5 * (H + H.transpose());
    }
    // Symmetric 4-point second differences of the value.
    const double h = detail::kHessStep * std::max(p.norm(), 1.0);
    Mat2 H;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        Vec2 ei = Vec2::Zero(), ej = Vec2::Zero();
        ei[i] = h;
        ej[j] = h;
        H(i, j) = (value_(p + ei + ej) - value_(p + ei - ej) -
                   value_(p - ei + ej) + value_(p - ei - ej)) /
                  (4.0 * h * h);
      }
    }
    return 0.5 * (H + H.transpose());
  }

  /// Polar (dual) norm.  Closed form for the built-in families; a supported
  /// maximization over directions (720 samples + golden-section refinement)
  /// for custom densities.
  Anisotropy polar() const {
    switch (kind_) {
      case AnisotropyKind::Euclidean: return euclidean();
      case AnisotropyKind::Quadratic: return quadratic(A_.inverse());
      case AnisotropyKind::Custom: break;
    }
    ValueFn base = value_;
    GradFn base_grad = grad_;
    auto support = [base](const Vec2& x) {
      // sup over unit directions of x.d / phi(d); phi 1-homogeneous.
      auto ratio = [&](double t) {
        const Vec2 d(std::cos(t), std::sin(t));
        return x.dot(d) / base(d);
      };
      const int m = 720;
      double best_t = 0.0, best = -1e300;
      for (int k = 0; k < m; ++k) {
        const double t = 2.0 * M_PI * k / m;
        const double r = ratio(t);
        if (r > best) { best = r; best_t = t; }
      }
      // Golden-section refinement in the bracketing window.
      const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
      double lo = best_t - 2.0 * M_PI / m, hi = best_t + 2.0 * M_PI / m;
      double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
      double f1 = ratio(x1), f2 = ratio(x2);
      for (int it = 0; it < 30; ++it) {
        if (f1 < f2) {
          lo = x1; x1 = x2; f1 = f2;
          x2 = lo + gr * (hi - lo); f2 = ratio(x2);
        } else {
          hi = x2; x2 = x1; f2 = f1;
          x1 = hi - gr * (hi - lo); f1 = ratio(x1);
        }
      }
      return std::max(best, std::max(f1, f2));
    };
    (void)base_grad;
    return custom(support);
  }

 private:
  Anisotropy() = default;

  static void check_input(const Vec2& p) {
    if (p.norm() <= detail::kDegenerateFloor)
      throw DegenerateInput("anisotropy evaluated at a degenerate vector");
  }

  /// Minimum eigenvalue of D^2(phi^2) over the unit circle.
  double certify_ellipticity() const {
    double cmin = 1e300;
    for (int k = 0; k < 360; ++k) {
      const double t = 2.0 * M_PI * k / 360.0;
      const Vec2 p(std::cos(t), std::sin(t));
      const double phi = eval(p);
      if (!(phi > detail::kDegenerateFloor))
        throw NotElliptic("custom density not positive on the unit circle");
      const Vec2 g = grad(p);
      const Mat2 H = 2.0 * (phi * hess(p) + g * g.transpose());
      Eigen::SelfAdjointEigenSolver<Mat2> es(H);
      cmin = std::min(cmin, es.eigenvalues().minCoeff());
    }
    if (cmin <= 1e-8)
      throw NotElliptic("custom density fails the uniform convexity check");
    return cmin;
  }

  AnisotropyKind kind_ = AnisotropyKind::Euclidean;
  Mat2 A_ = Mat2::Identity();
  double ellipticity_ = 2.0;
  ValueFn value_;
  GradFn grad_;
  HessFn hess_;
};

/// Cahn-Hoffmann vector N = D(phi_polar)(nu).
inline CahnHoffmann cahn_hoffmann(const Anisotropy& phi_polar, const Vec2& nu) {
  return phi_polar.grad(nu);
}

/// Scalar weight phi_polar(nu) * (D^2 phi_polar(nu) tau . tau) multiplying
/// the curvature in the normal velocity.  (nu,tau) must be orthonormal.
inline double mobility_weight(const Anisotropy& phi_polar, const Vec2& nu,
                              const Vec2& tau) {
  if (std::abs(nu.norm() - 1.0) > 1e-8 || std::abs(tau.norm() - 1.0) > 1e-8 ||
      std::abs(nu.dot(tau)) > 1e-8)
    throw NonOrthogonalFrame("mobility_weight requires an orthonormal (nu,tau)");
  return phi_polar.eval(nu) * tau.dot(phi_polar.hess(nu) * tau);
}

/// m samples of the boundary of the unit ball {phi <= 1}.
inline std::vector<Vec2> wulff_samples(const Anisotropy& phi, int m) {
  std::vector<Vec2> pts;
  pts.reserve(m);
  for (int k = 0; k < m; ++k) {
    const double t = 2.0 * M_PI * k / m;
    const Vec2 d(std::cos(t), std::sin(t));
    pts.push_back(d / phi.eval(d));
  }
  return pts;
}

}  // namespace trinet
