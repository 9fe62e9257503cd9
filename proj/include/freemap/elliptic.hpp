#pragma once

// Elliptic integrals of the first kind, the conformal map of the unit disk
// onto an ellipse with foci +-1, and the one-variable ellipse LMI domain on
// which no proper self-map with derivative i at 0 exists.
//
// Convention: K(z, t) = int_0^z dx / sqrt((1 - x^2)(1 - t^2 x^2)) with modulus
// t; Carlson's R_F is called with parameter m = t^2.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "freemap/domains.hpp"
#include "freemap/expr.hpp"
#include "freemap/linalg.hpp"
#include "freemap/series.hpp"

namespace freemap {

class EllipticError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
inline bool on_negative_axis(cplx v) { return v.imag() == 0.0 && v.real() < 0.0; }
}  // namespace detail

/// Carlson's symmetric integral
///   R_F(x, y, z) = 1/2 int_0^inf dt / sqrt((t + x)(t + y)(t + z))
/// by argument duplication (Carlson 1995). Arguments must avoid the negative
/// real axis and at most one may vanish.
inline cplx carlson_rf(cplx x, cplx y, cplx z) {
  if (detail::on_negative_axis(x) || detail::on_negative_axis(y) || detail::on_negative_axis(z))
    throw EllipticError("carlson_rf: argument on the branch cut (negative real axis)");
  const int zeros = (x == cplx{}) + (y == cplx{}) + (z == cplx{});
  if (zeros > 1) throw EllipticError("carlson_rf: more than one zero argument");

  const cplx a0 = (x + y + z) / 3.0;
  double q = std::pow(3.0 * 1e-16, -1.0 / 6.0) *
             std::max({std::abs(a0 - x), std::abs(a0 - y), std::abs(a0 - z)});
  cplx xm = x, ym = y, zm = z, am = a0;
  double pow4 = 1.0;
  for (int it = 0; it < 100 && q >= std::abs(am); ++it) {
    const cplx sx = std::sqrt(xm), sy = std::sqrt(ym), sz = std::sqrt(zm);
    const cplx lambda = sx * sy + sx * sz + sy * sz;
    am = (am + lambda) * 0.25;
    xm = (xm + lambda) * 0.25;
    ym = (ym + lambda) * 0.25;
    zm = (zm + lambda) * 0.25;
    q *= 0.25;
    pow4 *= 4.0;
  }
  const cplx dx = (a0 - x) / (pow4 * am);
  const cplx dy = (a0 - y) / (pow4 * am);
  const cplx dz = -(dx + dy);
  const cplx e2 = dx * dy - dz * dz;
  const cplx e3 = dx * dy * dz;
  return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / std::sqrt(am);
}

/// K(z, t) = z R_F(1 - z^2, 1 - t^2 z^2, 1) on the principal branch. Points
/// with z^2 real and > 1 sit on the cut and are rejected.
inline cplx elliptic_k_incomplete(cplx z, double t) {
  const cplx z2 = z * z;
  const cplx a = 1.0 - z2, b = 1.0 - t * t * z2;
  if (detail::on_negative_axis(a) || detail::on_negative_axis(b))
    throw EllipticError("elliptic_k_incomplete: z^2 is real and >= 1, branch is ambiguous");
  if (z == cplx{}) return 0.0;
  return z * carlson_rf(a, b, 1.0);
}

/// Complete integral K(t) = K(1, t).
inline double elliptic_k(double t) {
  if (!(t >= 0.0 && t < 1.0)) throw std::invalid_argument("elliptic_k: modulus must lie in [0, 1)");
  return carlson_rf(0.0, 1.0 - t * t, 1.0).real();
}

/// mu(t) = (pi/2) K(sqrt(1 - t^2)) / K(t).
inline double elliptic_mu(double t) {
  if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("elliptic_mu: modulus must lie in (0, 1)");
  return 0.5 * std::numbers::pi * elliptic_k(std::sqrt(1.0 - t * t)) / elliptic_k(t);
}

/// Values reported for the ellipse example, with the tolerances they are
/// checked against.
struct EllipseReference {
  static constexpr double r0 = 1.00033, r0_tol = 2e-4;
  static constexpr double min_eig = 0.0114903, min_eig_tol = 5e-4;
  static constexpr double c3_over_c1 = 0.30572, c3_tol = 1e-4;
  static constexpr double c5_over_c1 = 0.140197, c5_tol = 1e-4;
};

/// The ellipse example: modulus t = 2/3, semi-axes a = cosh(mu/2),
/// b = sinh(mu/2) (so a^2 - b^2 = 1), and the pencil A = [[C1, C2], [0, -C1]]
/// with C1 = sqrt(1/b^2 - 1/a^2)/2, C2 = 1/a. For scalar x = u + iv the LMI
/// reads (u/b)^2 + (v/a)^2 < 1, so the level-1 domain is the ellipse with
/// real semi-axis b and imaginary semi-axis a.
class EllipseModel {
 public:
  EllipseModel() : EllipseModel(2.0 / 3.0) {}

  explicit EllipseModel(double t) : t_(t) {
    k_ = elliptic_k(t_);
    mu_ = elliptic_mu(t_);
    a_ = std::cosh(0.5 * mu_);
    b_ = std::sinh(0.5 * mu_);
    c1_ = 0.5 * std::sqrt(1.0 / (b_ * b_) - 1.0 / (a_ * a_));
    c2_ = 1.0 / a_;
  }

  double t() const { return t_; }
  double complete_k() const { return k_; }
  double mu() const { return mu_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double c1() const { return c1_; }
  double c2() const { return c2_; }

  Pencil pencil() const { return Pencil({Matrix{{c1_, c2_}, {0.0, -c1_}}}); }
  NCDomain domain() const { return NCDomain::pencil(pencil()); }

  /// sin( pi/(2K(t)) K(z/sqrt(t), t) ): maps the unit disk onto the ellipse
  /// with foci +-1 and real semi-axis a.
  ///
  /// u = z/sqrt(t) reaches the branch points u = +-1 inside the disk. Near
  /// them the complementary form cos(c F(v)), v^2 = (1-u^2)/(1-t^2u^2), is
  /// used; it is even in v, so no branch choice enters.
  cplx sine_map(cplx z) const {
    const cplx u = z / std::sqrt(t_);
    if (u.real() < 0.0) return -sine_map(-z);
    const double c = 0.5 * std::numbers::pi / k_;
    const cplx u2 = u * u;
    const double t2 = t_ * t_;
    if (u2.real() < 0.5) return std::sin(c * u * carlson_rf(1.0 - u2, 1.0 - t2 * u2, 1.0));
    const cplx w = 1.0 - t2 * u2;
    const cplx v = std::sqrt((1.0 - u2) / w);
    if (v == cplx{}) return 1.0;
    return std::cos(c * v * carlson_rf(u2 * (1.0 - t2) / w, (1.0 - t2) / w, 1.0));
  }

  /// Conformal map of the unit disk onto the pencil's level-1 domain, fixing 0.
  cplx forward(cplx z) const { return cplx{0.0, 1.0} * sine_map(z); }

  /// forward'(0) by central difference.
  cplx forward_derivative_at_zero() const {
    constexpr double h = 1e-5;
    return (forward(h) - forward(-h)) / (2.0 * h);
  }

  /// Solves forward(z) = w by Newton's method (derivative by central
  /// differences), starting from w / forward'(0).
  cplx invert(cplx w) const {
    if (w == cplx{}) return 0.0;
    cplx z = w / forward_derivative_at_zero();
    const double tol = 1e-12 * std::max(1.0, std::abs(w));
    cplx residual = forward(z) - w;
    for (int it = 0; it < 50; ++it) {
      if (std::abs(residual) <= tol) return z;
      constexpr double h = 1e-6;
      const cplx deriv = (forward(z + h) - forward(z - h)) / (2.0 * h);
      cplx step = residual / deriv;
      // Halve the step until the residual decreases.
      for (int back = 0; back < 30; ++back) {
        const cplx trial = z - step;
        cplx r;
        bool ok = true;
        try {
          r = forward(trial) - w;
        } catch (const EllipticError&) {
          ok = false;
        }
        if (ok && std::abs(r) < std::abs(residual)) {
          z = trial;
          residual = r;
          break;
        }
        step *= 0.5;
        if (back == 29) {
          throw EllipticError("invert: Newton stalled near z = " + std::to_string(z.real()) + "+" +
                              std::to_string(z.imag()) + "i");
        }
      }
    }
    if (std::abs(residual) <= tol) return z;
    throw EllipticError("invert: no convergence in 50 iterations; last iterate " + std::to_string(z.real()) + "+" +
                        std::to_string(z.imag()) + "i");
  }

  /// forward( i * forward^{-1}(z) ): the level-1 self-map fixing 0 with
  /// derivative i. Its fourth iterate is the identity.
  cplx b1(cplx z) const {
    if (z == cplx{}) return 0.0;
    return forward(cplx{0.0, 1.0} * invert(z));
  }

 private:
  double t_;
  double k_ = 0.0, mu_ = 0.0, a_ = 0.0, b_ = 0.0, c1_ = 0.0, c2_ = 0.0;
};

struct WitnessReport {
  std::vector<cplx> coeffs;  // Taylor coefficients c_0..c_6 of b1 at 0
  double c3_over_c1 = 0.0;   // (c_3 / c_1), real part
  double c5_over_c1 = 0.0;
  double r0 = 0.0;           // largest r with L(rN) > 0
  Matrix image;              // b(r0 N)
  double min_eig = 0.0;      // smallest eigenvalue of L(b(r0 N))
  double coeff_radius = 0.5;
  double r0_tolerance = 1e-12;
};

/// The largest r > 0 with L(r N) > 0 for nilpotent direction N, by bisection.
inline double nilpotent_exit_scale(const Pencil& p, const Matrix& n, double tol = 1e-12) {
  auto inside = [&](double r) { return cholesky_pd(p.lmi(MatrixTuple{n * cplx{r, 0.0}})); };
  double lo = 0.0, hi = 1.0;
  while (inside(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw EllipticError("nilpotent_exit_scale: ray never leaves the domain");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (inside(mid) ? lo : hi) = mid;
  }
  return lo;
}

/// Evidence that no proper self-map b of the ellipse domain has b(0) = 0 and
/// b'(0) = i: b's power series evaluated at r0 N (N the 4 x 4 shift, r0 N on
/// the boundary) lands strictly inside.
inline WitnessReport nonexistence_witness(const EllipseModel& model) {
  WitnessReport rep;
  try {
    rep.coeffs = series_from_samples([&](cplx z) { return model.b1(z); }, rep.coeff_radius, 6);
  } catch (const std::exception& e) {
    throw EllipticError(std::string("stage series: ") + e.what());
  }
  rep.c3_over_c1 = (rep.coeffs[3] / rep.coeffs[1]).real();
  rep.c5_over_c1 = (rep.coeffs[5] / rep.coeffs[1]).real();

  const Pencil pencil = model.pencil();
  const Matrix shift = Matrix::shift(4);
  try {
    rep.r0 = nilpotent_exit_scale(pencil, shift, rep.r0_tolerance);
  } catch (const std::exception& e) {
    throw EllipticError(std::string("stage exit-scale: ") + e.what());
  }
  try {
    rep.image = evaluate_on_nilpotent({0.0, rep.coeffs[1], 0.0, rep.coeffs[3]}, rep.r0, shift);
    rep.min_eig = min_eigenvalue(pencil.lmi(MatrixTuple{rep.image}));
  } catch (const std::exception& e) {
    throw EllipticError(std::string("stage image: ") + e.what());
  }
  return rep;
}

/// The truncated power series of b1 as a one-variable free map.
inline FreeMap series_map(const std::vector<cplx>& coeffs) { return FreeMap(1, {series(coeffs, var(1))}); }

}  // namespace freemap
