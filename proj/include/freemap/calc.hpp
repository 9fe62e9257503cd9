#pragma once

// Free calculus and rigidity diagnostics.
//
// Derivatives come from the block identity
//
//   f([[X, H], [0, X]]) = [[f(X), f'(X)[H]], [0, f(X)]],
//
// which is algebraic: for polynomial f the upper-right block is exact. The
// probes return numerical evidence with stated tolerances, never proofs.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "freemap/domains.hpp"
#include "freemap/expr.hpp"
#include "freemap/linalg.hpp"

namespace freemap {

// ---------------------------------------------------------------------------
// Derivatives

/// f'(X)[H], read off the upper-right block of f at [[X, sH], [0, X]] with
/// s = min(1, 0.1/||H||).
inline MatrixTuple directional_derivative(const FreeMap& f, const MatrixTuple& x, const MatrixTuple& h) {
  if (x.arity() != f.arity() || h.arity() != f.arity() || h.size() != x.size())
    throw std::invalid_argument("directional_derivative: shape mismatch");
  const std::size_t n = x.size();
  const double hn = operator_norm(h);
  if (hn == 0.0) return MatrixTuple::zeros(f.co_arity(), n);
  const double s = std::min(1.0, 0.1 / hn);

  std::vector<Matrix> blocks;
  blocks.reserve(x.arity());
  for (std::size_t j = 0; j < x.arity(); ++j) blocks.push_back(upper_block(x[j], h[j] * s, x[j]));
  const MatrixTuple fz = evaluate_map(f, MatrixTuple(std::move(blocks)));

  std::vector<Matrix> out;
  out.reserve(f.co_arity());
  for (const auto& m : fz) out.push_back(m.block(0, n, n, n) * (1.0 / s));
  return MatrixTuple(std::move(out));
}

/// Matrix of H -> f'(X)[H] on column-major vec coordinates: column
/// j*n^2 + (k + l*n) is the image of E_kl in component j, and row
/// i*n^2 + (p + q*n) is entry (p, q) of output component i.
struct DerivativeMatrix {
  MatrixTuple base;
  Matrix matrix;
};

inline DerivativeMatrix derivative_matrix(const FreeMap& f, const MatrixTuple& x) {
  if (x.arity() != f.arity()) throw std::invalid_argument("derivative_matrix: arity mismatch");
  const std::size_t n = x.size(), nn = n * n, g = f.arity(), h = f.co_arity();
  Matrix m(h * nn, g * nn);
  for (std::size_t j = 0; j < g; ++j)
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t k = 0; k < n; ++k) {
        MatrixTuple dir = MatrixTuple::zeros(g, n);
        dir[j](k, l) = 1.0;
        const MatrixTuple d = directional_derivative(f, x, dir);
        const std::size_t col = j * nn + k + l * n;
        for (std::size_t i = 0; i < h; ++i)
          for (std::size_t q = 0; q < n; ++q)
            for (std::size_t p = 0; p < n; ++p) m(i * nn + p + q * n, col) = d[i](p, q);
      }
  return {x, std::move(m)};
}

/// vec(f'(X)[H]) computed through the matrix representation.
inline std::vector<cplx> apply(const DerivativeMatrix& d, const MatrixTuple& h) {
  const std::size_t n = d.base.size(), nn = n * n;
  std::vector<cplx> v(h.arity() * nn);
  for (std::size_t j = 0; j < h.arity(); ++j)
    for (std::size_t l = 0; l < n; ++l)
      for (std::size_t k = 0; k < n; ++k) v[j * nn + k + l * n] = h[j](k, l);
  std::vector<cplx> out(d.matrix.rows(), 0.0);
  for (std::size_t r = 0; r < d.matrix.rows(); ++r)
    for (std::size_t c = 0; c < d.matrix.cols(); ++c) out[r] += d.matrix(r, c) * v[c];
  return out;
}

// ---------------------------------------------------------------------------
// Block formula

/// X (n), Y (m), Gamma (n x m) and t; assembles Z(t)_j = [[X_j, t C_j], [0, Y_j]]
/// with C_j = X_j Gamma - Gamma Y_j.
struct BlockWitness {
  MatrixTuple x;
  MatrixTuple y;
  Matrix gamma;
  cplx t = 1.0;

  MatrixTuple intertwiner_defect() const {
    std::vector<Matrix> c;
    for (std::size_t j = 0; j < x.arity(); ++j) c.push_back(x[j] * gamma - gamma * y[j]);
    return MatrixTuple(std::move(c));
  }

  MatrixTuple z() const {
    if (x.arity() != y.arity()) throw std::invalid_argument("BlockWitness: arity mismatch");
    if (gamma.rows() != x.size() || gamma.cols() != y.size())
      throw std::invalid_argument("BlockWitness: Gamma must be n x m");
    std::vector<Matrix> comps;
    for (std::size_t j = 0; j < x.arity(); ++j)
      comps.push_back(upper_block(x[j], (x[j] * gamma - gamma * y[j]) * t, y[j]));
    return MatrixTuple(std::move(comps));
  }
};

struct BlockFormulaReport {
  std::vector<double> component_deviation;
  double max_deviation = 0.0;  // absolute
  double scale = 1.0;
  double tolerance = 1e-10;
  bool passed() const { return max_deviation <= tolerance * scale; }
};

/// Compares f_j(Z(t)) with [[f_j(X), t (f_j(X) Gamma - Gamma f_j(Y))], [0, f_j(Y)]].
inline BlockFormulaReport check_block_formula(const FreeMap& f, const BlockWitness& w) {
  const MatrixTuple fz = evaluate_map(f, w.z());
  const MatrixTuple fx = evaluate_map(f, w.x);
  const MatrixTuple fy = evaluate_map(f, w.y);
  BlockFormulaReport rep;
  for (std::size_t i = 0; i < f.co_arity(); ++i) {
    const Matrix expected = upper_block(fx[i], (fx[i] * w.gamma - w.gamma * fy[i]) * w.t, fy[i]);
    rep.scale = std::max(rep.scale, max_abs(expected));
    const double dev = max_abs_diff(fz[i], expected);
    rep.component_deviation.push_back(dev);
    rep.max_deviation = std::max(rep.max_deviation, dev);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Injectivity

enum class InjectivityVerdict { consistent, counterexample_candidate, inconclusive };

inline const char* to_string(InjectivityVerdict v) {
  switch (v) {
    case InjectivityVerdict::consistent: return "consistent-with-injectivity";
    case InjectivityVerdict::counterexample_candidate: return "counterexample-candidate";
    case InjectivityVerdict::inconclusive: return "inconclusive";
  }
  return "?";
}

struct InjectivityReport {
  InjectivityVerdict verdict = InjectivityVerdict::inconclusive;
  double image_defect = 0.0;   // max |f(X) Gamma - Gamma f(Y)|, relative
  double point_defect = 0.0;   // max |X Gamma - Gamma Y|, relative
  double t_max = 0.0;          // largest t found with Z(t) in the domain
  std::vector<double> t_grid;
  double sweep_deviation = 0.0;  // max |f(Z(t)) - f(X) (+) f(Y)| over the grid
  double tolerance = 1e-9;
};

/// If f(X) Gamma = Gamma f(Y), sweeps Z(t) over t in [t_max/1e3, t_max] and
/// checks f(Z(t)) is constant, then reports whether X Gamma = Gamma Y as a
/// proper map would force.
inline InjectivityReport injectivity_probe(const FreeMap& f, const NCDomain& dom, const MatrixTuple& x,
                                           const MatrixTuple& y, const Matrix& gamma, double tol = 1e-9) {
  if (!dom.is_member(x) || !dom.is_member(y))
    throw std::invalid_argument("injectivity_probe: x and y must lie in the domain");
  InjectivityReport rep;
  rep.tolerance = tol;
  const MatrixTuple fx = evaluate_map(f, x);
  const MatrixTuple fy = evaluate_map(f, y);

  const double gscale = std::max(1.0, max_abs(gamma));
  double fscale = 1.0, xscale = 1.0;
  for (std::size_t i = 0; i < f.co_arity(); ++i) fscale = std::max({fscale, max_abs(fx[i]), max_abs(fy[i])});
  for (std::size_t j = 0; j < x.arity(); ++j) xscale = std::max({xscale, max_abs(x[j]), max_abs(y[j])});

  for (std::size_t i = 0; i < f.co_arity(); ++i)
    rep.image_defect =
        std::max(rep.image_defect, max_abs(fx[i] * gamma - gamma * fy[i]) / (fscale * gscale));
  if (rep.image_defect > tol) {
    rep.verdict = InjectivityVerdict::inconclusive;
    return rep;
  }

  BlockWitness w{x, y, gamma, 0.0};
  for (const auto& c : w.intertwiner_defect()) rep.point_defect = std::max(rep.point_defect, max_abs(c) / (xscale * gscale));
  if (rep.point_defect <= tol) {
    rep.verdict = InjectivityVerdict::consistent;
    return rep;
  }

  auto inside = [&](double t) {
    w.t = t;
    try {
      return dom.is_member(w.z());
    } catch (const EvaluationError&) {
      return false;
    }
  };
  double lo = 0.0, hi = 1.0;
  while (inside(hi) && hi < 1e9) {
    lo = hi;
    hi *= 2.0;
  }
  if (inside(hi)) {
    lo = hi;
  } else {
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (inside(mid) ? lo : hi) = mid;
    }
  }
  rep.t_max = lo;

  const Matrix zero_corner = Matrix(x.size(), y.size());
  for (int k = 0; k < 16; ++k) {
    const double t = lo * std::pow(10.0, -3.0 * k / 15.0);
    if (t <= 0.0) break;
    rep.t_grid.push_back(t);
    w.t = t;
    const MatrixTuple fz = evaluate_map(f, w.z());
    for (std::size_t i = 0; i < f.co_arity(); ++i) {
      const Matrix expected = upper_block(fx[i], zero_corner, fy[i]);
      rep.sweep_deviation = std::max(rep.sweep_deviation, max_abs_diff(fz[i], expected) / fscale);
    }
  }
  rep.verdict = InjectivityVerdict::counterexample_candidate;
  return rep;
}

// ---------------------------------------------------------------------------
// Properness

struct RayResult {
  std::size_t index = 0;
  double r_star = 0.0;  // largest scale keeping r * ray in the domain
  bool unbounded = false;
  std::vector<double> scales;
  std::vector<double> domain_gaps;
  std::vector<double> codomain_gaps;
  double terminal_codomain_gap = std::numeric_limits<double>::quiet_NaN();
  std::string error;
};

struct PropernessReport {
  std::vector<RayResult> rays;
  double max_terminal_gap = 0.0;  // over rays that completed
  std::size_t failed_rays = 0;
};

/// Largest r with dom.boundary_distance(r * ray) > 0, by doubling then
/// bisection to relative precision ~1e-15. Returns nullopt if the ray stays
/// inside up to r = 2^40.
inline std::optional<double> exit_scale(const NCDomain& dom, const MatrixTuple& ray) {
  auto inside = [&](double r) { return dom.boundary_distance(cplx{r, 0.0} * ray) > 0.0; };
  double lo = 0.0, hi = 1.0;
  while (inside(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 0x1.0p40) return std::nullopt;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (inside(mid) ? lo : hi) = mid;
  }
  return lo;
}

/// Walks r up to the exit scale r* along each ray and records the domain and
/// codomain gaps at r_k = r* (1 - 10^{-12 (k+1)/steps}). A proper map sends
/// the terminal codomain gap to 0.
inline PropernessReport properness_probe(const FreeMap& f, const NCDomain& dom, const NCDomain& codom,
                                         const std::vector<MatrixTuple>& rays, int steps) {
  if (steps < 1) throw std::invalid_argument("properness_probe: steps must be positive");
  PropernessReport rep;
  for (std::size_t idx = 0; idx < rays.size(); ++idx) {
    RayResult rr;
    rr.index = idx;
    const MatrixTuple& ray = rays[idx];
    if (operator_norm(ray) == 0.0) throw std::invalid_argument("properness_probe: zero ray direction");
    const auto rs = exit_scale(dom, ray);
    if (!rs) {
      rr.unbounded = true;
      rr.error = "ray does not leave the domain";
      ++rep.failed_rays;
      rep.rays.push_back(std::move(rr));
      continue;
    }
    rr.r_star = *rs;
    try {
      for (int k = 0; k < steps; ++k) {
        const double r = rr.r_star * (1.0 - std::pow(10.0, -12.0 * (k + 1) / steps));
        const MatrixTuple point = cplx{r, 0.0} * ray;
        rr.scales.push_back(r);
        rr.domain_gaps.push_back(dom.boundary_distance(point));
        rr.codomain_gaps.push_back(codom.boundary_distance(evaluate_map(f, point)));
      }
      rr.terminal_codomain_gap = rr.codomain_gaps.back();
      rep.max_terminal_gap = std::max(rep.max_terminal_gap, std::abs(rr.terminal_codomain_gap));
    } catch (const std::exception& e) {
      rr.error = e.what();
      ++rep.failed_rays;
    }
    rep.rays.push_back(std::move(rr));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Ampliation of the derivative at 0

struct AmpliationReport {
  std::size_t n = 0;
  std::vector<cplx> base_spectrum;       // eigenvalues of the size-1 derivative
  std::vector<cplx> ampliated_spectrum;  // eigenvalues of the size-n derivative
  double max_mismatch = 0.0;
  double tolerance = 1e-8;
  bool passed() const { return max_mismatch <= tolerance; }
};

namespace detail {
inline void require_fixes_zero(const FreeMap& f, const char* who) {
  const MatrixTuple fz = evaluate_map(f, MatrixTuple::zeros(f.arity(), 1));
  for (const auto& c : fz)
    if (std::abs(c(0, 0)) > 1e-12) throw std::invalid_argument(std::string(who) + ": f(0) != 0");
}
}  // namespace detail

/// The size-n derivative at 0 is unitarily equivalent to I (x) phi'(0), so its
/// spectrum is the size-1 spectrum with every multiplicity scaled by n^2.
/// Eigenvalues are matched greedily.
inline AmpliationReport ampliation_check(const FreeMap& f, std::size_t n) {
  if (f.arity() != f.co_arity()) throw std::invalid_argument("ampliation_check: map must have g = h");
  if (n == 0) throw std::invalid_argument("ampliation_check: n must be positive");
  detail::require_fixes_zero(f, "ampliation_check");
  AmpliationReport rep;
  rep.n = n;
  rep.base_spectrum = eigenvalues(derivative_matrix(f, MatrixTuple::zeros(f.arity(), 1)).matrix);
  rep.ampliated_spectrum = eigenvalues(derivative_matrix(f, MatrixTuple::zeros(f.arity(), n)).matrix);

  std::vector<bool> used(rep.ampliated_spectrum.size(), false);
  for (const cplx& lambda : rep.base_spectrum)
    for (std::size_t copy = 0; copy < n * n; ++copy) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t arg = 0;
      for (std::size_t k = 0; k < rep.ampliated_spectrum.size(); ++k)
        if (!used[k] && std::abs(rep.ampliated_spectrum[k] - lambda) < best) {
          best = std::abs(rep.ampliated_spectrum[k] - lambda);
          arg = k;
        }
      if (!std::isfinite(best)) {
        rep.max_mismatch = std::numeric_limits<double>::infinity();
        return rep;
      }
      used[arg] = true;
      rep.max_mismatch = std::max(rep.max_mismatch, best);
    }
  return rep;
}

// ---------------------------------------------------------------------------
// Homogeneity under rotation

struct CircularReport {
  double max_deviation = 0.0;
  std::size_t pairs_checked = 0;
  std::vector<std::pair<std::size_t, double>> skipped;  // (sample, theta) left the domain
};

/// max over samples and angles of |f(e^{it} x) - e^{it} f(x)| / |f(x)|
/// (Frobenius norms over all components).
inline CircularReport circular_linearity_check(const FreeMap& f, const NCDomain& dom,
                                               const std::vector<double>& thetas,
                                               const std::vector<MatrixTuple>& samples) {
  detail::require_fixes_zero(f, "circular_linearity_check");
  CircularReport rep;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const MatrixTuple fx = evaluate_map(f, samples[s]);
    double denom = 0.0;
    for (const auto& c : fx) denom += std::norm(frobenius_norm(c));
    denom = std::sqrt(denom);
    for (double theta : thetas) {
      const cplx rot = std::exp(cplx{0.0, theta});
      const MatrixTuple rx = rot * samples[s];
      if (!dom.is_member(samples[s]) || !dom.is_member(rx)) {
        rep.skipped.emplace_back(s, theta);
        continue;
      }
      const MatrixTuple frx = evaluate_map(f, rx);
      double num = 0.0;
      for (std::size_t i = 0; i < f.co_arity(); ++i) num += std::norm(frobenius_norm(frx[i] - fx[i] * rot));
      num = std::sqrt(num);
      const double dev = denom > 0.0 ? num / denom : (num > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
      rep.max_deviation = std::max(rep.max_deviation, dev);
      ++rep.pairs_checked;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Uniqueness from value and derivative at 0

enum class UniquenessVerdict { same_map, distinct_maps, mismatch };

inline const char* to_string(UniquenessVerdict v) {
  switch (v) {
    case UniquenessVerdict::same_map: return "consistent-with-uniqueness";
    case UniquenessVerdict::distinct_maps: return "distinct maps";
    case UniquenessVerdict::mismatch: return "equal derivatives but different values";
  }
  return "?";
}

struct UniquenessReport {
  UniquenessVerdict verdict = UniquenessVerdict::distinct_maps;
  double derivative_gap = 0.0;
  double max_deviation = 0.0;  // relative, over samples; only when derivatives agree
  std::size_t samples_compared = 0;
};

inline UniquenessReport uniqueness_check(const FreeMap& f, const FreeMap& g2, const std::vector<MatrixTuple>& samples) {
  if (f.arity() != g2.arity() || f.co_arity() != g2.co_arity())
    throw std::invalid_argument("uniqueness_check: maps have different shapes");
  detail::require_fixes_zero(f, "uniqueness_check");
  detail::require_fixes_zero(g2, "uniqueness_check");
  UniquenessReport rep;
  const MatrixTuple zero = MatrixTuple::zeros(f.arity(), 1);
  rep.derivative_gap = max_abs_diff(derivative_matrix(f, zero).matrix, derivative_matrix(g2, zero).matrix);
  if (rep.derivative_gap > 1e-9) {
    rep.verdict = UniquenessVerdict::distinct_maps;
    return rep;
  }
  for (const auto& x : samples) {
    MatrixTuple a, b;
    try {
      a = evaluate_map(f, x);
      b = evaluate_map(g2, x);
    } catch (const EvaluationError&) {
      continue;
    }
    for (std::size_t i = 0; i < f.co_arity(); ++i) {
      const double scale = std::max(1.0, max_abs(a[i]));
      rep.max_deviation = std::max(rep.max_deviation, max_abs_diff(a[i], b[i]) / scale);
    }
    ++rep.samples_compared;
  }
  rep.verdict = rep.max_deviation <= 1e-8 ? UniquenessVerdict::same_map : UniquenessVerdict::mismatch;
  return rep;
}

}  // namespace freemap
