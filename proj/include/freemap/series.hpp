#pragma once

// Univariate power series: Taylor coefficients of a scalar analytic function
// from samples on a circle, and exact evaluation on nilpotent matrices.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "freemap/linalg.hpp"

namespace freemap {

/// Taylor coefficients c_0..c_order of `fn` at 0 by the trapezoid rule on the
/// Cauchy integral over |z| = radius:
///
///   c_k = (1/M) sum_m fn(r w^m) w^{-km} / r^k,   w = exp(2 pi i / M),
///
/// with M = max(64, 8 * order) samples. For fn analytic on |z| < R the
/// aliasing error in c_k is O((radius/R)^M).
inline std::vector<cplx> series_from_samples(const std::function<cplx(cplx)>& fn, double radius,
                                             std::size_t order) {
  if (!(radius > 0.0)) throw std::invalid_argument("series_from_samples: radius must be positive");
  const std::size_t m_samples = std::max<std::size_t>(64, 8 * order);
  std::vector<cplx> samples(m_samples);
  for (std::size_t m = 0; m < m_samples; ++m) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(m_samples);
    samples[m] = fn(std::polar(radius, angle));
  }
  std::vector<cplx> coeffs(order + 1);
  for (std::size_t k = 0; k <= order; ++k) {
    cplx acc = 0.0;
    for (std::size_t m = 0; m < m_samples; ++m) {
      // Reduce k*m mod M before forming the angle to keep the twiddles exact.
      const std::size_t km = (k * m) % m_samples;
      const double angle = -2.0 * std::numbers::pi * static_cast<double>(km) / static_cast<double>(m_samples);
      acc += samples[m] * std::polar(1.0, angle);
    }
    coeffs[k] = acc / (static_cast<double>(m_samples) * std::pow(radius, static_cast<double>(k)));
  }
  return coeffs;
}

/// Smallest k with ||N^k|| <= 1e-12 * max(1, ||N||), or 0 if N is not nilpotent.
inline std::size_t nilpotency_index(const Matrix& n) {
  if (!n.square()) throw std::invalid_argument("nilpotency_index: non-square matrix");
  const double tol = 1e-12 * std::max(1.0, max_abs(n));
  Matrix p = Matrix::identity(n.rows());
  for (std::size_t k = 1; k <= n.rows() + 1; ++k) {
    p = p * n;
    if (max_abs(p) <= tol) return k;
  }
  return 0;
}

/// sum_{j<k} c_j scale^j N^j for nilpotent N with N^k = 0. Terms past k-1
/// vanish identically, so the result is the exact value of the full series.
/// Missing coefficients are treated as zero.
inline Matrix evaluate_on_nilpotent(const std::vector<cplx>& coeffs, cplx scale, const Matrix& n) {
  const std::size_t k = nilpotency_index(n);
  if (k == 0) throw std::invalid_argument("evaluate_on_nilpotent: matrix is not nilpotent to tolerance");
  const Matrix a = n * scale;
  Matrix result(n.rows(), n.cols());
  Matrix p = Matrix::identity(n.rows());
  for (std::size_t j = 0; j < std::min(k, coeffs.size()); ++j) {
    if (j > 0) p = p * a;
    result += p * coeffs[j];
  }
  return result;
}

}  // namespace freemap
