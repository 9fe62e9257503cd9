#pragma once

// Seeded sampling of matrices, tuples and free polynomials.
//
// The bit stream is std::mt19937_64 (fully specified by the C++ standard).
// Uniform doubles take the top 53 bits; normals use Box-Muller with the
// cosine branch only. Nothing here goes through <random> distributions, whose
// output differs between standard library implementations.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "freemap/expr.hpp"
#include "freemap/linalg.hpp"

namespace freemap {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi].
  int integer(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(engine_() % span);
  }

  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  cplx complex_normal() { return {normal() / std::numbers::sqrt2, normal() / std::numbers::sqrt2}; }

 private:
  std::mt19937_64 engine_;
};

/// Entries i.i.d. standard complex normal.
inline Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = rng.complex_normal();
  return m;
}

/// Random matrix rescaled to the given operator norm.
inline Matrix random_matrix_with_norm(Rng& rng, std::size_t n, double norm) {
  Matrix m = random_matrix(rng, n, n);
  const double s = operator_norm(m);
  return m * cplx{norm / s, 0.0};
}

inline MatrixTuple random_tuple(Rng& rng, std::size_t g, std::size_t n, double norm = 1.0) {
  std::vector<Matrix> comps;
  comps.reserve(g);
  for (std::size_t j = 0; j < g; ++j) comps.push_back(random_matrix_with_norm(rng, n, norm));
  return MatrixTuple(std::move(comps));
}

/// Unitary from modified Gram-Schmidt on a random complex Gaussian matrix.
inline Matrix random_unitary(Rng& rng, std::size_t n) {
  Matrix q = random_matrix(rng, n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      cplx dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += std::conj(q(i, k)) * q(i, j);
      for (std::size_t i = 0; i < n; ++i) q(i, j) -= dot * q(i, k);
    }
    double nrm = 0.0;
    for (std::size_t i = 0; i < n; ++i) nrm += std::norm(q(i, j));
    nrm = std::sqrt(nrm);
    for (std::size_t i = 0; i < n; ++i) q(i, j) /= nrm;
  }
  return q;
}

/// Invertible matrix with condition number at most `cond`: U diag(s) V^H with
/// singular values spread over [1, cond].
inline Matrix random_well_conditioned(Rng& rng, std::size_t n, double cond) {
  std::vector<cplx> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = 1.0 + (cond - 1.0) * rng.uniform();
  return random_unitary(rng, n) * Matrix::diagonal(s) * random_unitary(rng, n).adjoint();
}

/// Random free polynomial in x_1..x_g: `terms` monomials, each a word of
/// length 1..max_degree with a complex normal coefficient divided by `terms`.
/// With `constant_term` a degree-0 term is added in front.
inline Expr random_polynomial(Rng& rng, std::size_t g, int max_degree, int terms, bool constant_term = false) {
  std::vector<Expr> parts;
  if (constant_term) parts.push_back(constant(rng.complex_normal()));
  for (int t = 0; t < terms; ++t) {
    const int len = rng.integer(1, max_degree);
    std::vector<Expr> word;
    for (int k = 0; k < len; ++k) word.push_back(var(static_cast<std::size_t>(rng.integer(1, static_cast<int>(g)))));
    Expr w = word.size() == 1 ? word.front() : prod(std::move(word));
    parts.push_back(scale(rng.complex_normal() / static_cast<double>(terms), std::move(w)));
  }
  return parts.size() == 1 ? parts.front() : sum(std::move(parts));
}

/// g components, each a random polynomial with zero constant term plus a
/// linear part sum_j L_ij x_j, so f(0) = 0 and f'(0) = L is generic.
inline FreeMap random_self_map(Rng& rng, std::size_t g, int max_degree, int terms) {
  std::vector<Expr> comps;
  for (std::size_t i = 0; i < g; ++i) {
    std::vector<Expr> parts;
    for (std::size_t j = 1; j <= g; ++j) parts.push_back(scale(rng.complex_normal(), var(j)));
    if (max_degree >= 2) {
      Expr higher = random_polynomial(rng, g, max_degree, terms);
      parts.push_back(std::move(higher));
    }
    comps.push_back(sum(std::move(parts)));
  }
  return FreeMap(g, std::move(comps));
}

}  // namespace freemap
