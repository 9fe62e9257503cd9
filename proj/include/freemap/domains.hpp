#pragma once

// Non-commutative domains given by a positivity condition on a defining
// matrix: eps-neighborhoods of 0, LMI domains of truly linear pencils, and
// domains cut out by I + q(X) + q(X)^* > 0 for a matrix-valued expression q.

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "freemap/expr.hpp"
#include "freemap/linalg.hpp"

namespace freemap {

/// L(x) = sum_j A_j x_j with d x d coefficients. The associated LMI is
/// I + sum A_j (x) X_j + sum A_j^* (x) X_j^* > 0.
class Pencil {
 public:
  explicit Pencil(std::vector<Matrix> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw std::invalid_argument("pencil needs at least one coefficient");
    const std::size_t d = coeffs_.front().rows();
    for (const auto& a : coeffs_)
      if (!a.square() || a.rows() != d) throw std::invalid_argument("pencil coefficients must be d x d");
  }

  std::size_t d() const { return coeffs_.front().rows(); }
  std::size_t g() const { return coeffs_.size(); }
  const std::vector<Matrix>& coeffs() const { return coeffs_; }

  /// I_{dn} + sum A_j (x) X_j + A_j^* (x) X_j^*.
  Matrix lmi(const MatrixTuple& x) const {
    if (x.arity() != g())
      throw std::invalid_argument("pencil has " + std::to_string(g()) + " variables, tuple has " +
                                  std::to_string(x.arity()));
    Matrix m = Matrix::identity(d() * x.size());
    for (std::size_t j = 0; j < g(); ++j) {
      m += kron(coeffs_[j], x[j]);
      m += kron(coeffs_[j].adjoint(), x[j].adjoint());
    }
    return m;
  }

 private:
  std::vector<Matrix> coeffs_;
};

struct EpsNeighborhood {
  std::size_t g;
  double eps;
};

/// r x r matrix-valued expression q with q(0) = 0.
struct PolynomialDomain {
  std::size_t g;
  std::vector<std::vector<Expr>> q;  // q[i][j]
};

enum class Location { inside, boundary, outside };

inline const char* to_string(Location l) {
  switch (l) {
    case Location::inside: return "inside";
    case Location::boundary: return "boundary";
    case Location::outside: return "outside";
  }
  return "?";
}

class NCDomain {
 public:
  using Variant = std::variant<EpsNeighborhood, Pencil, PolynomialDomain>;

  static NCDomain eps_neighborhood(std::size_t g, double eps) {
    if (g == 0) throw std::invalid_argument("eps-neighborhood needs g >= 1");
    if (!(eps > 0.0)) throw std::invalid_argument("eps-neighborhood needs eps > 0");
    return NCDomain(EpsNeighborhood{g, eps});
  }

  static NCDomain pencil(Pencil p) { return NCDomain(std::move(p)); }

  static NCDomain polynomial(std::size_t g, std::vector<std::vector<Expr>> q) {
    const std::size_t r = q.size();
    if (r == 0) throw std::invalid_argument("polynomial domain needs a nonempty q");
    for (const auto& row : q) {
      if (row.size() != r) throw std::invalid_argument("polynomial domain q must be square");
      for (const auto& e : row)
        if (max_var_index(e) > g) throw std::invalid_argument("q entry " + to_string(e) + " exceeds arity");
    }
    const MatrixTuple zero = MatrixTuple::zeros(g, 1);
    for (const auto& row : q)
      for (const auto& e : row)
        if (std::abs(evaluate(e, zero)(0, 0)) > 1e-14)
          throw std::invalid_argument("polynomial domain requires q(0) = 0; entry " + to_string(e) + " is not");
    return NCDomain(PolynomialDomain{g, std::move(q)});
  }

  std::size_t arity() const {
    return std::visit(
        [](const auto& v) -> std::size_t {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, Pencil>) return v.g();
          else return v.g;
        },
        v_);
  }

  const Variant& variant() const { return v_; }

  /// eps: eps^2 I - sum X_j X_j^*; pencil: the LMI matrix; polynomial:
  /// I + q(X) + q(X)^*.
  Matrix defining_matrix(const MatrixTuple& x) const {
    if (x.arity() != arity())
      throw std::invalid_argument("domain has " + std::to_string(arity()) + " variables, tuple has " +
                                  std::to_string(x.arity()));
    return std::visit(
        [&](const auto& v) -> Matrix {
          using T = std::decay_t<decltype(v)>;
          const std::size_t n = x.size();
          if constexpr (std::is_same_v<T, EpsNeighborhood>) {
            Matrix m = Matrix::identity(n) * (v.eps * v.eps);
            for (const auto& xj : x) m -= xj * xj.adjoint();
            return m;
          } else if constexpr (std::is_same_v<T, Pencil>) {
            return v.lmi(x);
          } else {
            const std::size_t r = v.q.size();
            Matrix qx(r * n, r * n);
            for (std::size_t i = 0; i < r; ++i)
              for (std::size_t j = 0; j < r; ++j) qx.set_block(i * n, j * n, evaluate(v.q[i][j], x));
            return Matrix::identity(r * n) + qx + qx.adjoint();
          }
        },
        v_);
  }

  /// Minimum eigenvalue of the defining matrix: positive inside, zero on the
  /// boundary, negative outside. A spectral gap, not a metric distance.
  double boundary_distance(const MatrixTuple& x) const { return min_eigenvalue(defining_matrix(x)); }

  /// Positive definite at x and along the segment t*x, t = k/64. The segment
  /// test stands in for "the connected component containing 0".
  bool is_member(const MatrixTuple& x) const {
    if (!cholesky_pd(defining_matrix(x))) return false;
    return segment_positive(x);
  }

  /// Three-valued classification with pivot floor 1e-12 * ||defining matrix||.
  Location classify(const MatrixTuple& x) const {
    const Matrix m = defining_matrix(x);
    const double gap = min_eigenvalue(m);
    const double floor = 1e-12 * std::max(frobenius_norm(m), 1e-14);
    if (std::abs(gap) <= floor) return Location::boundary;
    if (gap < 0) return Location::outside;
    return segment_positive(x) ? Location::inside : Location::outside;
  }

 private:
  explicit NCDomain(Variant v) : v_(std::move(v)) {}

  bool segment_positive(const MatrixTuple& x) const {
    constexpr int steps = 64;
    for (int k = 1; k < steps; ++k) {
      try {
        if (!cholesky_pd(defining_matrix(cplx{static_cast<double>(k) / steps, 0.0} * x))) return false;
      } catch (const EvaluationError&) {
        return false;
      }
    }
    return true;
  }

  Variant v_;
};

/// Pencil whose LMI domain is the eps-neighborhood: the coefficients put
/// X_1/eps, ..., X_g/eps in the last block row, so positivity is equivalent to
/// sum X_j X_j^* < eps^2.
inline Pencil eps_neighborhood_pencil(std::size_t g, double eps) {
  if (g == 0 || !(eps > 0.0)) throw std::invalid_argument("eps_neighborhood_pencil needs g >= 1, eps > 0");
  std::vector<Matrix> coeffs;
  for (std::size_t j = 0; j < g; ++j) {
    Matrix a(g + 1, g + 1);
    a(g, j) = 1.0 / eps;
    coeffs.push_back(std::move(a));
  }
  return Pencil(std::move(coeffs));
}

/// The one-variable pencil A = [[1, 1], [0, 0]], whose domain is
/// ||X - 1|| < sqrt(2).
inline Pencil disk_pencil() { return Pencil({Matrix{{1.0, 1.0}, {0.0, 0.0}}}); }

struct BoundednessReport {
  double bound = 0.0;
  std::size_t checked = 0;
  std::size_t skipped = 0;            // samples outside the domain
  std::vector<std::size_t> failures;  // sample indices violating C^2 - sum X X^* > 0
  bool passed() const { return failures.empty(); }
};

/// Sampling evidence (not a proof) that C^2 I - sum X_j X_j^* > 0 on the
/// domain. Non-member samples are skipped.
inline BoundednessReport boundedness_certificate(const NCDomain& dom, double c,
                                                 const std::vector<MatrixTuple>& samples) {
  if (!(c > 0.0)) throw std::invalid_argument("boundedness_certificate needs C > 0");
  BoundednessReport rep;
  rep.bound = c;
  const NCDomain ball = NCDomain::eps_neighborhood(dom.arity(), c);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!dom.is_member(samples[i])) {
      ++rep.skipped;
      continue;
    }
    ++rep.checked;
    if (!cholesky_pd(ball.defining_matrix(samples[i]))) rep.failures.push_back(i);
  }
  return rep;
}

}  // namespace freemap
