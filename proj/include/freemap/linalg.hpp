#pragma once

// Dense complex linear algebra used by the rest of the library. Sizes here are
// small (at most a few dozen rows), so everything is a straightforward O(n^3)
// kernel on row-major storage.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace freemap {

using cplx = std::complex<double>;

/// Thrown when a matrix operation is undefined at the given input
/// (singular inverse, non-Hermitian input to a Hermitian routine, ...).
class LinalgError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {}

  Matrix(std::initializer_list<std::initializer_list<cplx>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) throw std::invalid_argument("ragged matrix literal");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static Matrix scalar(cplx c) {
    Matrix m(1, 1);
    m(0, 0) = c;
    return m;
  }

  static Matrix diagonal(const std::vector<cplx>& d) {
    Matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  /// Upper shift: ones on the first superdiagonal. Nilpotent of index n.
  static Matrix shift(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i + 1 < n; ++i) m(i, i + 1) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }
  bool empty() const { return data_.empty(); }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<cplx>& data() const { return data_; }

  Matrix adjoint() const {
    Matrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
  }

  Matrix transpose() const {
    Matrix r(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  /// Copy of the block starting at (r0, c0) with the given shape.
  Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
    if (r0 + nr > rows_ || c0 + nc > cols_) throw std::out_of_range("block outside matrix");
    Matrix r(nr, nc);
    for (std::size_t i = 0; i < nr; ++i)
      for (std::size_t j = 0; j < nc; ++j) r(i, j) = (*this)(r0 + i, c0 + j);
    return r;
  }

  void set_block(std::size_t r0, std::size_t c0, const Matrix& b) {
    if (r0 + b.rows_ > rows_ || c0 + b.cols_ > cols_) throw std::out_of_range("block outside matrix");
    for (std::size_t i = 0; i < b.rows_; ++i)
      for (std::size_t j = 0; j < b.cols_; ++j) (*this)(r0 + i, c0 + j) = b(i, j);
  }

  Matrix& operator+=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  Matrix& operator*=(cplx c) {
    for (auto& v : data_) v *= c;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, cplx c) { return a *= c; }
  friend Matrix operator*(cplx c, Matrix a) { return a *= c; }
  friend Matrix operator-(Matrix a) { return a *= -1.0; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_)
      throw std::invalid_argument("matrix product shape mismatch: " + a.shape() + " * " + b.shape());
    Matrix r(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx{}) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) r(i, j) += aik * b(k, j);
      }
    return r;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  std::string shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

 private:
  void check_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw std::invalid_argument("shape mismatch: " + shape() + " vs " + o.shape());
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

/// A point X = (X_1, ..., X_g) with every component n x n.
class MatrixTuple {
 public:
  MatrixTuple() = default;
  explicit MatrixTuple(std::vector<Matrix> components) : comps_(std::move(components)) {
    if (comps_.empty()) throw std::invalid_argument("matrix tuple needs at least one component");
    const std::size_t n = comps_.front().rows();
    for (const auto& c : comps_)
      if (!c.square() || c.rows() != n)
        throw std::invalid_argument("tuple components must all be square of equal size");
  }
  MatrixTuple(std::initializer_list<Matrix> components)
      : MatrixTuple(std::vector<Matrix>(components)) {}

  static MatrixTuple zeros(std::size_t g, std::size_t n) {
    return MatrixTuple(std::vector<Matrix>(g, Matrix(n, n)));
  }

  std::size_t arity() const { return comps_.size(); }
  std::size_t size() const { return comps_.empty() ? 0 : comps_.front().rows(); }

  const Matrix& operator[](std::size_t j) const { return comps_[j]; }
  Matrix& operator[](std::size_t j) { return comps_[j]; }
  const std::vector<Matrix>& components() const { return comps_; }

  auto begin() const { return comps_.begin(); }
  auto end() const { return comps_.end(); }

  friend MatrixTuple operator*(cplx c, MatrixTuple x) {
    for (auto& m : x.comps_) m *= c;
    return x;
  }
  friend MatrixTuple operator+(MatrixTuple a, const MatrixTuple& b) {
    if (a.arity() != b.arity()) throw std::invalid_argument("tuple arity mismatch");
    for (std::size_t j = 0; j < a.arity(); ++j) a.comps_[j] += b.comps_[j];
    return a;
  }
  friend MatrixTuple operator-(MatrixTuple a, const MatrixTuple& b) {
    if (a.arity() != b.arity()) throw std::invalid_argument("tuple arity mismatch");
    for (std::size_t j = 0; j < a.arity(); ++j) a.comps_[j] -= b.comps_[j];
    return a;
  }
  friend bool operator==(const MatrixTuple& a, const MatrixTuple& b) { return a.comps_ == b.comps_; }

 private:
  std::vector<Matrix> comps_;
};

// ---------------------------------------------------------------------------
// Elementary constructions

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix r(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const cplx aij = a(i, j);
      if (aij == cplx{}) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l) r(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return r;
}

/// Block diagonal a (+) b.
inline Matrix direct_sum(const Matrix& a, const Matrix& b) {
  Matrix r(a.rows() + b.rows(), a.cols() + b.cols());
  r.set_block(0, 0, a);
  r.set_block(a.rows(), a.cols(), b);
  return r;
}

inline MatrixTuple direct_sum(const MatrixTuple& x, const MatrixTuple& y) {
  if (x.arity() != y.arity()) throw std::invalid_argument("tuple arity mismatch in direct sum");
  std::vector<Matrix> comps;
  comps.reserve(x.arity());
  for (std::size_t j = 0; j < x.arity(); ++j) comps.push_back(direct_sum(x[j], y[j]));
  return MatrixTuple(std::move(comps));
}

/// [[a, b], [0, c]] for square a, c.
inline Matrix upper_block(const Matrix& a, const Matrix& b, const Matrix& c) {
  if (b.rows() != a.rows() || b.cols() != c.cols())
    throw std::invalid_argument("upper_block: corner shape mismatch");
  Matrix r = direct_sum(a, c);
  r.set_block(0, a.cols(), b);
  return r;
}

inline Matrix power(const Matrix& m, unsigned k) {
  if (!m.square()) throw std::invalid_argument("power of non-square matrix");
  Matrix r = Matrix::identity(m.rows());
  for (unsigned i = 0; i < k; ++i) r = r * m;
  return r;
}

inline double frobenius_norm(const Matrix& m) {
  double s = 0.0;
  for (const auto& v : m.data()) s += std::norm(v);
  return std::sqrt(s);
}

inline double max_abs(const Matrix& m) {
  double s = 0.0;
  for (const auto& v : m.data()) s = std::max(s, std::abs(v));
  return s;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return max_abs(a - b); }

inline bool is_hermitian(const Matrix& m, double rel_tol = 1e-10) {
  if (!m.square()) return false;
  const double tol = rel_tol * std::max(frobenius_norm(m), 1e-14);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j)
      if (std::abs(m(i, j) - std::conj(m(j, i))) > tol) return false;
  return true;
}

inline Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

// ---------------------------------------------------------------------------
// Hermitian eigenproblem: cyclic complex Jacobi.

struct HermitianEigen {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column k pairs with values[k]
};

namespace detail {

// Applies the unitary rotation J acting on coordinates p, q:
//   J(p,p)=c, J(p,q)=s, J(q,p)=-s*conj(ph), J(q,q)=c*conj(ph)
// as a <- J^H a J, and v <- v J.
inline void jacobi_rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q, double c, double s, cplx ph) {
  const std::size_t n = a.rows();
  const cplx jpp = c, jpq = s, jqp = -s * std::conj(ph), jqq = c * std::conj(ph);
  for (std::size_t k = 0; k < n; ++k) {
    const cplx akp = a(k, p), akq = a(k, q);
    a(k, p) = akp * jpp + akq * jqp;
    a(k, q) = akp * jpq + akq * jqq;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const cplx apk = a(p, k), aqk = a(q, k);
    a(p, k) = std::conj(jpp) * apk + std::conj(jqp) * aqk;
    a(q, k) = std::conj(jpq) * apk + std::conj(jqq) * aqk;
  }
  for (std::size_t k = 0; k < v.rows(); ++k) {
    const cplx vkp = v(k, p), vkq = v(k, q);
    v(k, p) = vkp * jpp + vkq * jqp;
    v(k, q) = vkp * jpq + vkq * jqq;
  }
}

}  // namespace detail

/// Eigen-decomposition of a Hermitian matrix. The input is symmetrized first;
/// inputs further than 1e-10*||m|| from Hermitian are rejected.
inline HermitianEigen hermitian_eigen(const Matrix& m) {
  if (!m.square()) throw LinalgError("hermitian_eigen: non-square input " + m.shape());
  if (!is_hermitian(m)) throw LinalgError("hermitian_eigen: input is not Hermitian");
  const std::size_t n = m.rows();
  Matrix a = hermitian_part(m);
  Matrix v = Matrix::identity(n);
  const double scale = std::max(frobenius_norm(a), 1e-300);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(off) <= 1e-16 * scale) break;

    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double mag = std::abs(a(p, q));
        if (mag <= 1e-300) continue;
        const cplx ph = a(p, q) / mag;
        const double app = a(p, p).real(), aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * mag);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        detail::jacobi_rotate(a, v, p, q, c, t * c, ph);
        a(p, q) = 0.0;
        a(q, p) = 0.0;
      }
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  HermitianEigen out;
  out.values.reserve(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values.push_back(a(order[k], order[k]).real());
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

inline std::vector<double> hermitian_eigenvalues(const Matrix& m) { return hermitian_eigen(m).values; }

inline double min_eigenvalue(const Matrix& m) { return hermitian_eigenvalues(m).front(); }

/// Positive-definiteness by Cholesky: every pivot must exceed 1e-12*||m||_F.
inline bool cholesky_pd(const Matrix& m) {
  if (!m.square()) throw LinalgError("cholesky_pd: non-square input " + m.shape());
  const std::size_t n = m.rows();
  const double floor = 1e-12 * std::max(frobenius_norm(m), 1e-14);
  Matrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = m(j, j).real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
    if (!(d > floor)) return false;
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      cplx s = 0.5 * (m(i, j) + std::conj(m(j, i)));
      for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
      l(i, j) = s / ljj;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Inverse via LU with partial pivoting.

inline Matrix inverse(const Matrix& m) {
  if (!m.square()) throw LinalgError("inverse: non-square input " + m.shape());
  const std::size_t n = m.rows();
  Matrix lu = m;
  Matrix inv = Matrix::identity(n);
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t i = col + 1; i < n; ++i)
      if (std::abs(lu(i, col)) > std::abs(lu(piv, col))) piv = i;
    if (std::abs(lu(piv, col)) < 1e-300) throw LinalgError("not invertible at this point");
    if (piv != col)
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(lu(piv, j), lu(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    const cplx d = lu(col, col);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col) continue;
      const cplx factor = lu(i, col) / d;
      if (factor == cplx{}) continue;
      for (std::size_t j = 0; j < n; ++j) {
        lu(i, j) -= factor * lu(col, j);
        inv(i, j) -= factor * inv(col, j);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const cplx d = lu(i, i);
    for (std::size_t j = 0; j < n; ++j) inv(i, j) /= d;
  }
  // Frobenius condition number bounds cond_2 from above (within a factor n).
  if (frobenius_norm(m) * frobenius_norm(inv) > 1e12) throw LinalgError("not invertible at this point");
  return inv;
}

// ---------------------------------------------------------------------------
// Singular values: one-sided Jacobi on the columns.

inline std::vector<double> singular_values(const Matrix& m) {
  Matrix a = m.rows() >= m.cols() ? m : m.adjoint();
  const std::size_t rows = a.rows(), cols = a.cols();
  for (int sweep = 0; sweep < 80; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p < cols; ++p)
      for (std::size_t q = p + 1; q < cols; ++q) {
        double alpha = 0.0, beta = 0.0;
        cplx gamma = 0.0;
        for (std::size_t k = 0; k < rows; ++k) {
          alpha += std::norm(a(k, p));
          beta += std::norm(a(k, q));
          gamma += std::conj(a(k, p)) * a(k, q);
        }
        const double mag = std::abs(gamma);
        if (mag <= 1e-15 * std::sqrt(alpha * beta) || mag < 1e-300) continue;
        rotated = true;
        const cplx ph = gamma / mag;
        const double zeta = (beta - alpha) / (2.0 * mag);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t k = 0; k < rows; ++k) {
          const cplx ap = a(k, p), aq = a(k, q);
          a(k, p) = c * ap - s * std::conj(ph) * aq;
          a(k, q) = s * ph * ap + c * aq;
        }
      }
    if (!rotated) break;
  }
  std::vector<double> sv(cols);
  for (std::size_t j = 0; j < cols; ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < rows; ++k) s += std::norm(a(k, j));
    sv[j] = std::sqrt(s);
  }
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

inline double operator_norm(const Matrix& m) {
  if (m.empty()) return 0.0;
  return singular_values(m).front();
}

/// Largest component operator norm of a tuple.
inline double operator_norm(const MatrixTuple& x) {
  double s = 0.0;
  for (const auto& c : x) s = std::max(s, operator_norm(c));
  return s;
}

// ---------------------------------------------------------------------------
// General (non-Hermitian) eigenvalues: Householder reduction to Hessenberg
// form, then complex single-shift QR with Wilkinson shifts and deflation.

inline std::vector<cplx> eigenvalues(const Matrix& m) {
  if (!m.square()) throw LinalgError("eigenvalues: non-square input " + m.shape());
  const std::size_t n = m.rows();
  Matrix h = m;

  for (std::size_t k = 0; k + 2 < n; ++k) {
    double alpha = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) alpha += std::norm(h(i, k));
    alpha = std::sqrt(alpha);
    if (alpha < 1e-300) continue;
    const cplx x0 = h(k + 1, k);
    const cplx phase = std::abs(x0) > 0 ? x0 / std::abs(x0) : cplx{1.0, 0.0};
    std::vector<cplx> v(n, 0.0);
    v[k + 1] = x0 + phase * alpha;
    for (std::size_t i = k + 2; i < n; ++i) v[i] = h(i, k);
    double vnorm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vnorm += std::norm(v[i]);
    if (vnorm < 1e-300) continue;
    // h <- (I - 2 v v^H / |v|^2) h (I - 2 v v^H / |v|^2)
    for (std::size_t j = 0; j < n; ++j) {
      cplx s = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) s += std::conj(v[i]) * h(i, j);
      s *= 2.0 / vnorm;
      for (std::size_t i = k + 1; i < n; ++i) h(i, j) -= v[i] * s;
    }
    for (std::size_t i = 0; i < n; ++i) {
      cplx s = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) s += h(i, j) * v[j];
      s *= 2.0 / vnorm;
      for (std::size_t j = k + 1; j < n; ++j) h(i, j) -= s * std::conj(v[j]);
    }
    for (std::size_t i = k + 2; i < n; ++i) h(i, k) = 0.0;
  }

  std::vector<cplx> out;
  out.reserve(n);
  const double scale = std::max(frobenius_norm(h), 1e-300);
  std::size_t hi = n;
  int iter = 0;
  while (hi > 0) {
    if (hi == 1) {
      out.push_back(h(0, 0));
      hi = 0;
      break;
    }
    // Find the start of the trailing unreduced block.
    std::size_t lo = hi - 1;
    while (lo > 0) {
      const double sub = std::abs(h(lo, lo - 1));
      const double diag = std::abs(h(lo, lo)) + std::abs(h(lo - 1, lo - 1));
      if (sub <= 1e-15 * (diag > 0 ? diag : scale)) {
        h(lo, lo - 1) = 0.0;
        break;
      }
      --lo;
    }
    if (lo == hi - 1) {
      out.push_back(h(hi - 1, hi - 1));
      --hi;
      iter = 0;
      continue;
    }
    if (++iter > 1000) throw LinalgError("eigenvalues: QR iteration did not converge");

    const cplx a = h(hi - 2, hi - 2), b = h(hi - 2, hi - 1), c = h(hi - 1, hi - 2), d = h(hi - 1, hi - 1);
    cplx mu;
    if (iter % 11 == 10) {
      mu = d + std::abs(h(hi - 1, hi - 2)) * cplx{0.75, 0.43};  // exceptional shift
    } else {
      const cplx tr = a + d, det = a * d - b * c;
      const cplx disc = std::sqrt(tr * tr * 0.25 - det);
      const cplx l1 = tr * 0.5 + disc, l2 = tr * 0.5 - disc;
      mu = std::abs(l1 - d) < std::abs(l2 - d) ? l1 : l2;
    }

    std::vector<std::pair<double, cplx>> rots;  // (c, s) for each Givens step
    rots.reserve(hi - lo);
    for (std::size_t k = lo; k < hi; ++k) h(k, k) -= mu;
    for (std::size_t k = lo; k + 1 < hi; ++k) {
      const cplx x = h(k, k), y = h(k + 1, k);
      const double r = std::hypot(std::abs(x), std::abs(y));
      double cs = 1.0;
      cplx sn = 0.0;
      if (r > 0) {
        cs = std::abs(x) / r;
        const cplx ph = std::abs(x) > 0 ? x / std::abs(x) : cplx{1.0, 0.0};
        sn = ph * std::conj(y) / r;
      }
      rots.emplace_back(cs, sn);
      // Rows k, k+1: [c, s; -conj(s), c]
      for (std::size_t j = k; j < n; ++j) {
        const cplx u = h(k, j), w = h(k + 1, j);
        h(k, j) = cs * u + sn * w;
        h(k + 1, j) = -std::conj(sn) * u + cs * w;
      }
    }
    for (std::size_t k = lo; k + 1 < hi; ++k) {
      const auto [cs, sn] = rots[k - lo];
      // Columns k, k+1 multiplied by the adjoint rotation.
      for (std::size_t i = 0; i <= std::min(k + 2, hi - 1); ++i) {
        const cplx u = h(i, k), w = h(i, k + 1);
        h(i, k) = cs * u + std::conj(sn) * w;
        h(i, k + 1) = -sn * u + cs * w;
      }
    }
    for (std::size_t k = lo; k < hi; ++k) h(k, k) += mu;
  }
  return out;
}

}  // namespace freemap
