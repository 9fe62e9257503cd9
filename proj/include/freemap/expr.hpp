#pragma once

// Free (non-commutative) expressions in x_1..x_g and their adjoints, and their
// evaluation on matrix tuples. Scalars act as multiples of the identity.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "freemap/linalg.hpp"

namespace freemap {

/// Evaluation of an expression failed at a specific point (singular inverse).
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Expr;

namespace node {
struct Const { cplx value; };
struct Var { std::size_t index; };     // 1-based
struct AdjVar { std::size_t index; };  // 1-based, evaluates to X_j^*
struct Sum { std::vector<Expr> terms; };
struct Prod { std::vector<Expr> factors; };  // ordered, non-commutative
struct Scale { cplx factor; std::vector<Expr> arg; };
struct Inv { std::vector<Expr> arg; };
struct Series { std::vector<cplx> coeffs; std::vector<Expr> arg; };  // sum_k c_k arg^k
}  // namespace node

using Node = std::variant<node::Const, node::Var, node::AdjVar, node::Sum, node::Prod, node::Scale,
                          node::Inv, node::Series>;

/// Immutable, cheaply copyable handle to an expression tree.
class Expr {
 public:
  explicit Expr(Node n) : node_(std::make_shared<const Node>(std::move(n))) {}

  const Node& node() const { return *node_; }

  template <class T>
  const T* as() const { return std::get_if<T>(node_.get()); }

 private:
  std::shared_ptr<const Node> node_;
};

// Single-child nodes store their argument in a one-element vector so the
// variant can hold Expr while Expr is still incomplete.
inline const Expr& child(const node::Scale& s) { return s.arg.front(); }
inline const Expr& child(const node::Inv& s) { return s.arg.front(); }
inline const Expr& child(const node::Series& s) { return s.arg.front(); }

inline Expr constant(cplx c) { return Expr(node::Const{c}); }
inline Expr var(std::size_t j) {
  if (j == 0) throw std::invalid_argument("variable indices start at 1");
  return Expr(node::Var{j});
}
inline Expr adj_var(std::size_t j) {
  if (j == 0) throw std::invalid_argument("variable indices start at 1");
  return Expr(node::AdjVar{j});
}
inline Expr sum(std::vector<Expr> terms) {
  if (terms.empty()) throw std::invalid_argument("empty sum");
  return Expr(node::Sum{std::move(terms)});
}
inline Expr prod(std::vector<Expr> factors) {
  if (factors.empty()) throw std::invalid_argument("empty product");
  return Expr(node::Prod{std::move(factors)});
}
inline Expr scale(cplx c, Expr e) { return Expr(node::Scale{c, {std::move(e)}}); }
inline Expr inv(Expr e) { return Expr(node::Inv{{std::move(e)}}); }
inline Expr series(std::vector<cplx> coeffs, Expr e) {
  if (coeffs.empty()) throw std::invalid_argument("series needs at least one coefficient");
  return Expr(node::Series{std::move(coeffs), {std::move(e)}});
}

inline Expr operator+(Expr a, Expr b) { return sum({std::move(a), std::move(b)}); }
inline Expr operator-(Expr a, Expr b) { return sum({std::move(a), scale(-1.0, std::move(b))}); }
inline Expr operator*(Expr a, Expr b) { return prod({std::move(a), std::move(b)}); }
inline Expr operator*(cplx c, Expr e) { return scale(c, std::move(e)); }

// ---------------------------------------------------------------------------
// Structure queries

inline bool operator==(const Expr& a, const Expr& b);

namespace detail {
inline bool same_list(const std::vector<Expr>& a, const std::vector<Expr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a[i] == b[i])) return false;
  return true;
}
}  // namespace detail

/// Deep structural equality.
inline bool operator==(const Expr& a, const Expr& b) {
  if (&a.node() == &b.node()) return true;
  if (a.node().index() != b.node().index()) return false;
  return std::visit(
      [&](const auto& na) -> bool {
        using T = std::decay_t<decltype(na)>;
        const T& nb = std::get<T>(b.node());
        if constexpr (std::is_same_v<T, node::Const>) return na.value == nb.value;
        else if constexpr (std::is_same_v<T, node::Var> || std::is_same_v<T, node::AdjVar>)
          return na.index == nb.index;
        else if constexpr (std::is_same_v<T, node::Sum>) return detail::same_list(na.terms, nb.terms);
        else if constexpr (std::is_same_v<T, node::Prod>) return detail::same_list(na.factors, nb.factors);
        else if constexpr (std::is_same_v<T, node::Scale>)
          return na.factor == nb.factor && detail::same_list(na.arg, nb.arg);
        else if constexpr (std::is_same_v<T, node::Inv>) return detail::same_list(na.arg, nb.arg);
        else return na.coeffs == nb.coeffs && detail::same_list(na.arg, nb.arg);
      },
      a.node());
}

/// Largest variable index used (0 for constant expressions).
inline std::size_t max_var_index(const Expr& e) {
  return std::visit(
      [](const auto& n) -> std::size_t {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, node::Const>) return 0;
        else if constexpr (std::is_same_v<T, node::Var> || std::is_same_v<T, node::AdjVar>) return n.index;
        else {
          std::size_t m = 0;
          const std::vector<Expr>* kids;
          if constexpr (std::is_same_v<T, node::Sum>) kids = &n.terms;
          else if constexpr (std::is_same_v<T, node::Prod>) kids = &n.factors;
          else kids = &n.arg;
          for (const auto& k : *kids) m = std::max(m, max_var_index(k));
          return m;
        }
      },
      e.node());
}

inline bool uses_adjoint(const Expr& e) {
  return std::visit(
      [](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, node::AdjVar>) return true;
        else if constexpr (std::is_same_v<T, node::Const> || std::is_same_v<T, node::Var>) return false;
        else {
          const std::vector<Expr>* kids;
          if constexpr (std::is_same_v<T, node::Sum>) kids = &n.terms;
          else if constexpr (std::is_same_v<T, node::Prod>) kids = &n.factors;
          else kids = &n.arg;
          return std::any_of(kids->begin(), kids->end(), [](const Expr& k) { return uses_adjoint(k); });
        }
      },
      e.node());
}

inline bool uses_inverse(const Expr& e) {
  return std::visit(
      [](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, node::Inv>) return true;
        else if constexpr (std::is_same_v<T, node::Const> || std::is_same_v<T, node::Var> ||
                           std::is_same_v<T, node::AdjVar>)
          return false;
        else {
          const std::vector<Expr>* kids;
          if constexpr (std::is_same_v<T, node::Sum>) kids = &n.terms;
          else if constexpr (std::is_same_v<T, node::Prod>) kids = &n.factors;
          else kids = &n.arg;
          return std::any_of(kids->begin(), kids->end(), [](const Expr& k) { return uses_inverse(k); });
        }
      },
      e.node());
}

// ---------------------------------------------------------------------------
// Printing. The output is accepted by parse() and reproduces the same tree.

namespace detail {
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace detail

inline std::string format_constant(cplx c) {
  if (c.imag() == 0.0) {
    const std::string re = detail::format_double(c.real());
    return std::signbit(c.real()) ? "(" + re + ")" : re;
  }
  const std::string im = detail::format_double(std::abs(c.imag()));
  return "(" + detail::format_double(c.real()) + (c.imag() < 0 ? "-" : "+") + im + "*i)";
}

inline std::string to_string(const Expr& e) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, node::Const>) return format_constant(n.value);
        else if constexpr (std::is_same_v<T, node::Var>) return "x" + std::to_string(n.index);
        else if constexpr (std::is_same_v<T, node::AdjVar>) return "x" + std::to_string(n.index) + "'";
        else if constexpr (std::is_same_v<T, node::Sum>) {
          std::string s = "(";
          for (std::size_t i = 0; i < n.terms.size(); ++i) s += (i ? " + " : "") + to_string(n.terms[i]);
          return s + ")";
        } else if constexpr (std::is_same_v<T, node::Prod>) {
          std::string s = "(";
          for (std::size_t i = 0; i < n.factors.size(); ++i) s += (i ? "*" : "") + to_string(n.factors[i]);
          return s + ")";
        } else if constexpr (std::is_same_v<T, node::Scale>)
          return "(" + format_constant(n.factor) + "*" + to_string(child(n)) + ")";
        else if constexpr (std::is_same_v<T, node::Inv>) return "inv(" + to_string(child(n)) + ")";
        else {
          std::string s = "series(";
          for (std::size_t i = 0; i < n.coeffs.size(); ++i) s += (i ? ", " : "") + format_constant(n.coeffs[i]);
          return s + "; " + to_string(child(n)) + ")";
        }
      },
      e.node());
}

// ---------------------------------------------------------------------------
// Evaluation

inline Matrix evaluate(const Expr& e, const MatrixTuple& x);

namespace detail {

inline Matrix eval_node(const Expr& e, const MatrixTuple& x) {
  const std::size_t n = x.size();
  return std::visit(
      [&](const auto& nd) -> Matrix {
        using T = std::decay_t<decltype(nd)>;
        if constexpr (std::is_same_v<T, node::Const>) return Matrix::identity(n) * nd.value;
        else if constexpr (std::is_same_v<T, node::Var>) return x[nd.index - 1];
        else if constexpr (std::is_same_v<T, node::AdjVar>) return x[nd.index - 1].adjoint();
        else if constexpr (std::is_same_v<T, node::Sum>) {
          Matrix acc = eval_node(nd.terms.front(), x);
          for (std::size_t i = 1; i < nd.terms.size(); ++i) acc += eval_node(nd.terms[i], x);
          return acc;
        } else if constexpr (std::is_same_v<T, node::Prod>) {
          Matrix acc = eval_node(nd.factors.front(), x);
          for (std::size_t i = 1; i < nd.factors.size(); ++i) acc = acc * eval_node(nd.factors[i], x);
          return acc;
        } else if constexpr (std::is_same_v<T, node::Scale>) return eval_node(child(nd), x) * nd.factor;
        else if constexpr (std::is_same_v<T, node::Inv>) {
          const Matrix m = eval_node(child(nd), x);
          try {
            return inverse(m);
          } catch (const LinalgError&) {
            throw EvaluationError("singular at this point: " + to_string(e));
          }
        } else {
          // Horner: c_0 + a (c_1 + a (c_2 + ...)).
          const Matrix a = eval_node(child(nd), x);
          Matrix acc = Matrix::identity(n) * nd.coeffs.back();
          for (std::size_t k = nd.coeffs.size() - 1; k-- > 0;) {
            acc = a * acc;
            for (std::size_t i = 0; i < n; ++i) acc(i, i) += nd.coeffs[k];
          }
          return acc;
        }
      },
      e.node());
}

}  // namespace detail

/// Canonical substitution X -> e(X). Throws std::invalid_argument on an arity
/// mismatch and EvaluationError when an inv(...) node is singular at x.
inline Matrix evaluate(const Expr& e, const MatrixTuple& x) {
  if (max_var_index(e) > x.arity())
    throw std::invalid_argument("expression uses x" + std::to_string(max_var_index(e)) + " but the tuple has " +
                                std::to_string(x.arity()) + " components");
  return detail::eval_node(e, x);
}

// ---------------------------------------------------------------------------

/// A map f : M(C)^g -> M(C)^h given by h component expressions in g variables.
class FreeMap {
 public:
  FreeMap(std::size_t arity, std::vector<Expr> components) : arity_(arity), comps_(std::move(components)) {
    if (arity_ == 0) throw std::invalid_argument("free map arity must be positive");
    if (comps_.empty()) throw std::invalid_argument("free map needs at least one component");
    for (const auto& c : comps_)
      if (max_var_index(c) > arity_)
        throw std::invalid_argument("component " + to_string(c) + " exceeds arity " + std::to_string(arity_));
  }

  static FreeMap identity(std::size_t g) {
    std::vector<Expr> comps;
    for (std::size_t j = 1; j <= g; ++j) comps.push_back(var(j));
    return FreeMap(g, std::move(comps));
  }

  std::size_t arity() const { return arity_; }
  std::size_t co_arity() const { return comps_.size(); }
  const std::vector<Expr>& components() const { return comps_; }
  const Expr& operator[](std::size_t i) const { return comps_[i]; }

  bool adjoint_free() const {
    return std::none_of(comps_.begin(), comps_.end(), [](const Expr& e) { return uses_adjoint(e); });
  }

 private:
  std::size_t arity_;
  std::vector<Expr> comps_;
};

inline MatrixTuple evaluate_map(const FreeMap& f, const MatrixTuple& x) {
  if (x.arity() != f.arity())
    throw std::invalid_argument("map arity " + std::to_string(f.arity()) + " does not match tuple arity " +
                                std::to_string(x.arity()));
  std::vector<Matrix> out;
  out.reserve(f.co_arity());
  for (const auto& c : f.components()) out.push_back(detail::eval_node(c, x));
  return MatrixTuple(std::move(out));
}

/// The Moebius family e^{it} x (1 + x - e^{it} x)^{-1} in one variable.
inline Expr mobius_expr(double theta) {
  const cplx rot = std::exp(cplx{0.0, theta});
  return scale(rot, prod({var(1), inv(sum({constant(1.0), var(1), scale(-rot, var(1))}))}));
}

inline FreeMap mobius_map(double theta) { return FreeMap(1, {mobius_expr(theta)}); }

}  // namespace freemap
