#pragma once

// Recursive-descent parser for free expressions.
//
//   expr   := term (('+'|'-') term)*
//   term   := '-'? factor ('*' factor)*
//   factor := atom ('^' uint)?
//   atom   := number | 'i' | 'x' uint | 'x' uint "'" | '(' expr ')'
//           | 'inv(' expr ')' | 'exp(' expr ')'
//           | 'series(' expr (',' expr)* ';' expr ')'
//
// Constant subexpressions are folded to a single constant, and constant
// factors of a product are pulled to the front as a scale node. exp() and
// series coefficients must be constant.

#include <cctype>
#include <complex>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "freemap/expr.hpp"

namespace freemap {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

namespace detail {

class Parser {
 public:
  Parser(std::string_view src, std::size_t arity) : src_(src), arity_(arity) {}

  Expr parse_all() {
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  bool accept_word(std::string_view w) {
    skip_ws();
    if (src_.substr(pos_, w.size()) != w) return false;
    const std::size_t end = pos_ + w.size();
    if (end < src_.size() && std::isalnum(static_cast<unsigned char>(src_[end]))) return false;
    pos_ = end;
    return true;
  }

  static const cplx* as_const(const Expr& e) {
    const auto* c = e.as<node::Const>();
    return c ? &c->value : nullptr;
  }

  Expr parse_expr() {
    std::vector<Expr> terms{parse_term()};
    for (;;) {
      if (accept('+')) terms.push_back(parse_term());
      else if (accept('-')) terms.push_back(negate(parse_term()));
      else break;
    }
    if (terms.size() == 1) return terms.front();
    bool all_const = true;
    cplx total = 0.0;
    for (const auto& t : terms) {
      if (const cplx* c = as_const(t)) total += *c;
      else all_const = false;
    }
    return all_const ? constant(total) : sum(std::move(terms));
  }

  static Expr negate(const Expr& t) {
    if (const cplx* c = as_const(t)) return constant(-*c);
    if (const auto* s = t.as<node::Scale>()) return scale(-s->factor, child(*s));
    return scale(-1.0, t);
  }

  Expr parse_term() {
    cplx coeff = 1.0;
    if (accept('-')) coeff = -1.0;
    std::vector<Expr> factors;
    auto take = [&](Expr f) {
      if (const cplx* c = as_const(f)) coeff *= *c;
      else factors.push_back(std::move(f));
    };
    take(parse_factor());
    while (accept('*')) take(parse_factor());
    if (factors.empty()) return constant(coeff);
    Expr base = factors.size() == 1 ? factors.front() : prod(std::move(factors));
    return coeff == cplx{1.0, 0.0} ? base : scale(coeff, base);
  }

  Expr parse_factor() {
    Expr base = parse_atom();
    if (!accept('^')) return base;
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (start == pos_) fail("expected unsigned integer exponent");
    const unsigned long k = std::stoul(std::string(src_.substr(start, pos_ - start)));
    if (k > 64) fail("exponent too large");
    if (const cplx* c = as_const(base)) return constant(std::pow(*c, static_cast<double>(k)));
    if (k == 0) return constant(1.0);
    if (k == 1) return base;
    return prod(std::vector<Expr>(k, base));
  }

  Expr parse_atom() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];

    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return constant(parse_number());
    if (accept('(')) {
      Expr e = parse_expr();
      expect(')');
      return e;
    }
    if (accept_word("inv")) {
      expect('(');
      Expr e = parse_expr();
      expect(')');
      if (const cplx* v = as_const(e)) {
        if (*v == cplx{}) fail("inverse of zero constant");
        return constant(1.0 / *v);
      }
      return inv(e);
    }
    if (accept_word("exp")) {
      const std::size_t at = pos_;
      expect('(');
      Expr e = parse_expr();
      expect(')');
      const cplx* v = as_const(e);
      if (!v) throw ParseError("exp() requires a constant argument", at);
      return constant(std::exp(*v));
    }
    if (accept_word("series")) return parse_series();
    if (accept_word("i")) return constant(cplx{0.0, 1.0});
    if (c == 'x') {
      ++pos_;
      const std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      if (start == pos_) fail("expected variable index after 'x'");
      const std::size_t j = std::stoul(std::string(src_.substr(start, pos_ - start)));
      if (j == 0 || j > arity_) {
        pos_ = start;
        fail("variable index x" + std::to_string(j) + " out of range 1.." + std::to_string(arity_));
      }
      if (pos_ < src_.size() && src_[pos_] == '\'') {
        ++pos_;
        return adj_var(j);
      }
      return var(j);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expr parse_series() {
    expect('(');
    std::vector<cplx> coeffs;
    do {
      const std::size_t at = pos_;
      Expr c = parse_expr();
      const cplx* v = as_const(c);
      if (!v) throw ParseError("series coefficients must be constant", at);
      coeffs.push_back(*v);
    } while (accept(','));
    expect(';');
    Expr arg = parse_expr();
    expect(')');
    if (const cplx* a = as_const(arg)) {
      cplx acc = 0.0;
      for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * *a + coeffs[k];
      return constant(acc);
    }
    return series(std::move(coeffs), arg);
  }

  double parse_number() {
    const std::string tail(src_.substr(pos_));
    char* end = nullptr;
    const double v = std::strtod(tail.c_str(), &end);
    const auto used = static_cast<std::size_t>(end - tail.c_str());
    if (used == 0) fail("malformed number");
    pos_ += used;
    return v;
  }

  std::string_view src_;
  std::size_t arity_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses `src` as an expression in the variables x1..x<arity>.
inline Expr parse(std::string_view src, std::size_t arity) { return detail::Parser(src, arity).parse_all(); }

}  // namespace freemap
