#pragma once

// Minimal expression language for profile specification.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right-associative, exponent must not depend on x
//   primary := number | 'x' | name | func '(' expr ')' | '(' expr ')'
//   func    := exp | sin | cos | tanh | sqrt
//
// `name` is `pi` or a parameter bound at parse time. Evaluation is pure and
// can carry first and second derivatives (forward-mode jets), which is how
// analytic m_x and m_xx are obtained for expression profiles.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>

#include "lagwave/errors.hpp"

namespace lagwave {

/// Value with first and second derivative with respect to x.
struct Jet {
  double v = 0.0;
  double d = 0.0;
  double dd = 0.0;
};

inline Jet operator+(Jet a, Jet b) { return {a.v + b.v, a.d + b.d, a.dd + b.dd}; }
inline Jet operator-(Jet a, Jet b) { return {a.v - b.v, a.d - b.d, a.dd - b.dd}; }
inline Jet operator-(Jet a) { return {-a.v, -a.d, -a.dd}; }
inline Jet operator*(Jet a, Jet b) {
  return {a.v * b.v, a.d * b.v + a.v * b.d, a.dd * b.v + 2.0 * a.d * b.d + a.v * b.dd};
}
// f(g): (f(g))' = f'(g) g', (f(g))'' = f''(g) g'^2 + f'(g) g''
inline Jet chain(Jet g, double f, double f1, double f2) {
  return {f, f1 * g.d, f2 * g.d * g.d + f1 * g.dd};
}
inline Jet operator/(Jet a, Jet b) {
  const double inv = 1.0 / b.v;
  return a * chain(b, inv, -inv * inv, 2.0 * inv * inv * inv);
}

namespace detail {

enum class NodeKind { Number, Var, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Func { Exp, Sin, Cos, Tanh, Sqrt };

struct Node {
  NodeKind kind = NodeKind::Number;
  double value = 0.0;  // Number literal, or exponent for Pow
  Func fn = Func::Exp;
  std::unique_ptr<Node> a;
  std::unique_ptr<Node> b;
};

inline const char* func_name(Func f) {
  switch (f) {
    case Func::Exp: return "exp";
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Tanh: return "tanh";
    case Func::Sqrt: return "sqrt";
  }
  return "?";
}

inline bool depends_on_x(const Node& n) {
  if (n.kind == NodeKind::Var) return true;
  return (n.a && depends_on_x(*n.a)) || (n.b && depends_on_x(*n.b));
}

inline Jet eval(const Node& n, Jet x) {
  switch (n.kind) {
    case NodeKind::Number: return {n.value, 0.0, 0.0};
    case NodeKind::Var: return x;
    case NodeKind::Neg: return -eval(*n.a, x);
    case NodeKind::Add: return eval(*n.a, x) + eval(*n.b, x);
    case NodeKind::Sub: return eval(*n.a, x) - eval(*n.b, x);
    case NodeKind::Mul: return eval(*n.a, x) * eval(*n.b, x);
    case NodeKind::Div: return eval(*n.a, x) / eval(*n.b, x);
    case NodeKind::Pow: {
      const Jet g = eval(*n.a, x);
      const double k = n.value;
      if (k == 0.0) return {1.0, 0.0, 0.0};
      const double f = std::pow(g.v, k);
      // Derivatives written without dividing by g so that integer powers
      // stay finite at g = 0.
      const double f1 = k * std::pow(g.v, k - 1.0);
      const double f2 = k == 1.0 ? 0.0 : k * (k - 1.0) * std::pow(g.v, k - 2.0);
      return chain(g, f, f1, f2);
    }
    case NodeKind::Call: {
      const Jet g = eval(*n.a, x);
      switch (n.fn) {
        case Func::Exp: {
          const double e = std::exp(g.v);
          return chain(g, e, e, e);
        }
        case Func::Sin: {
          const double s = std::sin(g.v), c = std::cos(g.v);
          return chain(g, s, c, -s);
        }
        case Func::Cos: {
          const double s = std::sin(g.v), c = std::cos(g.v);
          return chain(g, c, -s, -c);
        }
        case Func::Tanh: {
          const double t = std::tanh(g.v);
          const double s2 = 1.0 - t * t;
          return chain(g, t, s2, -2.0 * t * s2);
        }
        case Func::Sqrt: {
          const double r = std::sqrt(g.v);
          return chain(g, r, 0.5 / r, -0.25 / (r * g.v));
        }
      }
    }
  }
  return {};
}

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void emit(const Node& n, std::string& out) {
  auto binary = [&](char op) {
    out += '(';
    emit(*n.a, out);
    out += op;
    emit(*n.b, out);
    out += ')';
  };
  switch (n.kind) {
    case NodeKind::Number:
      if (std::signbit(n.value)) {
        out += "(-" + format_number(-n.value) + ")";
      } else {
        out += format_number(n.value);
      }
      return;
    case NodeKind::Var: out += 'x'; return;
    case NodeKind::Neg:
      out += "(-";
      emit(*n.a, out);
      out += ')';
      return;
    case NodeKind::Add: binary('+'); return;
    case NodeKind::Sub: binary('-'); return;
    case NodeKind::Mul: binary('*'); return;
    case NodeKind::Div: binary('/'); return;
    case NodeKind::Pow:
      out += '(';
      emit(*n.a, out);
      out += '^';
      if (std::signbit(n.value)) {
        out += "(-" + format_number(-n.value) + ")";
      } else {
        out += format_number(n.value);
      }
      out += ')';
      return;
    case NodeKind::Call:
      out += func_name(n.fn);
      out += '(';
      emit(*n.a, out);
      out += ')';
      return;
  }
}

class Parser {
public:
  Parser(std::string_view text, const std::map<std::string, double>& params)
      : s_(text), params_(params) {}

  std::unique_ptr<Node> parse() {
    auto root = parse_expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return root;
  }

private:
  [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, pos_); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static std::unique_ptr<Node> make(NodeKind k, std::unique_ptr<Node> a = nullptr,
                                    std::unique_ptr<Node> b = nullptr) {
    auto n = std::make_unique<Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  std::unique_ptr<Node> parse_expr() {
    auto lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = make(NodeKind::Add, std::move(lhs), parse_term());
      } else if (accept('-')) {
        lhs = make(NodeKind::Sub, std::move(lhs), parse_term());
      } else {
        return lhs;
      }
    }
  }

  std::unique_ptr<Node> parse_term() {
    auto lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(NodeKind::Mul, std::move(lhs), parse_unary());
      } else if (accept('/')) {
        lhs = make(NodeKind::Div, std::move(lhs), parse_unary());
      } else {
        return lhs;
      }
    }
  }

  std::unique_ptr<Node> parse_unary() {
    if (accept('-')) return make(NodeKind::Neg, parse_unary());
    return parse_power();
  }

  std::unique_ptr<Node> parse_power() {
    auto base = parse_primary();
    if (accept('^')) {
      const std::size_t at = pos_;
      auto exponent = parse_unary();
      if (depends_on_x(*exponent)) throw ParseError("exponent must not depend on x", at);
      auto n = make(NodeKind::Pow, std::move(base));
      n->value = eval(*exponent, Jet{}).v;
      return n;
    }
    return base;
  }

  std::unique_ptr<Node> parse_primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      auto inner = parse_expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  std::unique_ptr<Node> parse_number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
      ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
      if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
        pos_ = p;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
    }
    const std::string text(s_.substr(start, pos_ - start));
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size()) throw ParseError("malformed number '" + text + "'", start);
    auto n = make(NodeKind::Number);
    n->value = v;
    return n;
  }

  std::unique_ptr<Node> parse_name() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    const std::string name(s_.substr(start, pos_ - start));
    static const std::map<std::string, Func> funcs = {{"exp", Func::Exp},
                                                      {"sin", Func::Sin},
                                                      {"cos", Func::Cos},
                                                      {"tanh", Func::Tanh},
                                                      {"sqrt", Func::Sqrt}};
    if (auto it = funcs.find(name); it != funcs.end()) {
      if (!accept('(')) fail("expected '(' after " + name);
      auto n = make(NodeKind::Call, parse_expr());
      n->fn = it->second;
      if (!accept(')')) fail("expected ')'");
      return n;
    }
    if (name == "x") return make(NodeKind::Var);
    auto n = make(NodeKind::Number);
    if (auto it = params_.find(name); it != params_.end()) {
      n->value = it->second;
    } else if (name == "pi") {
      n->value = std::numbers::pi;
    } else {
      throw UnknownIdentifierError(name, start);
    }
    return n;
  }

  std::string_view s_;
  const std::map<std::string, double>& params_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parsed, immutable function of x. Cheap to copy.
class Expression {
public:
  Expression() : Expression(constant(0.0)) {}

  double operator()(double x) const { return detail::eval(*root_, Jet{x, 1.0, 0.0}).v; }
  Jet jet(double x) const { return detail::eval(*root_, Jet{x, 1.0, 0.0}); }
  bool depends_on_x() const { return detail::depends_on_x(*root_); }

  /// Fully parenthesised text that parses back to the same tree.
  std::string canonical() const {
    std::string out;
    detail::emit(*root_, out);
    return out;
  }

  static Expression constant(double v) {
    auto n = std::make_shared<detail::Node>();
    n->value = v;
    return Expression(std::move(n));
  }

  friend Expression parse_profile(std::string_view, const std::map<std::string, double>&);

private:
  explicit Expression(std::shared_ptr<const detail::Node> root) : root_(std::move(root)) {}
  std::shared_ptr<const detail::Node> root_;
};

inline Expression parse_profile(std::string_view text,
                                const std::map<std::string, double>& params = {}) {
  detail::Parser p(text, params);
  return Expression(std::shared_ptr<const detail::Node>(p.parse()));
}

}  // namespace lagwave
