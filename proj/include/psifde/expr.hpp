#ifndef PSIFDE_EXPR_HPP
#define PSIFDE_EXPR_HPP

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

/*
 * A small expression language for problem data (f(t,y), Psi(t),
 * candidate lower/upper solutions) so configs need no recompilation.
 *
 * Grammar (EBNF, also documented in the README):
 *
 *   expr    = term { ("+" | "-") term } ;
 *   term    = unary { ("*" | "/") unary } ;
 *   unary   = "-" unary | power ;
 *   power   = primary [ "^" unary ] ;          (* right associative *)
 *   primary = number | "t" | "y" | "pi" | "e"
 *           | ident "(" expr { "," expr } ")"
 *           | "(" expr ")" ;
 *
 * Functions: sin cos sqrt exp ln abs erf (unary), pow (binary).
 * "^" binds tighter than unary minus, so -2^2 = -(2^2).
 */

namespace psifde::expr {

struct ParseError : std::runtime_error {
  std::size_t offset;
  ParseError(std::size_t off, const std::string& msg)
      : std::runtime_error(msg + " (at byte " + std::to_string(off) + ")"), offset(off) {}
};

struct EvalError : std::runtime_error {
  std::size_t offset;
  EvalError(std::size_t off, const std::string& msg)
      : std::runtime_error(msg + " (at byte " + std::to_string(off) + ")"), offset(off) {}
};

enum class Kind { number, var_t, var_y, const_pi, const_e, neg, add, sub, mul, div, pow, call };
enum class Func { sin, cos, sqrt, exp, ln, abs, erf, pow };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Kind kind;
  std::size_t pos = 0;
  double value = 0.0;  // Kind::number
  Func func = Func::sin;
  NodePtr a, b;
};

namespace detail {

struct Token {
  enum class Type { number, ident, op, end } type;
  std::size_t pos;
  double value = 0.0;
  std::string text;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) { advance(); }
  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
    tok_.pos = i_;
    if (i_ >= src_.size()) {
      tok_.type = Token::Type::end;
      tok_.text.clear();
      return;
    }
    const char c = src_[i_];
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_ + 1])))) {
      std::size_t j = i_;
      while (j < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[j])) || src_[j] == '.'))
        ++j;
      if (j < src_.size() && (src_[j] == 'e' || src_[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src_.size() && (src_[k] == '+' || src_[k] == '-')) ++k;
        if (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) {
          ++k;
          while (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) ++k;
          j = k;
        }
      }
      const std::string text(src_.substr(i_, j - i_));
      char* endp = nullptr;
      tok_.value = std::strtod(text.c_str(), &endp);
      if (endp != text.c_str() + text.size())
        throw ParseError(i_, "malformed number '" + text + "'");
      tok_.type = Token::Type::number;
      tok_.text = text;
      i_ = j;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i_;
      while (j < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_'))
        ++j;
      tok_.type = Token::Type::ident;
      tok_.text = std::string(src_.substr(i_, j - i_));
      i_ = j;
      return;
    }
    if (std::string_view("+-*/^(),").find(c) != std::string_view::npos) {
      tok_.type = Token::Type::op;
      tok_.text = std::string(1, c);
      ++i_;
      return;
    }
    throw ParseError(i_, std::string("unexpected character '") + c + "'");
  }

  std::string_view src_;
  std::size_t i_ = 0;
  Token tok_;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) {}

  NodePtr parse_all() {
    NodePtr e = parse_expr();
    const Token& t = lex_.peek();
    if (t.type != Token::Type::end) throw ParseError(t.pos, "unexpected trailing input '" + t.text + "'");
    return e;
  }

 private:
  static NodePtr make(Kind k, std::size_t pos, NodePtr a = nullptr, NodePtr b = nullptr,
                      double value = 0.0, Func func = Func::sin) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->pos = pos;
    n->a = std::move(a);
    n->b = std::move(b);
    n->value = value;
    n->func = func;
    return n;
  }

  bool accept_op(const char* op) {
    const Token& t = lex_.peek();
    if (t.type == Token::Type::op && t.text == op) {
      lex_.take();
      return true;
    }
    return false;
  }

  void expect_op(const char* op, const std::string& what) {
    const Token& t = lex_.peek();
    if (t.type != Token::Type::op || t.text != op)
      throw ParseError(t.pos, std::string("expected '") + op + "' " + what);
    lex_.take();
  }

  NodePtr parse_expr() {
    NodePtr e = parse_term();
    for (;;) {
      const std::size_t pos = lex_.peek().pos;
      if (accept_op("+"))
        e = make(Kind::add, pos, e, parse_term());
      else if (accept_op("-"))
        e = make(Kind::sub, pos, e, parse_term());
      else
        return e;
    }
  }

  NodePtr parse_term() {
    NodePtr e = parse_unary();
    for (;;) {
      const std::size_t pos = lex_.peek().pos;
      if (accept_op("*"))
        e = make(Kind::mul, pos, e, parse_unary());
      else if (accept_op("/"))
        e = make(Kind::div, pos, e, parse_unary());
      else
        return e;
    }
  }

  NodePtr parse_unary() {
    const std::size_t pos = lex_.peek().pos;
    if (accept_op("-")) return make(Kind::neg, pos, parse_unary());
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    const std::size_t pos = lex_.peek().pos;
    if (accept_op("^")) return make(Kind::pow, pos, base, parse_unary());
    return base;
  }

  NodePtr parse_primary() {
    const Token t = lex_.take();
    switch (t.type) {
      case Token::Type::number:
        return make(Kind::number, t.pos, nullptr, nullptr, t.value);
      case Token::Type::ident:
        return parse_ident(t);
      case Token::Type::op:
        if (t.text == "(") {
          NodePtr e = parse_expr();
          expect_op(")", "to close '('");
          return e;
        }
        throw ParseError(t.pos, "unexpected '" + t.text + "'");
      case Token::Type::end:
        throw ParseError(t.pos, "unexpected end of input");
    }
    throw ParseError(t.pos, "unreachable");
  }

  NodePtr parse_ident(const Token& t) {
    if (t.text == "t") return make(Kind::var_t, t.pos);
    if (t.text == "y") return make(Kind::var_y, t.pos);
    if (t.text == "pi") return make(Kind::const_pi, t.pos);
    if (t.text == "e") return make(Kind::const_e, t.pos);
    Func f;
    std::size_t arity = 1;
    if (t.text == "sin") f = Func::sin;
    else if (t.text == "cos") f = Func::cos;
    else if (t.text == "sqrt") f = Func::sqrt;
    else if (t.text == "exp") f = Func::exp;
    else if (t.text == "ln") f = Func::ln;
    else if (t.text == "abs") f = Func::abs;
    else if (t.text == "erf") f = Func::erf;
    else if (t.text == "pow") { f = Func::pow; arity = 2; }
    else throw ParseError(t.pos, "unknown identifier '" + t.text + "'");
    expect_op("(", "after function '" + t.text + "'");
    std::vector<NodePtr> args;
    args.push_back(parse_expr());
    while (accept_op(",")) args.push_back(parse_expr());
    expect_op(")", "to close the argument list");
    if (args.size() != arity)
      throw ParseError(t.pos, "function '" + t.text + "' expects " + std::to_string(arity) +
                                  " argument(s), got " + std::to_string(args.size()));
    return make(Kind::call, t.pos, args[0], arity == 2 ? args[1] : nullptr, 0.0, f);
  }

  Lexer lex_;
};

inline double eval_node(const Node& n, double t, double y) {
  switch (n.kind) {
    case Kind::number: return n.value;
    case Kind::var_t: return t;
    case Kind::var_y: return y;
    case Kind::const_pi: return 3.14159265358979323846;
    case Kind::const_e: return 2.71828182845904523536;
    case Kind::neg: return -eval_node(*n.a, t, y);
    case Kind::add: return eval_node(*n.a, t, y) + eval_node(*n.b, t, y);
    case Kind::sub: return eval_node(*n.a, t, y) - eval_node(*n.b, t, y);
    case Kind::mul: return eval_node(*n.a, t, y) * eval_node(*n.b, t, y);
    case Kind::div: return eval_node(*n.a, t, y) / eval_node(*n.b, t, y);
    case Kind::pow: {
      const double base = eval_node(*n.a, t, y);
      const double expo = eval_node(*n.b, t, y);
      const double r = std::pow(base, expo);
      if (std::isnan(r) && !std::isnan(base) && !std::isnan(expo))
        throw EvalError(n.pos, "pow domain violation (negative base, non-integer exponent)");
      return r;
    }
    case Kind::call: {
      const double x = eval_node(*n.a, t, y);
      switch (n.func) {
        case Func::sin: return std::sin(x);
        case Func::cos: return std::cos(x);
        case Func::sqrt:
          if (x < 0.0) throw EvalError(n.pos, "sqrt of negative value");
          return std::sqrt(x);
        case Func::exp: return std::exp(x);
        case Func::ln:
          if (!(x > 0.0)) throw EvalError(n.pos, "ln of non-positive value");
          return std::log(x);
        case Func::abs: return std::fabs(x);
        case Func::erf: return std::erf(x);
        case Func::pow: {
          const double e2 = eval_node(*n.b, t, y);
          const double r = std::pow(x, e2);
          if (std::isnan(r) && !std::isnan(x) && !std::isnan(e2))
            throw EvalError(n.pos, "pow domain violation (negative base, non-integer exponent)");
          return r;
        }
      }
      throw EvalError(n.pos, "unreachable");
    }
  }
  throw EvalError(n.pos, "unreachable");
}

inline const char* func_name(Func f) {
  switch (f) {
    case Func::sin: return "sin";
    case Func::cos: return "cos";
    case Func::sqrt: return "sqrt";
    case Func::exp: return "exp";
    case Func::ln: return "ln";
    case Func::abs: return "abs";
    case Func::erf: return "erf";
    case Func::pow: return "pow";
  }
  return "?";
}

inline void print_node(const Node& n, std::string& out) {
  char buf[40];
  switch (n.kind) {
    case Kind::number:
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      return;
    case Kind::var_t: out += "t"; return;
    case Kind::var_y: out += "y"; return;
    case Kind::const_pi: out += "pi"; return;
    case Kind::const_e: out += "e"; return;
    case Kind::neg:
      out += "(-";
      print_node(*n.a, out);
      out += ")";
      return;
    case Kind::add:
    case Kind::sub:
    case Kind::mul:
    case Kind::div:
    case Kind::pow: {
      const char op = n.kind == Kind::add   ? '+'
                      : n.kind == Kind::sub ? '-'
                      : n.kind == Kind::mul ? '*'
                      : n.kind == Kind::div ? '/'
                                            : '^';
      out += "(";
      print_node(*n.a, out);
      out += " ";
      out += op;
      out += " ";
      print_node(*n.b, out);
      out += ")";
      return;
    }
    case Kind::call:
      out += func_name(n.func);
      out += "(";
      print_node(*n.a, out);
      if (n.b) {
        out += ", ";
        print_node(*n.b, out);
      }
      out += ")";
      return;
  }
}

inline bool equal_nodes(const NodePtr& a, const NodePtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  if (a->kind == Kind::number && a->value != b->value) return false;
  if (a->kind == Kind::call && a->func != b->func) return false;
  return equal_nodes(a->a, b->a) && equal_nodes(a->b, b->b);
}

inline bool uses_y_node(const NodePtr& n) {
  if (!n) return false;
  if (n->kind == Kind::var_y) return true;
  return uses_y_node(n->a) || uses_y_node(n->b);
}

}  // namespace detail

/// An immutable parsed expression over the variables t and y.
class Expr {
 public:
  static Expr parse(std::string_view src) { return Expr(detail::Parser(src).parse_all()); }

  double eval(double t, double y) const { return detail::eval_node(*root_, t, y); }

  /// Fully parenthesized rendering; reparses to an identical tree.
  std::string str() const {
    std::string out;
    detail::print_node(*root_, out);
    return out;
  }

  bool uses_y() const { return detail::uses_y_node(root_); }
  const NodePtr& root() const { return root_; }

  friend bool operator==(const Expr& a, const Expr& b) {
    return detail::equal_nodes(a.root_, b.root_);
  }

 private:
  explicit Expr(NodePtr root) : root_(std::move(root)) {}
  NodePtr root_;
};

inline Expr parse(std::string_view src) { return Expr::parse(src); }

}  // namespace psifde::expr

#endif
