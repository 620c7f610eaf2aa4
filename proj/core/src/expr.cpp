#include "gtmprod/expr.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

#include "gtmprod/error.hpp"
#include "gtmprod/gammafn.hpp"

namespace gtmprod {

namespace {

Expr make(ExprKind kind, std::vector<Expr> args = {}) {
  auto node = std::make_shared<ExprNode>();
  node->kind = kind;
  node->args = std::move(args);
  return node;
}

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : text_(text) {}

  Expr parse() {
    Expr e = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError("expression: " + message, pos_);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool is_digit_at(std::size_t i) const {
    return i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]));
  }

  Expr parse_sum() {
    Expr lhs = parse_product();
    while (peek() == '+' || peek() == '-') {
      const ExprKind kind = text_[pos_++] == '+' ? ExprKind::add : ExprKind::sub;
      lhs = make(kind, {lhs, parse_product()});
    }
    return lhs;
  }

  Expr parse_product() {
    Expr lhs = parse_unary();
    while (peek() == '*' || peek() == '/') {
      const ExprKind kind = text_[pos_++] == '*' ? ExprKind::mul : ExprKind::div;
      lhs = make(kind, {lhs, parse_unary()});
    }
    return lhs;
  }

  Expr parse_unary() {
    if (peek() == '-') {
      ++pos_;
      return make(ExprKind::neg, {parse_power()});
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_atom();
    if (peek() == '^') {
      ++pos_;
      return make(ExprKind::pow, {base, parse_unary()});
    }
    return base;
  }

  Expr parse_atom() {
    const char c = peek();
    if (c == '(') {
      ++pos_;
      Expr inner = parse_sum();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string_view word = text_.substr(start, pos_ - start);
      if (word == "pi") return make(ExprKind::pi);
      ExprKind kind;
      if (word == "sqrt") {
        kind = ExprKind::sqrt;
      } else if (word == "gamma") {
        kind = ExprKind::gamma;
      } else if (word == "cos") {
        kind = ExprKind::cos;
      } else {
        pos_ = start;
        fail("unknown name '" + std::string(word) + "'");
      }
      if (peek() != '(') fail("expected '(' after " + std::string(word));
      ++pos_;
      Expr arg = parse_sum();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return make(kind, {arg});
    }
    fail(c == '\0' ? "unexpected end of input" : "unexpected character '" + std::string(1, c) + "'");
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    while (is_digit_at(pos_)) ++pos_;
    auto node = std::make_shared<ExprNode>();
    node->kind = ExprKind::number;
    if (pos_ < text_.size() && text_[pos_] == '.' && is_digit_at(pos_ + 1)) {
      ++pos_;
      while (is_digit_at(pos_)) ++pos_;
      node->lexeme = std::string(text_.substr(start, pos_ - start));
      node->decimal = std::stod(node->lexeme);
      return node;
    }
    const BigInt numerator(std::string(text_.substr(start, pos_ - start)));
    if (pos_ < text_.size() && text_[pos_] == '/' && is_digit_at(pos_ + 1)) {
      ++pos_;
      const std::size_t den_start = pos_;
      while (is_digit_at(pos_)) ++pos_;
      const BigInt denominator(std::string(text_.substr(den_start, pos_ - den_start)));
      if (denominator == 0) {
        pos_ = den_start;
        fail("zero denominator");
      }
      node->rational = Rational(numerator, denominator);
      node->lexeme = std::string(text_.substr(start, pos_ - start));
      return node;
    }
    node->rational = Rational(numerator);
    return node;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

int precedence(const Expr& e) {
  switch (e->kind) {
    case ExprKind::add:
    case ExprKind::sub:
      return 1;
    case ExprKind::mul:
    case ExprKind::div:
      return 2;
    case ExprKind::neg:
      return 3;
    case ExprKind::pow:
      return 4;
    case ExprKind::number:
      // A literal like 1/3 is an atom only to the lexer; treat it as atomic.
      return 5;
    default:
      return 5;
  }
}

std::string wrap(const Expr& e, bool parens) {
  const std::string s = format_expr(e);
  return parens ? "(" + s + ")" : s;
}

double finite_or_throw(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string("expression: non-finite result in ") + what);
  return v;
}

}  // namespace

Expr parse_expr(std::string_view text) { return ExprParser(text).parse(); }

double eval_expr(const Expr& e) {
  switch (e->kind) {
    case ExprKind::number:
      return e->lexeme.find('.') == std::string::npos ? to_double(e->rational) : e->decimal;
    case ExprKind::pi:
      return std::numbers::pi;
    case ExprKind::neg:
      return -eval_expr(e->args[0]);
    case ExprKind::add:
      return finite_or_throw(eval_expr(e->args[0]) + eval_expr(e->args[1]), "+");
    case ExprKind::sub:
      return finite_or_throw(eval_expr(e->args[0]) - eval_expr(e->args[1]), "-");
    case ExprKind::mul:
      return finite_or_throw(eval_expr(e->args[0]) * eval_expr(e->args[1]), "*");
    case ExprKind::div: {
      const double d = eval_expr(e->args[1]);
      if (d == 0.0) throw DomainError("expression: division by zero");
      return finite_or_throw(eval_expr(e->args[0]) / d, "/");
    }
    case ExprKind::pow:
      return finite_or_throw(std::pow(eval_expr(e->args[0]), eval_expr(e->args[1])), "^");
    case ExprKind::sqrt: {
      const double x = eval_expr(e->args[0]);
      if (x < 0.0) throw DomainError("expression: sqrt of a negative number");
      return std::sqrt(x);
    }
    case ExprKind::gamma: {
      const double x = eval_expr(e->args[0]);
      if (x <= 0.0 && x == std::floor(x)) throw DomainError("expression: gamma at a pole");
      return finite_or_throw(gamma(ComplexDouble(x, 0.0)).real(), "gamma");
    }
    case ExprKind::cos:
      return std::cos(eval_expr(e->args[0]));
  }
  throw DomainError("expression: unknown node");
}

std::string format_expr(const Expr& e) {
  switch (e->kind) {
    case ExprKind::number:
      if (!e->lexeme.empty()) return e->lexeme;
      return to_string(e->rational);
    case ExprKind::pi:
      return "pi";
    case ExprKind::neg:
      return "-" + wrap(e->args[0], precedence(e->args[0]) < 4);
    case ExprKind::sqrt:
      return "sqrt(" + format_expr(e->args[0]) + ")";
    case ExprKind::gamma:
      return "gamma(" + format_expr(e->args[0]) + ")";
    case ExprKind::cos:
      return "cos(" + format_expr(e->args[0]) + ")";
    case ExprKind::pow:
      return wrap(e->args[0], precedence(e->args[0]) < 5 ||
                                  (e->args[0]->kind == ExprKind::number &&
                                   e->args[0]->lexeme.find('/') != std::string::npos)) +
             "^" + wrap(e->args[1], precedence(e->args[1]) < 4);
    default:
      break;
  }
  const int p = precedence(e);
  const char* op = e->kind == ExprKind::add   ? " + "
                   : e->kind == ExprKind::sub ? " - "
                   : e->kind == ExprKind::mul ? " * "
                                              : " / ";
  return wrap(e->args[0], precedence(e->args[0]) < p) + op +
         wrap(e->args[1], precedence(e->args[1]) <= p);
}

bool same_expr(const Expr& a, const Expr& b) {
  if (a->kind != b->kind || a->args.size() != b->args.size()) return false;
  if (a->kind == ExprKind::number) {
    const bool a_dec = a->lexeme.find('.') != std::string::npos;
    const bool b_dec = b->lexeme.find('.') != std::string::npos;
    if (a_dec != b_dec) return false;
    if (a_dec ? a->lexeme != b->lexeme : a->rational != b->rational) return false;
  }
  for (std::size_t i = 0; i < a->args.size(); ++i) {
    if (!same_expr(a->args[i], b->args[i])) return false;
  }
  return true;
}

}  // namespace gtmprod
