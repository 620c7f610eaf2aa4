#pragma once

// Closed-form constants such as gamma(1/4)/(sqrt(2)*pi^(3/4)).
//
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-'? power
//   power  := atom ('^' unary)?
//   atom   := number | 'pi' | ('sqrt'|'gamma'|'cos') '(' expr ')' | '(' expr ')'
//   number := uint | uint'/'uint | decimal
//
// A rational literal has no whitespace around its '/'; `1/3` is one token
// while `1 / 3` is a division. The printer relies on this.

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "gtmprod/ratfun.hpp"

namespace gtmprod {

enum class ExprKind { number, pi, neg, add, sub, mul, div, pow, sqrt, gamma, cos };

struct ExprNode;
using Expr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  ExprKind kind;
  Rational rational;    // number literals without a decimal point
  std::string lexeme;   // decimal literals keep their spelling
  double decimal = 0.0;
  std::vector<Expr> args;
};

/// Throws ParseError.
Expr parse_expr(std::string_view text);
/// Throws DomainError (gamma at a pole, sqrt of a negative, non-finite result).
double eval_expr(const Expr& e);
std::string format_expr(const Expr& e);
bool same_expr(const Expr& a, const Expr& b);

}  // namespace gtmprod
