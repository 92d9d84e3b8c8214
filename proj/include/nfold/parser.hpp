#pragma once

#include <map>
#include <string>
#include <string_view>

#include "nfold/expr.hpp"

namespace nfold {

/// Names visible to the parser. `variable` is the free variable ("q" for
/// models, "x" for coupling-scaled families); `reference` is the lower limit
/// used by a one-argument Int(f).
struct ParseContext {
  std::string variable = "q";
  double reference = 0.0;
  std::map<std::string, Expr, std::less<>> bindings;
};

/// Parses the expression grammar:
///
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('-' | '+') unary | power
///   power   := primary ('^' unary)?
///   primary := number | 'i' | 'pi' | name | func '(' expr ')' |
///              'Int' '(' expr (',' expr)? ')' | '(' expr ')'
///
/// func is one of sin, cos, exp, log. Throws ParseError with the character
/// offset of the problem.
Expr parse(std::string_view text, const ParseContext& ctx = {});

/// Parses text that must reduce to a constant (for bounds and parameters).
cplx parse_constant(std::string_view text, const ParseContext& ctx = {});

}  // namespace nfold
