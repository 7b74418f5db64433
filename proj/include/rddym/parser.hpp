#pragma once

#include <string>

#include "rddym/expr.hpp"

namespace rddym {

// Grammar (documented in README):
//   expr    := term (('+'|'-') term)*
//   term    := unary (('*'|'/') unary)*
//   unary   := ('-'|'+') unary | factor
//   factor  := primary ('^' ['-'] integer)?
//   primary := integer | ident | 'exp' '(' expr ')'
//            | 'D' '[' expr (',' coord)+ ']' | '(' expr ')'
// Identifiers are declared field names, optionally with a derivative suffix
// after '_' (any order of t/x/y characters, e.g. u_txy). Rationals are
// written as quotients of integers (3/4). D[e, c...] applies total
// derivatives at parse time; e must not involve fiber fields.
Expr parse_expression(const std::string& text, const Workspace& ws);

// a single jet such as "v_ty" (used for rule and binding left-hand sides)
Jet parse_jet(const std::string& text, const Workspace& ws);

}  // namespace rddym
