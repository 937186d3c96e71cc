#pragma once

#include <map>
#include <optional>
#include <string>

#include "lcre/rewriting.hpp"
#include "lcre/sexpr.hpp"

namespace lcre {

using VarScope = std::map<std::string, Variable>;

// (model lia) | (model bool) | (model (intmod N))
ModelRef model_from_sexpr(const SExpr& e);

// Theory file:
//   (theory (model M) (sorts S...) (funs (f ARG... RESULT)...) (vars (x SORT)...)
//           (eq [(vars ..)] [(pi x...)] [(constraint PHI)] LHS RHS)...
//           (goal NAME [(vars ..)] [(pi x...)] [(constraint PHI)] LHS RHS)...)
// Omitted pi means X = Var(PHI); omitted constraint means true.
CETheory parse_theory(const std::string& text);
CETheory load_theory(const std::string& path);
std::string print_theory(const CETheory& th);

// Accepts s-expressions `(f a b)` and applicative `f(a, b)` text.
SExpr read_term_text(const std::string& text);
Term term_from_sexpr(const SExpr& e, const CETheory& th, const VarScope& scope,
                     const std::optional<Sort>& expected = std::nullopt);
Term parse_term(const std::string& text, const CETheory& th, const VarScope& extra = {},
                const std::optional<Sort>& expected = std::nullopt);

// The theory's declared variables extended by `extra`.
VarScope theory_scope(const CETheory& th, const VarScope& extra = {});

// "x y" or "x,y"; names must resolve in the scope.
VarSet parse_var_list(const std::string& text, const VarScope& scope);

ConstrainedEquation ce_from_sexpr(const std::vector<SExpr>& parts, std::size_t start,
                                  const CETheory& th, const SExpr& where);

std::string read_file(const std::string& path);

}  // namespace lcre
