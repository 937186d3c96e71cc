#include <sstream>

#include "lcre/proof.hpp"
#include "lcre/syntax.hpp"

namespace lcre {

namespace {

std::string decl(const Variable& v) { return v.name + ":" + v.sort.name; }

bool declared(const CETheory& th, const Variable& v) {
  auto it = th.variables.find(v.name);
  return it != th.variables.end() && it->second == v;
}

void write_node(std::ostringstream& out, const Derivation& d, const CETheory& th, int indent) {
  std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const ConstrainedEquation& c = d.conclusion;
  out << pad << "(" << rule_name(d.rule) << " (conclusion (vars";
  for (const auto& x : c.logical_vars) out << " " << decl(x);
  out << ")";
  VarSet all = vars_of(c.lhs);
  collect_vars(c.rhs, all);
  collect_vars(c.constraint, all);
  if (d.witness)
    for (const auto& [v, t] : d.witness->bindings()) collect_vars(t, all);
  std::string free;
  for (const auto& v : all)
    if (!c.logical_vars.count(v) && !declared(th, v)) free += " " + decl(v);
  if (!free.empty()) out << " (free" << free << ")";
  out << " " << c.lhs.to_string() << " " << c.rhs.to_string() << " " << c.constraint.to_string() << ")";
  if (d.witness) {
    out << " (subst";
    for (const auto& [v, t] : d.witness->bindings()) out << " (" << decl(v) << " " << t.to_string() << ")";
    out << ")";
  }
  for (const auto& p : d.premises) {
    out << "\n";
    write_node(out, p, th, indent + 1);
  }
  out << ")";
}

Variable parse_decl(const SExpr& e, const CETheory& th, const VarScope& scope) {
  if (!e.is_atom()) fail_at(e, "expected NAME:SORT or NAME");
  auto colon = e.atom.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    auto it = scope.find(e.atom);
    if (it == scope.end()) fail_at(e, "undeclared variable " + e.atom);
    return it->second;
  }
  std::string sort = e.atom.substr(colon + 1);
  const Sort* s = th.signature.find_sort(sort);
  if (!s) throw Error(ErrorCode::UnknownSort, std::to_string(e.line) + ":" + std::to_string(e.column) + ": unknown sort " + sort);
  return Variable{e.atom.substr(0, colon), *s};
}

Derivation read_node(const SExpr& e, const CETheory& th) {
  if (!e.is_list() || e.list.size() < 2 || !e.list[0].is_atom()) fail_at(e, "expected (RULE (conclusion ...) ...)");
  auto rule = rule_from_name(e.list[0].atom);
  if (!rule) fail_at(e.list[0], "unknown rule " + e.list[0].atom);
  Derivation d;
  d.rule = *rule;
  const SExpr& c = e.list[1];
  if (!c.is_form("conclusion")) fail_at(c, "expected (conclusion ...)");
  VarScope scope = th.variables;
  std::size_t i = 1;
  std::vector<const SExpr*> parts;
  for (; i < c.list.size(); ++i) {
    const SExpr& p = c.list[i];
    if (parts.empty() && p.is_form("vars")) {
      for (std::size_t k = 1; k < p.list.size(); ++k) {
        Variable v = parse_decl(p.list[k], th, scope);
        scope[v.name] = v;
        d.conclusion.logical_vars.insert(v);
      }
    } else if (parts.empty() && p.is_form("free")) {
      for (std::size_t k = 1; k < p.list.size(); ++k) {
        Variable v = parse_decl(p.list[k], th, scope);
        scope[v.name] = v;
      }
    } else {
      parts.push_back(&p);
    }
  }
  if (parts.size() != 3) fail_at(c, "conclusion needs LHS RHS CONSTRAINT");
  d.conclusion.lhs = term_from_sexpr(*parts[0], th, scope);
  d.conclusion.rhs = term_from_sexpr(*parts[1], th, scope);
  d.conclusion.constraint = term_from_sexpr(*parts[2], th, scope);
  std::size_t k = 2;
  if (k < e.list.size() && e.list[k].is_form("subst")) {
    Substitution s;
    const SExpr& sub = e.list[k];
    for (std::size_t j = 1; j < sub.list.size(); ++j) {
      const SExpr& b = sub.list[j];
      if (!b.is_list() || b.list.size() != 2) fail_at(b, "expected (VAR TERM)");
      Variable v = parse_decl(b.list[0], th, scope);
      Term t = term_from_sexpr(b.list[1], th, scope);
      if (!(t.sort() == v.sort)) fail_at(b, "binding of " + v.name + " has sort " + t.sort().name);
      s.bind(v, t);
    }
    d.witness = s;
    ++k;
  }
  for (; k < e.list.size(); ++k) d.premises.push_back(read_node(e.list[k], th));
  return d;
}

}  // namespace

std::string serialize_proof(const Derivation& d, const CETheory& th) {
  std::ostringstream out;
  write_node(out, d, th, 0);
  out << "\n";
  return out.str();
}

Derivation parse_proof(const std::string& text, const CETheory& th) {
  auto top = parse_sexprs(text);
  if (top.size() != 1) {
    if (top.empty()) throw ParseError(1, 1, "empty proof");
    fail_at(top[1], "expected a single derivation");
  }
  return read_node(top[0], th);
}

Derivation load_proof(const std::string& path, const CETheory& th) { return parse_proof(read_file(path), th); }

}  // namespace lcre
