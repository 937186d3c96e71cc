#include "lcre/syntax.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace lcre {

namespace {

[[noreturn]] void fail_code(const SExpr& e, ErrorCode code, const std::string& what) {
  throw Error(code, std::to_string(e.line) + ":" + std::to_string(e.column) + ": " + what);
}

bool is_integer_literal(const std::string& s) {
  std::size_t i = s[0] == '-' ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

std::string sorts_string(const std::vector<Sort>& sorts) {
  std::string out;
  for (const auto& s : sorts) out += (out.empty() ? "" : " ") + s.name;
  return "(" + out + ")";
}

const Sort& sort_named(const CETheory& th, const SExpr& e) {
  if (!e.is_atom()) fail_at(e, "expected a sort name");
  const Sort* s = th.signature.find_sort(e.atom);
  if (!s) fail_code(e, ErrorCode::UnknownSort, "unknown sort " + e.atom);
  return *s;
}

void add_var_decls(const SExpr& form, const CETheory& th, VarScope& scope) {
  for (std::size_t i = 1; i < form.list.size(); ++i) {
    const SExpr& d = form.list[i];
    if (!d.is_list() || d.list.size() != 2 || !d.list[0].is_atom())
      fail_at(d, "variable declaration must be (NAME SORT)");
    const std::string& name = d.list[0].atom;
    if (th.signature.has_symbol(name) || is_integer_literal(name) || name == "true" || name == "false")
      fail_at(d.list[0], "variable name " + name + " clashes with a symbol or value");
    scope[name] = Variable{name, sort_named(th, d.list[1])};
  }
}

// Applicative reader: term ::= atom [ '(' [term {',' term}] ')' ]
class AppReader {
 public:
  explicit AppReader(const std::string& text) : text_(text) {}

  SExpr read() {
    SExpr e = term();
    skip();
    if (i_ < text_.size()) error("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void error(const std::string& what) { throw ParseError(line_, col_, what); }

  void advance() {
    if (text_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }
  void skip() {
    while (i_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[i_]))) advance();
  }
  static bool atom_char(char c) {
    return !std::isspace(static_cast<unsigned char>(c)) && c != '(' && c != ')' && c != ',';
  }

  SExpr term() {
    skip();
    SExpr head;
    head.line = line_;
    head.column = col_;
    while (i_ < text_.size() && atom_char(text_[i_])) {
      head.atom += text_[i_];
      advance();
    }
    if (head.atom.empty()) error("expected a term");
    skip();
    if (i_ >= text_.size() || text_[i_] != '(') return head;
    SExpr app;
    app.list_node = true;
    app.line = head.line;
    app.column = head.column;
    app.list.push_back(head);
    advance();
    skip();
    if (i_ < text_.size() && text_[i_] == ')') {
      advance();
      return app;
    }
    while (true) {
      app.list.push_back(term());
      skip();
      if (i_ >= text_.size()) error("unterminated argument list");
      if (text_[i_] == ',') {
        advance();
        continue;
      }
      if (text_[i_] == ')') {
        advance();
        return app;
      }
      error(std::string("unexpected '") + text_[i_] + "'");
    }
  }

  const std::string& text_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

std::string model_string(const UnderlyingModel& m) {
  switch (m.kind()) {
    case UnderlyingModel::Kind::Bool: return "bool";
    case UnderlyingModel::Kind::Lia: return "lia";
    case UnderlyingModel::Kind::IntMod: return "(intmod " + std::to_string(m.modulus()) + ")";
  }
  return "";
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ModelRef model_from_sexpr(const SExpr& e) {
  if (e.is_atom("lia")) return UnderlyingModel::lia();
  if (e.is_atom("bool")) return UnderlyingModel::boolean();
  if (e.is_form("intmod") && e.list.size() == 2 && e.list[1].is_atom() &&
      is_integer_literal(e.list[1].atom)) {
    int n = std::stoi(e.list[1].atom);
    if (n < 1 || n > 64) fail_at(e, "intmod modulus must be in [1, 64]");
    return UnderlyingModel::int_mod(n);
  }
  fail_at(e, "unknown model " + e.to_string());
}

VarScope theory_scope(const CETheory& th, const VarScope& extra) {
  VarScope s = th.variables;
  for (const auto& [k, v] : extra) s[k] = v;
  return s;
}

Term term_from_sexpr(const SExpr& e, const CETheory& th, const VarScope& scope,
                     const std::optional<Sort>& expected) {
  Term out;
  if (e.is_atom()) {
    const std::string& a = e.atom;
    auto v = scope.find(a);
    if (v != scope.end()) {
      out = Term::var(v->second);
    } else if ((a == "true" || a == "false") && th.model->has_sort(bool_sort())) {
      out = Term::boolean(a == "true");
    } else if (is_integer_literal(a) && th.model->has_sort(int_sort())) {
      Value val = int_value(BigInt(a));
      if (!th.model->in_carrier(val)) fail_code(e, ErrorCode::InvalidArgument, "value " + a + " is outside the carrier");
      out = Term::val(val);
    } else {
      SymbolRef f = th.signature.resolve(a, {});
      if (!f) {
        if (th.signature.has_symbol(a)) fail_code(e, ErrorCode::SortMismatch, a + " is not a constant");
        fail_code(e, ErrorCode::UnknownSymbol, "unknown symbol or variable " + a);
      }
      out = Term::app(f, {});
    }
  } else {
    if (e.list.empty() || !e.list[0].is_atom()) fail_at(e, "expected (SYMBOL ARG...)");
    const std::string& name = e.list[0].atom;
    if (!th.signature.has_symbol(name)) fail_code(e.list[0], ErrorCode::UnknownSymbol, "unknown symbol " + name);
    std::vector<Term> args;
    std::vector<Sort> sorts;
    for (std::size_t i = 1; i < e.list.size(); ++i) {
      args.push_back(term_from_sexpr(e.list[i], th, scope));
      sorts.push_back(args.back().sort());
    }
    SymbolRef f = th.signature.resolve(name, sorts);
    if (!f) fail_code(e, ErrorCode::SortMismatch, "no declaration of " + name + " takes " + sorts_string(sorts));
    out = Term::app(f, std::move(args));
  }
  if (expected && !(out.sort() == *expected))
    fail_code(e, ErrorCode::SortMismatch,
              out.to_string() + " has sort " + out.sort().name + ", expected " + expected->name);
  return out;
}

SExpr read_term_text(const std::string& text) {
  std::size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  if (i < text.size() && text[i] == '(') return parse_sexpr(text);
  return AppReader(text).read();
}

Term parse_term(const std::string& text, const CETheory& th, const VarScope& extra,
                const std::optional<Sort>& expected) {
  return term_from_sexpr(read_term_text(text), th, theory_scope(th, extra), expected);
}

VarSet parse_var_list(const std::string& text, const VarScope& scope) {
  std::string t = text;
  for (char& c : t)
    if (c == ',') c = ' ';
  std::istringstream in(t);
  VarSet out;
  std::string name;
  while (in >> name) {
    auto it = scope.find(name);
    if (it == scope.end()) throw Error(ErrorCode::UnknownSymbol, "unknown variable " + name);
    out.insert(it->second);
  }
  return out;
}

ConstrainedEquation ce_from_sexpr(const std::vector<SExpr>& parts, std::size_t start,
                                  const CETheory& th, const SExpr& where) {
  VarScope scope = th.variables;
  std::optional<VarSet> pi;
  const SExpr* constraint = nullptr;
  std::vector<const SExpr*> sides;
  for (std::size_t i = start; i < parts.size(); ++i) {
    const SExpr& p = parts[i];
    if (sides.empty() && p.is_form("vars")) {
      add_var_decls(p, th, scope);
    } else if (sides.empty() && p.is_form("pi")) {
      VarSet x;
      for (std::size_t k = 1; k < p.list.size(); ++k) {
        const SExpr& v = p.list[k];
        if (!v.is_atom()) fail_at(v, "pi lists variable names");
        auto it = scope.find(v.atom);
        if (it == scope.end()) fail_code(v, ErrorCode::UnknownSymbol, "undeclared variable " + v.atom);
        x.insert(it->second);
      }
      pi = std::move(x);
    } else if (sides.empty() && p.is_form("constraint")) {
      if (p.list.size() != 2) fail_at(p, "constraint takes one formula");
      constraint = &p.list[1];
    } else {
      sides.push_back(&p);
    }
  }
  if (sides.size() != 2) fail_at(where, "expected exactly two sides");
  ConstrainedEquation ce;
  auto side = [&](const SExpr& e, const std::optional<Sort>& want) {
    try {
      return term_from_sexpr(e, th, scope, want);
    } catch (const Error& err) {
      if (err.code() == ErrorCode::SortMismatch) throw Error(ErrorCode::IllSortedEquation, err.what());
      throw;
    }
  };
  ce.lhs = side(*sides[0], std::nullopt);
  try {
    ce.rhs = term_from_sexpr(*sides[1], th, scope);
  } catch (const Error& err) {
    if (err.code() == ErrorCode::SortMismatch) throw Error(ErrorCode::IllSortedEquation, err.what());
    throw;
  }
  if (!(ce.lhs.sort() == ce.rhs.sort()))
    fail_code(where, ErrorCode::IllSortedEquation,
              "sides have sorts " + ce.lhs.sort().name + " and " + ce.rhs.sort().name);
  ce.constraint = constraint ? side(*constraint, bool_sort()) : Term::boolean(true);
  if (!ce.constraint.is_theory_term())
    fail_code(*constraint, ErrorCode::IllSortedEquation, "constraint uses term symbols or term variables");
  ce.logical_vars = pi ? *pi : vars_of(ce.constraint);
  for (const auto& v : vars_of(ce.constraint))
    if (!ce.logical_vars.count(v))
      fail_code(constraint ? *constraint : where, ErrorCode::ConstraintVarsNotInX,
                "constraint variable " + v.name + " is not in pi");
  for (const auto& v : ce.logical_vars)
    if (!v.is_theory()) fail_code(where, ErrorCode::IllSortedEquation, "logical variable " + v.name + " has a term sort");
  return ce;
}

CETheory parse_theory(const std::string& text) {
  auto top = parse_sexprs(text);
  if (top.size() != 1 || !top[0].is_form("theory")) {
    if (top.empty()) throw ParseError(1, 1, "empty theory file");
    fail_at(top[0], "expected a single (theory ...) form");
  }
  const SExpr& root = top[0];
  CETheory th;
  for (std::size_t i = 1; i < root.list.size(); ++i) {
    const SExpr& sec = root.list[i];
    if (!sec.is_list() || sec.list.empty() || !sec.list[0].is_atom()) fail_at(sec, "expected a section");
    if (sec.is_form("model")) {
      if (th.model) fail_at(sec, "duplicate model declaration");
      if (sec.list.size() != 2) fail_at(sec, "model takes one argument");
      th.model = model_from_sexpr(sec.list[1]);
    }
  }
  if (!th.model) th.model = UnderlyingModel::lia();
  for (const auto& s : th.model->theory_signature().sorts()) th.signature.add_sort(s);
  for (const auto& f : th.model->theory_signature().symbols()) th.signature.add_symbol(f);

  for (std::size_t i = 1; i < root.list.size(); ++i) {
    const SExpr& sec = root.list[i];
    const std::string& head = sec.list[0].atom;
    if (head == "sorts") {
      for (std::size_t k = 1; k < sec.list.size(); ++k) {
        const SExpr& s = sec.list[k];
        if (!s.is_atom()) fail_at(s, "sort names are atoms");
        if (th.signature.find_sort(s.atom)) fail_at(s, "sort " + s.atom + " already declared");
        th.signature.add_sort(Sort{s.atom, SortKind::Term});
      }
    } else if (head == "funs") {
      for (std::size_t k = 1; k < sec.list.size(); ++k) {
        const SExpr& d = sec.list[k];
        if (!d.is_list() || d.list.size() < 2 || !d.list[0].is_atom())
          fail_at(d, "function declaration must be (NAME ARG... RESULT)");
        const std::string& name = d.list[0].atom;
        if (th.model->theory_signature().has_symbol(name))
          fail_at(d.list[0], "term symbol " + name + " clashes with a theory symbol");
        if (is_integer_literal(name) || name == "true" || name == "false")
          fail_at(d.list[0], "symbol name " + name + " clashes with a value");
        std::vector<Sort> args;
        for (std::size_t a = 1; a + 1 < d.list.size(); ++a) args.push_back(sort_named(th, d.list[a]));
        Sort result = sort_named(th, d.list.back());
        try {
          th.signature.add_symbol(make_symbol(name, args, result, SortKind::Term));
        } catch (const Error& e) {
          fail_at(d, e.what());
        }
      }
    } else if (head != "model" && head != "vars" && head != "eq" && head != "goal") {
      fail_at(sec.list[0], "unknown section " + head);
    }
  }
  for (std::size_t i = 1; i < root.list.size(); ++i) {
    const SExpr& sec = root.list[i];
    if (sec.is_form("vars")) {
      VarScope scope = th.variables;
      add_var_decls(sec, th, scope);
      th.variables = std::move(scope);
    }
  }
  for (std::size_t i = 1; i < root.list.size(); ++i) {
    const SExpr& sec = root.list[i];
    if (sec.is_form("eq")) {
      th.equations.push_back(ce_from_sexpr(sec.list, 1, th, sec));
    } else if (sec.is_form("goal")) {
      if (sec.list.size() < 2 || !sec.list[1].is_atom()) fail_at(sec, "goal needs a name");
      if (th.find_goal(sec.list[1].atom)) fail_at(sec.list[1], "duplicate goal " + sec.list[1].atom);
      th.goals.push_back({sec.list[1].atom, ce_from_sexpr(sec.list, 2, th, sec)});
    }
  }
  return th;
}

CETheory load_theory(const std::string& path) { return parse_theory(read_file(path)); }

namespace {

void print_ce(std::ostringstream& out, const CETheory& th, const ConstrainedEquation& ce) {
  VarSet all = vars_of(ce.lhs);
  collect_vars(ce.rhs, all);
  collect_vars(ce.constraint, all);
  all.insert(ce.logical_vars.begin(), ce.logical_vars.end());
  std::string local;
  for (const auto& v : all) {
    auto it = th.variables.find(v.name);
    if (it == th.variables.end() || !(it->second == v)) local += " (" + v.name + " " + v.sort.name + ")";
  }
  if (!local.empty()) out << " (vars" << local << ")";
  out << " (pi";
  for (const auto& v : ce.logical_vars) out << " " << v.name;
  out << ") (constraint " << ce.constraint.to_string() << ") " << ce.lhs.to_string() << " "
      << ce.rhs.to_string();
}

}  // namespace

std::string print_theory(const CETheory& th) {
  std::ostringstream out;
  out << "(theory\n  (model " << model_string(*th.model) << ")\n  (sorts";
  for (const auto& s : th.signature.sorts())
    if (!s.is_theory()) out << " " << s.name;
  out << ")\n  (funs";
  for (const auto& f : th.signature.term_symbols()) {
    out << "\n    (" << f->name;
    for (const auto& a : f->arg_sorts) out << " " << a.name;
    out << " " << f->result_sort.name << ")";
  }
  out << ")\n  (vars";
  for (const auto& [name, v] : th.variables) out << " (" << name << " " << v.sort.name << ")";
  out << ")";
  for (const auto& e : th.equations) {
    out << "\n  (eq";
    print_ce(out, th, e);
    out << ")";
  }
  for (const auto& g : th.goals) {
    out << "\n  (goal " << g.name;
    print_ce(out, th, g.ce);
    out << ")";
  }
  out << ")\n";
  return out.str();
}

}  // namespace lcre
