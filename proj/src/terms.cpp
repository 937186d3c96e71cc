#include "lcre/terms.hpp"

#include <algorithm>
#include <sstream>

namespace lcre {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::ParseError: return "parse-error";
    case ErrorCode::UnknownSort: return "unknown-sort";
    case ErrorCode::UnknownSymbol: return "unknown-symbol";
    case ErrorCode::IllSortedEquation: return "ill-sorted-equation";
    case ErrorCode::ConstraintVarsNotInX: return "constraint-vars-not-in-X";
    case ErrorCode::SortMismatch: return "sort-mismatch";
    case ErrorCode::InvalidPosition: return "invalid-position";
    case ErrorCode::NonGroundInput: return "non-ground-input";
    case ErrorCode::NonTheorySymbol: return "non-theory-symbol-present";
    case ErrorCode::OracleFailure: return "oracle-failure";
    case ErrorCode::IllegalStep: return "illegal-step";
    case ErrorCode::NotACongruence: return "not-a-congruence";
    case ErrorCode::UncoveredVariable: return "uncovered-variable";
    case ErrorCode::PreconditionUnverifiable: return "precondition-unverifiable";
    case ErrorCode::InvalidArgument: return "invalid-argument";
  }
  return "error";
}

Sort bool_sort() { return Sort{"Bool", SortKind::Theory}; }
Sort int_sort() { return Sort{"Int", SortKind::Theory}; }

SymbolRef make_symbol(std::string name, std::vector<Sort> args, Sort result, SortKind kind,
                      Builtin op) {
  auto f = std::make_shared<FunSymbol>();
  f->name_hash = std::hash<std::string>{}(name);
  f->name = std::move(name);
  f->arg_sorts = std::move(args);
  f->result_sort = std::move(result);
  f->kind = kind;
  f->op = op;
  if (kind == SortKind::Theory) {
    for (const auto& s : f->arg_sorts)
      if (!s.is_theory())
        throw Error(ErrorCode::SortMismatch, "theory symbol " + f->name + " over term sort " + s.name);
    if (!f->result_sort.is_theory())
      throw Error(ErrorCode::SortMismatch, "theory symbol " + f->name + " has term result sort");
  }
  return f;
}

std::string Value::to_string() const {
  if (sort.name == "Bool") return num != 0 ? "true" : "false";
  return num.str();
}

Value bool_value(bool b) { return Value{bool_sort(), BigInt(b ? 1 : 0)}; }
Value int_value(BigInt n) { return Value{int_sort(), std::move(n)}; }

struct Term::Node {
  Kind kind;
  Sort sort;
  Variable var;
  SymbolRef sym;
  std::vector<Term> args;
  Value val;
  std::size_t hash = 0;
  std::size_t size = 1;
  bool ground = true;
  bool theory = true;
  bool redex = false;
};

namespace {

inline std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t hash_bigint(const BigInt& n) {
  if (n >= std::numeric_limits<long long>::min() && n <= std::numeric_limits<long long>::max())
    return std::hash<long long>{}(static_cast<long long>(n));
  return std::hash<std::string>{}(n.str());
}

}  // namespace

Term Term::var(Variable v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->sort = v.sort;
  n->hash = mix(std::hash<std::string>{}(v.name), std::hash<std::string>{}(v.sort.name));
  n->ground = false;
  n->theory = v.sort.is_theory();
  n->var = std::move(v);
  return Term(std::move(n));
}

Term Term::val(Value v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Val;
  n->sort = v.sort;
  n->hash = mix(hash_bigint(v.num), 0x51ed27);
  n->val = std::move(v);
  return Term(std::move(n));
}

Term Term::app(SymbolRef f, std::vector<Term> args) {
  if (args.size() != f->arity())
    throw Error(ErrorCode::SortMismatch, "symbol " + f->name + " expects " +
                                             std::to_string(f->arity()) + " arguments, got " +
                                             std::to_string(args.size()));
  auto n = std::make_shared<Node>();
  n->kind = Kind::App;
  n->sort = f->result_sort;
  std::size_t h = f->name_hash;
  bool all_values = true;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const Term& a = args[i];
    if (!(a.sort() == f->arg_sorts[i]))
      throw Error(ErrorCode::SortMismatch, "argument " + std::to_string(i + 1) + " of " + f->name +
                                               " has sort " + a.sort().name + ", expected " +
                                               f->arg_sorts[i].name);
    h = mix(h, a.hash());
    n->size += a.size();
    n->ground = n->ground && a.is_ground();
    n->theory = n->theory && a.is_theory_term();
    n->redex = n->redex || a.has_calc_redex();
    all_values = all_values && a.is_value();
  }
  n->theory = n->theory && f->is_theory();
  if (f->is_theory() && all_values) n->redex = true;
  n->hash = h;
  n->sym = std::move(f);
  n->args = std::move(args);
  return Term(std::move(n));
}

Term::Kind Term::kind() const { return n_->kind; }
const Variable& Term::variable() const { return n_->var; }
const FunSymbol& Term::symbol() const { return *n_->sym; }
const SymbolRef& Term::symbol_ref() const { return n_->sym; }
const std::vector<Term>& Term::args() const { return n_->args; }
const Value& Term::value() const { return n_->val; }
const Sort& Term::sort() const { return n_->sort; }
std::size_t Term::hash() const { return n_->hash; }
std::size_t Term::size() const { return n_->size; }
bool Term::is_ground() const { return n_->ground; }
bool Term::is_theory_term() const { return n_->theory; }
bool Term::has_calc_redex() const { return n_->redex; }

bool Term::operator==(const Term& o) const {
  if (n_ == o.n_) return true;
  if (!n_ || !o.n_) return false;
  if (n_->hash != o.n_->hash || n_->size != o.n_->size || n_->kind != o.n_->kind) return false;
  switch (n_->kind) {
    case Kind::Var: return n_->var == o.n_->var;
    case Kind::Val: return n_->val == o.n_->val;
    case Kind::App:
      if (n_->sym != o.n_->sym && !n_->sym->same_declaration(*o.n_->sym)) return false;
      for (std::size_t i = 0; i < n_->args.size(); ++i)
        if (n_->args[i] != o.n_->args[i]) return false;
      return true;
  }
  return false;
}

std::string Term::to_string() const {
  switch (kind()) {
    case Kind::Var: return variable().name;
    case Kind::Val: return value().to_string();
    case Kind::App: {
      if (args().empty()) return symbol().name;
      std::string out = "(" + symbol().name;
      for (const auto& a : args()) out += " " + a.to_string();
      return out + ")";
    }
  }
  return "";
}

int compare_terms(const Term& a, const Term& b) {
  if (a.identity() == b.identity()) return 0;
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  if (a.kind() != b.kind()) return a.kind() < b.kind() ? -1 : 1;
  switch (a.kind()) {
    case Term::Kind::Var:
      if (a.variable() == b.variable()) return 0;
      return a.variable() < b.variable() ? -1 : 1;
    case Term::Kind::Val:
      if (a.value() == b.value()) return 0;
      return a.value() < b.value() ? -1 : 1;
    case Term::Kind::App: {
      const auto& fa = a.symbol();
      const auto& fb = b.symbol();
      if (fa.name != fb.name) return fa.name < fb.name ? -1 : 1;
      if (fa.arity() != fb.arity()) return fa.arity() < fb.arity() ? -1 : 1;
      if (!(fa.result_sort == fb.result_sort)) return fa.result_sort < fb.result_sort ? -1 : 1;
      for (std::size_t i = 0; i < fa.arity(); ++i) {
        int c = compare_terms(a.arg(i), b.arg(i));
        if (c != 0) return c;
      }
      return 0;
    }
  }
  return 0;
}

Position Position::child(int i) const {
  Position p = *this;
  p.path.push_back(i);
  return p;
}

std::string Position::to_string() const {
  std::string out = "[";
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(path[i]);
  }
  return out + "]";
}

void Substitution::bind(const Variable& x, const Term& t) {
  if (!(t.sort() == x.sort))
    throw Error(ErrorCode::SortMismatch,
                "binding " + x.name + ":" + x.sort.name + " to term of sort " + t.sort().name);
  if (t.is_var() && t.variable() == x) {
    map_.erase(x);
    return;
  }
  map_[x] = t;
}

const Term* Substitution::lookup(const Variable& x) const {
  auto it = map_.find(x);
  return it == map_.end() ? nullptr : &it->second;
}

Term Substitution::image(const Variable& x) const {
  auto it = map_.find(x);
  return it == map_.end() ? Term::var(x) : it->second;
}

VarSet Substitution::domain() const {
  VarSet out;
  for (const auto& [k, v] : map_) out.insert(k);
  return out;
}

bool Substitution::operator==(const Substitution& o) const {
  if (map_.size() != o.map_.size()) return false;
  auto it = o.map_.begin();
  for (const auto& [k, v] : map_) {
    if (!(k == it->first) || v != it->second) return false;
    ++it;
  }
  return true;
}

std::string Substitution::to_string() const {
  std::string out = "{";
  bool first = true;
  for (const auto& [k, v] : map_) {
    if (!first) out += ", ";
    first = false;
    out += k.name + "↦" + v.to_string();
  }
  return out + "}";
}

void collect_vars(const Term& t, VarSet& out, std::optional<SortKind> filter) {
  if (t.is_ground()) return;
  if (t.is_var()) {
    if (!filter || t.variable().sort.kind == *filter) out.insert(t.variable());
    return;
  }
  for (const auto& a : t.args()) collect_vars(a, out, filter);
}

VarSet vars_of(const Term& t, std::optional<SortKind> filter) {
  VarSet out;
  collect_vars(t, out, filter);
  return out;
}

Term apply_subst(const Substitution& s, const Term& t) {
  if (s.empty() || t.is_ground()) return t;
  if (t.is_var()) {
    const Term* r = s.lookup(t.variable());
    return r ? *r : t;
  }
  std::vector<Term> args;
  args.reserve(t.args().size());
  bool changed = false;
  for (const auto& a : t.args()) {
    args.push_back(apply_subst(s, a));
    changed = changed || args.back().identity() != a.identity();
  }
  if (!changed) return t;
  return Term::app(t.symbol_ref(), std::move(args));
}

bool match_into(const Term& pattern, const Term& subject, Bindings& b) {
  if (!(pattern.sort() == subject.sort())) return false;
  switch (pattern.kind()) {
    case Term::Kind::Var: {
      auto it = b.find(pattern.variable());
      if (it != b.end()) return it->second == subject;
      b.emplace(pattern.variable(), subject);
      return true;
    }
    case Term::Kind::Val: return pattern == subject;
    case Term::Kind::App: {
      if (!subject.is_app()) return false;
      if (pattern.symbol_ref() != subject.symbol_ref() &&
          !pattern.symbol().same_declaration(subject.symbol()))
        return false;
      if (pattern.is_ground()) return pattern == subject;
      for (std::size_t i = 0; i < pattern.args().size(); ++i)
        if (!match_into(pattern.arg(i), subject.arg(i), b)) return false;
      return true;
    }
  }
  return false;
}

Substitution to_substitution(const Bindings& b) {
  Substitution s;
  for (const auto& [k, v] : b) s.bind(k, v);
  return s;
}

std::optional<Substitution> match(const Term& pattern, const Term& subject) {
  Bindings b;
  if (!match_into(pattern, subject, b)) return std::nullopt;
  return to_substitution(b);
}

namespace {

Term walk(const Term& t, const std::map<Variable, Term>& b) {
  Term cur = t;
  while (cur.is_var()) {
    auto it = b.find(cur.variable());
    if (it == b.end()) break;
    cur = it->second;
  }
  return cur;
}

bool occurs(const Variable& x, const Term& t, const std::map<Variable, Term>& b) {
  Term w = walk(t, b);
  if (w.is_var()) return w.variable() == x;
  for (const auto& a : w.args())
    if (occurs(x, a, b)) return true;
  return false;
}

bool unify_rec(const Term& s, const Term& t, std::map<Variable, Term>& b) {
  Term a = walk(s, b);
  Term c = walk(t, b);
  if (!(a.sort() == c.sort())) return false;
  if (a == c) return true;
  if (a.is_var()) {
    if (occurs(a.variable(), c, b)) return false;
    b[a.variable()] = c;
    return true;
  }
  if (c.is_var()) {
    if (occurs(c.variable(), a, b)) return false;
    b[c.variable()] = a;
    return true;
  }
  if (a.is_value() || c.is_value()) return false;
  if (!a.symbol().same_declaration(c.symbol())) return false;
  for (std::size_t i = 0; i < a.args().size(); ++i)
    if (!unify_rec(a.arg(i), c.arg(i), b)) return false;
  return true;
}

Term resolve(const Term& t, const std::map<Variable, Term>& b) {
  Term w = walk(t, b);
  if (!w.is_app()) return w;
  std::vector<Term> args;
  for (const auto& a : w.args()) args.push_back(resolve(a, b));
  return Term::app(w.symbol_ref(), std::move(args));
}

}  // namespace

std::optional<Substitution> unify(const Term& s, const Term& t) {
  std::map<Variable, Term> b;
  if (!unify_rec(s, t, b)) return std::nullopt;
  Substitution out;
  for (const auto& [k, v] : b) out.bind(k, resolve(v, b));
  return out;
}

bool valid_position(const Term& t, const Position& p) {
  Term cur = t;
  for (int i : p.path) {
    if (!cur.is_app() || i < 1 || static_cast<std::size_t>(i) > cur.args().size()) return false;
    cur = cur.arg(i - 1);
  }
  return true;
}

Term subterm_at(const Term& t, const Position& p) {
  const Term* cur = &t;
  for (int i : p.path) {
    if (!cur->is_app() || i < 1 || static_cast<std::size_t>(i) > cur->args().size())
      throw Error(ErrorCode::InvalidPosition, "position " + p.to_string() + " invalid in " + t.to_string());
    cur = &cur->arg(i - 1);
  }
  return *cur;
}

namespace {

Term replace_rec(const Term& t, const Position& p, std::size_t depth, const Term& u) {
  if (depth == p.path.size()) {
    if (!(t.sort() == u.sort()))
      throw Error(ErrorCode::SortMismatch, "cannot replace subterm of sort " + t.sort().name +
                                               " by term of sort " + u.sort().name);
    return u;
  }
  int i = p.path[depth];
  if (!t.is_app() || i < 1 || static_cast<std::size_t>(i) > t.args().size())
    throw Error(ErrorCode::InvalidPosition, "position " + p.to_string() + " invalid");
  std::vector<Term> args = t.args();
  args[i - 1] = replace_rec(args[i - 1], p, depth + 1, u);
  return Term::app(t.symbol_ref(), std::move(args));
}

void positions_rec(const Term& t, Position& cur, std::vector<Position>& out) {
  out.push_back(cur);
  if (!t.is_app()) return;
  for (std::size_t i = 0; i < t.args().size(); ++i) {
    cur.path.push_back(static_cast<int>(i + 1));
    positions_rec(t.arg(i), cur, out);
    cur.path.pop_back();
  }
}

void each_rec(const Term& t, Position& cur,
              const std::function<void(const Position&, const Term&)>& f) {
  f(cur, t);
  if (!t.is_app()) return;
  for (std::size_t i = 0; i < t.args().size(); ++i) {
    cur.path.push_back(static_cast<int>(i + 1));
    each_rec(t.arg(i), cur, f);
    cur.path.pop_back();
  }
}

void decompose_rec(const Term& s, const Term& t, Position& cur, Decomposition& d,
                   const std::function<bool(const Term&, const Term&)>& stop) {
  if (s == t) return;
  if (s.is_app() && t.is_app() && s.symbol().same_declaration(t.symbol()) &&
      !(stop && stop(s, t))) {
    for (std::size_t i = 0; i < s.args().size(); ++i) {
      cur.path.push_back(static_cast<int>(i + 1));
      decompose_rec(s.arg(i), t.arg(i), cur, d, stop);
      cur.path.pop_back();
    }
    return;
  }
  d.holes.push_back(cur);
  d.pairs.emplace_back(s, t);
}

}  // namespace

Term replace_at(const Term& t, const Position& p, const Term& u) { return replace_rec(t, p, 0, u); }

std::vector<Position> positions(const Term& t) {
  std::vector<Position> out;
  Position cur;
  positions_rec(t, cur, out);
  return out;
}

void for_each_subterm(const Term& t, const std::function<void(const Position&, const Term&)>& f) {
  Position cur;
  each_rec(t, cur, f);
}

Decomposition decompose_differences(const Term& s, const Term& t,
                                    const std::function<bool(const Term&, const Term&)>& stop) {
  if (!(s.sort() == t.sort()))
    throw Error(ErrorCode::SortMismatch, "decomposing terms of different sorts");
  Decomposition d;
  Position cur;
  decompose_rec(s, t, cur, d, stop);
  return d;
}

Term plug(const Term& context_source, const std::vector<Position>& holes,
          const std::vector<Term>& fillers) {
  if (holes.size() != fillers.size())
    throw Error(ErrorCode::InvalidArgument, "hole/filler count mismatch");
  Term out = context_source;
  for (std::size_t i = 0; i < holes.size(); ++i) out = replace_at(out, holes[i], fillers[i]);
  return out;
}

bool is_theory_term_over(const Term& t, const VarSet& x) {
  if (!t.is_theory_term()) return false;
  if (t.is_ground()) return true;
  if (t.is_var()) return x.count(t.variable()) != 0;
  for (const auto& a : t.args())
    if (!is_theory_term_over(a, x)) return false;
  return true;
}

void Signature::add_sort(const Sort& s) {
  for (const auto& e : sort_list_)
    if (e.name == s.name) {
      if (e.kind != s.kind) throw Error(ErrorCode::UnknownSort, "sort " + s.name + " redeclared");
      return;
    }
  sort_list_.push_back(s);
}

void Signature::add_symbol(const SymbolRef& f) {
  for (const auto& s : f->arg_sorts)
    if (!find_sort(s.name)) throw Error(ErrorCode::UnknownSort, "unknown sort " + s.name);
  if (!find_sort(f->result_sort.name))
    throw Error(ErrorCode::UnknownSort, "unknown sort " + f->result_sort.name);
  auto& list = symbols_[f->name];
  for (const auto& g : list) {
    if (g->kind != f->kind)
      throw Error(ErrorCode::UnknownSymbol,
                  "symbol " + f->name + " declared both as theory and term symbol");
    if (g->arg_sorts == f->arg_sorts)
      throw Error(ErrorCode::UnknownSymbol, "symbol " + f->name + " declared twice");
  }
  list.push_back(f);
  order_.push_back(f);
}

const Sort* Signature::find_sort(const std::string& name) const {
  for (const auto& s : sort_list_)
    if (s.name == name) return &s;
  return nullptr;
}

std::vector<SymbolRef> Signature::overloads(const std::string& name) const {
  auto it = symbols_.find(name);
  if (it == symbols_.end()) return {};
  return it->second;
}

SymbolRef Signature::resolve(const std::string& name, const std::vector<Sort>& args) const {
  auto it = symbols_.find(name);
  if (it == symbols_.end()) return nullptr;
  for (const auto& f : it->second)
    if (f->arg_sorts == args) return f;
  return nullptr;
}

std::vector<SymbolRef> Signature::symbols() const { return order_; }

std::vector<SymbolRef> Signature::term_symbols() const {
  std::vector<SymbolRef> out;
  for (const auto& f : order_)
    if (!f->is_theory()) out.push_back(f);
  return out;
}

}  // namespace lcre
