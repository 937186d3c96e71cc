#include "lcre/model.hpp"

namespace lcre {

namespace {

BigInt euclid_div(const BigInt& a, const BigInt& b) {
  if (b == 0) return 0;
  BigInt q = a / b;  // truncates toward zero
  BigInt r = a - q * b;
  if (r < 0) q += (b > 0) ? -1 : 1;
  return q;
}

BigInt euclid_mod(const BigInt& a, const BigInt& b) {
  if (b == 0) return a;
  return a - b * euclid_div(a, b);
}

}  // namespace

void UnderlyingModel::add(const std::string& name, std::vector<Sort> args, Sort result, Builtin op) {
  sig_.add_symbol(make_symbol(name, std::move(args), std::move(result), SortKind::Theory, op));
}

std::shared_ptr<const UnderlyingModel> UnderlyingModel::boolean() {
  static std::shared_ptr<const UnderlyingModel> m = [] {
    auto u = std::shared_ptr<UnderlyingModel>(new UnderlyingModel());
    u->kind_ = Kind::Bool;
    Sort b = bool_sort();
    u->sig_.add_sort(b);
    u->add("not", {b}, b, Builtin::Not);
    u->add("and", {b, b}, b, Builtin::And);
    u->add("or", {b, b}, b, Builtin::Or);
    u->add("=>", {b, b}, b, Builtin::Implies);
    u->add("<=>", {b, b}, b, Builtin::Iff);
    u->add("=", {b, b}, b, Builtin::Eq);
    return u;
  }();
  return m;
}

std::shared_ptr<const UnderlyingModel> UnderlyingModel::lia() {
  static std::shared_ptr<const UnderlyingModel> m = [] {
    auto u = std::shared_ptr<UnderlyingModel>(new UnderlyingModel());
    u->kind_ = Kind::Lia;
    Sort b = bool_sort();
    Sort i = int_sort();
    u->sig_.add_sort(b);
    u->sig_.add_sort(i);
    u->add("not", {b}, b, Builtin::Not);
    u->add("and", {b, b}, b, Builtin::And);
    u->add("or", {b, b}, b, Builtin::Or);
    u->add("=>", {b, b}, b, Builtin::Implies);
    u->add("<=>", {b, b}, b, Builtin::Iff);
    u->add("=", {b, b}, b, Builtin::Eq);
    u->add("=", {i, i}, b, Builtin::Eq);
    u->add("+", {i, i}, i, Builtin::Add);
    u->add("-", {i, i}, i, Builtin::Sub);
    u->add("-", {i}, i, Builtin::Neg);
    u->add("*", {i, i}, i, Builtin::Mul);
    u->add("mod", {i, i}, i, Builtin::Mod);
    u->add("div", {i, i}, i, Builtin::Div);
    u->add("<", {i, i}, b, Builtin::Lt);
    u->add("<=", {i, i}, b, Builtin::Le);
    u->add(">", {i, i}, b, Builtin::Gt);
    u->add(">=", {i, i}, b, Builtin::Ge);
    return u;
  }();
  return m;
}

std::shared_ptr<const UnderlyingModel> UnderlyingModel::int_mod(int n) {
  if (n < 1 || n > 64) throw Error(ErrorCode::InvalidArgument, "intmod modulus must be in [1,64]");
  auto u = std::shared_ptr<UnderlyingModel>(new UnderlyingModel());
  u->kind_ = Kind::IntMod;
  u->modulus_ = n;
  Sort b = bool_sort();
  Sort i = int_sort();
  u->sig_.add_sort(b);
  u->sig_.add_sort(i);
  u->add("not", {b}, b, Builtin::Not);
  u->add("and", {b, b}, b, Builtin::And);
  u->add("or", {b, b}, b, Builtin::Or);
  u->add("=>", {b, b}, b, Builtin::Implies);
  u->add("<=>", {b, b}, b, Builtin::Iff);
  u->add("=", {b, b}, b, Builtin::Eq);
  u->add("=", {i, i}, b, Builtin::Eq);
  u->add("+", {i, i}, i, Builtin::Add);
  u->add("-", {i, i}, i, Builtin::Sub);
  u->add("-", {i}, i, Builtin::Neg);
  u->add("*", {i, i}, i, Builtin::Mul);
  u->add("<", {i, i}, b, Builtin::Lt);
  u->add("<=", {i, i}, b, Builtin::Le);
  u->add(">", {i, i}, b, Builtin::Gt);
  u->add(">=", {i, i}, b, Builtin::Ge);
  return u;
}

std::string UnderlyingModel::name() const {
  switch (kind_) {
    case Kind::Bool: return "bool";
    case Kind::Lia: return "lia";
    case Kind::IntMod: return "(intmod " + std::to_string(modulus_) + ")";
  }
  return "";
}

bool UnderlyingModel::is_finite(const Sort& s) const {
  if (s.name == "Bool") return true;
  return kind_ == Kind::IntMod;
}

std::vector<Value> UnderlyingModel::carrier(const Sort& s) const {
  if (s.name == "Bool") return {bool_value(false), bool_value(true)};
  if (s.name == "Int" && kind_ == Kind::IntMod) {
    std::vector<Value> out;
    for (int k = 0; k < modulus_; ++k) out.push_back(int_value(k));
    return out;
  }
  throw Error(ErrorCode::InvalidArgument, "carrier of sort " + s.name + " is not finite");
}

bool UnderlyingModel::in_carrier(const Value& v) const {
  if (v.sort.name == "Bool") return v.num == 0 || v.num == 1;
  if (v.sort.name != "Int" || kind_ == Kind::Bool) return false;
  if (kind_ == Kind::IntMod) return v.num >= 0 && v.num < modulus_;
  return true;
}

Value UnderlyingModel::apply(const FunSymbol& f, const std::vector<Value>& a) const {
  auto wrap = [&](BigInt n) {
    if (kind_ == Kind::IntMod) {
      n %= modulus_;
      if (n < 0) n += modulus_;
    }
    return int_value(std::move(n));
  };
  switch (f.op) {
    case Builtin::Not: return bool_value(!a[0].as_bool());
    case Builtin::And: return bool_value(a[0].as_bool() && a[1].as_bool());
    case Builtin::Or: return bool_value(a[0].as_bool() || a[1].as_bool());
    case Builtin::Implies: return bool_value(!a[0].as_bool() || a[1].as_bool());
    case Builtin::Iff: return bool_value(a[0].as_bool() == a[1].as_bool());
    case Builtin::Eq: return bool_value(a[0].num == a[1].num);
    case Builtin::Add: return wrap(a[0].num + a[1].num);
    case Builtin::Sub: return wrap(a[0].num - a[1].num);
    case Builtin::Neg: return wrap(-a[0].num);
    case Builtin::Mul: return wrap(a[0].num * a[1].num);
    case Builtin::Mod: return wrap(euclid_mod(a[0].num, a[1].num));
    case Builtin::Div: return wrap(euclid_div(a[0].num, a[1].num));
    case Builtin::Lt: return bool_value(a[0].num < a[1].num);
    case Builtin::Le: return bool_value(a[0].num <= a[1].num);
    case Builtin::Gt: return bool_value(a[0].num > a[1].num);
    case Builtin::Ge: return bool_value(a[0].num >= a[1].num);
    case Builtin::None: break;
  }
  throw Error(ErrorCode::NonTheorySymbol, "no interpretation for symbol " + f.name);
}

SymbolRef UnderlyingModel::symbol(const std::string& name, const std::vector<Sort>& args) const {
  SymbolRef f = sig_.resolve(name, args);
  if (!f) throw Error(ErrorCode::UnknownSymbol, "model " + this->name() + " lacks symbol " + name);
  return f;
}

SymbolRef UnderlyingModel::eq_symbol(const Sort& s) const { return symbol("=", {s, s}); }

Term UnderlyingModel::mk_eq(const Term& a, const Term& b) const {
  return Term::app(eq_symbol(a.sort()), {a, b});
}
Term UnderlyingModel::mk_and(const Term& a, const Term& b) const {
  return Term::app(and_symbol(), {a, b});
}
Term UnderlyingModel::mk_or(const Term& a, const Term& b) const {
  return Term::app(or_symbol(), {a, b});
}
Term UnderlyingModel::mk_not(const Term& a) const { return Term::app(not_symbol(), {a}); }
Term UnderlyingModel::mk_implies(const Term& a, const Term& b) const {
  return Term::app(implies_symbol(), {a, b});
}

Term UnderlyingModel::conjunction(const std::vector<Term>& parts) const {
  if (parts.empty()) return Term::boolean(true);
  Term out = parts.back();
  for (std::size_t i = parts.size() - 1; i-- > 0;) out = mk_and(parts[i], out);
  return out;
}

namespace {

Value interpret_rec(const UnderlyingModel& m, const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Val:
      if (!m.in_carrier(t.value()))
        throw Error(ErrorCode::InvalidArgument, "value " + t.to_string() + " outside the carrier");
      return t.value();
    case Term::Kind::Var:
      throw Error(ErrorCode::NonGroundInput, "variable " + t.variable().name + " in ground evaluation");
    case Term::Kind::App: {
      if (!t.symbol().is_theory())
        throw Error(ErrorCode::NonTheorySymbol, "term symbol " + t.symbol().name + " in theory evaluation");
      std::vector<Value> args;
      args.reserve(t.args().size());
      for (const auto& a : t.args()) args.push_back(interpret_rec(m, a));
      return m.apply(t.symbol(), args);
    }
  }
  return bool_value(false);
}

Term normalize_rec(const UnderlyingModel& m, const Term& t) {
  if (!t.has_calc_redex()) return t;
  if (t.is_theory_term() && t.is_ground()) return Term::val(interpret_rec(m, t));
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const auto& a : t.args()) args.push_back(normalize_rec(m, a));
  Term out = Term::app(t.symbol_ref(), std::move(args));
  if (out.has_calc_redex()) return normalize_rec(m, out);
  return out;
}

// Position of the leftmost-innermost redex, if any.
bool find_redex(const Term& t, Position& p) {
  if (!t.has_calc_redex()) return false;
  for (std::size_t i = 0; i < t.args().size(); ++i) {
    p.path.push_back(static_cast<int>(i + 1));
    if (find_redex(t.arg(i), p)) return true;
    p.path.pop_back();
  }
  return true;  // t itself: theory symbol applied to values
}

}  // namespace

Value interpret(const UnderlyingModel& m, const Term& t) {
  if (!t.is_ground()) throw Error(ErrorCode::NonGroundInput, "term " + t.to_string() + " is not ground");
  if (!t.is_theory_term())
    throw Error(ErrorCode::NonTheorySymbol, "term " + t.to_string() + " contains a term symbol");
  return interpret_rec(m, t);
}

std::vector<CalcStep> calc_step_candidates(const UnderlyingModel& m, const Term& t) {
  std::vector<CalcStep> out;
  if (!t.has_calc_redex()) return out;
  for_each_subterm(t, [&](const Position& p, const Term& u) {
    if (!u.is_app() || !u.symbol().is_theory()) return;
    for (const auto& a : u.args())
      if (!a.is_value()) return;
    out.push_back({p, replace_at(t, p, Term::val(interpret_rec(m, u)))});
  });
  return out;
}

Term calc_normalize(const UnderlyingModel& m, const Term& t) { return normalize_rec(m, t); }

std::vector<CalcStep> calc_sequence(const UnderlyingModel& m, const Term& t) {
  std::vector<CalcStep> out;
  Term cur = t;
  Position p;
  while (true) {
    p.path.clear();
    if (!find_redex(cur, p)) break;
    Term redex = subterm_at(cur, p);
    cur = replace_at(cur, p, Term::val(interpret_rec(m, redex)));
    out.push_back({p, cur});
  }
  return out;
}

bool eval_constraint(const UnderlyingModel& m, const Term& phi) {
  if (!(phi.sort() == bool_sort())) throw Error(ErrorCode::SortMismatch, "constraint is not of sort Bool");
  return interpret(m, phi).as_bool();
}

void enumerate_satisfying(const UnderlyingModel& m, const VarSet& x, const Term& phi, int box,
                          const std::function<bool(const Substitution&)>& each) {
  std::vector<Variable> vars(x.begin(), x.end());
  std::vector<std::vector<Value>> domains;
  for (const auto& v : vars) {
    if (m.is_finite(v.sort)) {
      domains.push_back(m.carrier(v.sort));
    } else {
      std::vector<Value> d;
      for (int k = -box; k <= box; ++k) d.push_back(int_value(k));
      domains.push_back(std::move(d));
    }
    if (domains.back().empty()) return;
  }
  std::vector<std::size_t> idx(vars.size(), 0);
  while (true) {
    Substitution s;
    for (std::size_t i = 0; i < vars.size(); ++i) s.bind(vars[i], Term::val(domains[i][idx[i]]));
    if (eval_constraint(m, apply_subst(s, phi)))
      if (!each(s)) return;
    std::size_t i = vars.size();
    while (i > 0) {
      --i;
      if (++idx[i] < domains[i].size()) break;
      idx[i] = 0;
      if (i == 0) return;
    }
    if (vars.empty()) return;
  }
}

std::vector<Substitution> satisfying_list(const UnderlyingModel& m, const VarSet& x,
                                          const Term& phi, int box, std::size_t limit) {
  std::vector<Substitution> out;
  if (limit == 0) return out;
  enumerate_satisfying(m, x, phi, box, [&](const Substitution& s) {
    out.push_back(s);
    return out.size() < limit;
  });
  return out;
}

}  // namespace lcre
