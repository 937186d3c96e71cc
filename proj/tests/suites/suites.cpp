#include "suites.hpp"

#include <chrono>
#include <cstdlib>
#include <random>
#include <set>
#include <sstream>

#include "lcre/algebra.hpp"
#include "lcre/proof.hpp"
#include "lcre/syntax.hpp"

namespace lcre::suites {

std::string SuiteResult::summary() const {
  std::ostringstream out;
  out << cases << " cases, " << violations << " violations, " << seconds << " s";
  if (!detail.empty()) out << "; " << detail;
  if (!first_failure.empty()) out << "; first: " << first_failure;
  return out.str();
}

std::uint32_t seed_from_env(std::uint32_t fallback) {
  if (const char* s = std::getenv("LCRE_SEED")) return static_cast<std::uint32_t>(std::strtoul(s, nullptr, 10));
  return fallback;
}

namespace {

const char* kModTheory = R"(
(theory
  (model (intmod 3))
  (sorts A)
  (funs (c A) (f Int A) (g A A) (k A A A))
  (vars (x Int) (y Int) (z Int) (a A) (b A))
  (eq (pi x) (g (f x)) (f (+ x 1)))
  (eq (constraint (= x 0)) (f x) c)
  (eq (k a b) (k b a))
  (eq (constraint (= x y)) (k (f x) (f y)) (f (+ x y))))
)";

const char* kBoolTheory = R"(
(theory
  (model bool)
  (sorts B)
  (funs (b0 B) (p Bool B) (q B B) (r B B B))
  (vars (x Bool) (y Bool) (u B) (v B))
  (eq (pi x) (q (p x)) (p (not x)))
  (eq (p true) b0)
  (eq (q (q u)) u)
  (eq (constraint (= x y)) (r (p x) (p y)) (p x)))
)";

const char* kLiaTheory = R"(
(theory
  (model lia)
  (funs (h Int Int Int) (u Int Int))
  (vars (x Int) (y Int) (z Int) (w Int) (v Int)))
)";

using Rng = std::mt19937;

int pick(Rng& r, std::size_t n) { return static_cast<int>(r() % static_cast<unsigned>(n)); }
bool coin(Rng& r, int pct) { return pick(r, 100) < pct; }

template <class T>
const T& one_of(Rng& r, const std::vector<T>& v) {
  return v[static_cast<std::size_t>(pick(r, v.size()))];
}

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void violation(SuiteResult& r, const std::string& what) {
  ++r.violations;
  if (r.first_failure.empty()) r.first_failure = what;
}

struct Gen {
  const CETheory& th;
  const UnderlyingModel& m;
  Rng& rng;

  Gen(const CETheory& t, Rng& r) : th(t), m(*t.model), rng(r) {}

  std::vector<Variable> theory_vars() const {
    std::vector<Variable> out;
    for (const auto& [n, v] : th.variables)
      if (v.is_theory()) out.push_back(v);
    return out;
  }
  std::vector<Variable> term_vars() const {
    std::vector<Variable> out;
    for (const auto& [n, v] : th.variables)
      if (!v.is_theory()) out.push_back(v);
    return out;
  }

  VarSet subset(const std::vector<Variable>& from, int pct) {
    VarSet out;
    for (const auto& v : from)
      if (coin(rng, pct)) out.insert(v);
    return out;
  }

  Term value(const Sort& s) {
    if (m.is_finite(s)) return Term::val(one_of(rng, m.carrier(s)));
    return Term::integer(pick(rng, 11) - 5);
  }

  Term theory_term(const Sort& s, const VarSet& x, int depth) {
    std::vector<Variable> vs;
    for (const auto& v : x)
      if (v.sort == s) vs.push_back(v);
    if (depth <= 0 || coin(rng, 45)) {
      if (!vs.empty() && coin(rng, 60)) return Term::var(one_of(rng, vs));
      return value(s);
    }
    std::vector<SymbolRef> fs;
    for (const auto& f : m.theory_signature().symbols()) {
      if (!(f->result_sort == s) || f->arity() == 0) continue;
      if (f->op == Builtin::Div || f->op == Builtin::Mod || f->op == Builtin::Implies || f->op == Builtin::Iff)
        continue;
      fs.push_back(f);
    }
    if (fs.empty()) return value(s);
    const SymbolRef& f = one_of(rng, fs);
    std::vector<Term> args;
    for (const auto& a : f->arg_sorts) args.push_back(theory_term(a, x, depth - 1));
    return Term::app(f, std::move(args));
  }

  Term term(const Sort& s, const VarSet& x, int depth) {
    if (s.is_theory()) return theory_term(s, x, std::min(depth, 1));
    std::vector<SymbolRef> fs;
    std::vector<SymbolRef> leaves;
    for (const auto& f : th.signature.term_symbols())
      if (f->result_sort == s) (f->arity() == 0 ? leaves : fs).push_back(f);
    std::vector<Variable> vs;
    for (const auto& v : term_vars())
      if (v.sort == s) vs.push_back(v);
    if (depth <= 0 || fs.empty() || coin(rng, 30)) {
      if (!vs.empty() && (leaves.empty() || coin(rng, 50))) return Term::var(one_of(rng, vs));
      if (!leaves.empty()) return Term::app(one_of(rng, leaves), {});
    }
    const SymbolRef& f = one_of(rng, fs);
    std::vector<Term> args;
    for (const auto& a : f->arg_sorts) args.push_back(term(a, x, depth - 1));
    return Term::app(f, std::move(args));
  }

  Sort term_sort() {
    std::vector<Sort> ss;
    for (const auto& s : th.signature.sorts())
      if (!s.is_theory()) ss.push_back(s);
    return one_of(rng, ss);
  }

  Term atom(const VarSet& x) {
    std::vector<Variable> vs(x.begin(), x.end());
    if (vs.empty()) return Term::boolean(true);
    const Variable& v = one_of(rng, vs);
    Term lhs = Term::var(v);
    Term rhs = coin(rng, 60) ? value(v.sort) : theory_term(v.sort, x, 1);
    Term eq = m.mk_eq(lhs, rhs);
    return coin(rng, 30) ? m.mk_not(eq) : eq;
  }

  // Random one-hole context for sort s; returns the context and the hole.
  std::pair<Term, Position> context(const Sort& s, const VarSet& x, int depth) {
    std::vector<SymbolRef> fs;
    for (const auto& f : th.signature.term_symbols())
      for (const auto& a : f->arg_sorts)
        if (a == s) {
          fs.push_back(f);
          break;
        }
    Variable hole{"_hole", s};
    if (fs.empty() || depth <= 0) return {Term::var(hole), Position{}};
    const SymbolRef& f = one_of(rng, fs);
    std::vector<int> slots;
    for (std::size_t i = 0; i < f->arity(); ++i)
      if (f->arg_sorts[i] == s) slots.push_back(static_cast<int>(i));
    int at = one_of(rng, slots);
    std::vector<Term> args;
    for (std::size_t i = 0; i < f->arity(); ++i)
      args.push_back(static_cast<int>(i) == at ? Term::var(hole) : term(f->arg_sorts[i], x, 1));
    Term outer = Term::app(f, std::move(args));
    if (coin(rng, 50)) {
      auto [up, pos] = context(f->result_sort, x, depth - 1);
      Term plugged = replace_at(up, pos, outer);
      return {plugged, pos.child(at + 1)};
    }
    return {outer, Position{}.child(at + 1)};
  }
};

bool positive(const ValidityStatus& s) {
  return s.kind == ValidityStatus::Kind::ProvedGroundConversion || s.kind == ValidityStatus::Kind::ProvedByTriviality ||
         s.kind == ValidityStatus::Kind::ConfirmedOnSamples;
}

// Every satisfying instance converts within `bound` rule steps.
bool instances_convert(const CETheory& th, const ConstrainedEquation& ce, int bound, std::string& why,
                       bool calc_only = false) {
  SearchOptions opt;
  opt.bound = bound;
  opt.calc_only = calc_only;
  for (const auto& s : satisfying_list(*th.model, ce.logical_vars, ce.constraint, 8)) {
    Term a = apply_subst(s, ce.lhs);
    Term b = apply_subst(s, ce.rhs);
    if (!conversion_search(a, b, th, opt)) {
      why = ce.to_string() + " at " + s.to_string();
      return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------- derivations

struct Item {
  Derivation d;
  int cost = 0;  // rule steps needed per instance, upper bound
};

class DerivationGen {
 public:
  DerivationGen(const CETheory& th, ValidityOracle& oracle, Rng& rng) : th_(th), m_(*th.model), oracle_(oracle), g_(th, rng), rng_(rng) {}

  std::optional<Item> next() {
    int op = pick(rng_, 13);
    if (pool_.empty() || op == 0) return rule();
    switch (op) {
      case 1: return refl();
      case 2: return axiom();
      case 3: return sym();
      case 4: return trans();
      case 5: case 6: return cong();
      case 7: return tinst();
      case 8: return ginst();
      case 9: return weaken();
      case 10: return split();
      case 11: return abst();
      default: return enlarge();
    }
  }

  void keep(const Item& it) {
    pool_.push_back(it);
    if (pool_.size() > 400) pool_.erase(pool_.begin() + pick(rng_, pool_.size()));
  }

 private:
  static Derivation node(ProofRule r, ConstrainedEquation c, std::vector<Derivation> ps = {}) {
    Derivation d;
    d.rule = r;
    d.conclusion = std::move(c);
    d.premises = std::move(ps);
    return d;
  }
  const Item& any() { return pool_[static_cast<std::size_t>(pick(rng_, pool_.size()))]; }

  std::optional<Item> rule() {
    return Item{node(ProofRule::Rule, one_of(rng_, th_.equations)), 1};
  }

  std::optional<Item> refl() {
    VarSet x = g_.subset(g_.theory_vars(), 50);
    Term t = g_.term(g_.term_sort(), x, 2);
    Term phi = coin(rng_, 50) ? Term::boolean(true) : g_.atom(x);
    return Item{node(ProofRule::Refl, {x, t, t, phi}), 0};
  }

  std::optional<Item> axiom() {
    VarSet x = g_.subset(g_.theory_vars(), 60);
    std::vector<Sort> ss;
    for (const auto& s : th_.signature.sorts())
      if (s.is_theory()) ss.push_back(s);
    Sort s = one_of(rng_, ss);
    Term a = g_.theory_term(s, x, 2);
    Term b = coin(rng_, 50) ? calc_normalize(m_, a) : g_.theory_term(s, x, 2);
    Term phi = coin(rng_, 40) ? m_.mk_eq(a, b) : (coin(rng_, 50) ? Term::boolean(true) : g_.atom(x));
    return Item{node(ProofRule::Axiom, {x, a, b, phi}), 0};
  }

  std::optional<Item> sym() {
    const Item& p = any();
    ConstrainedEquation c = p.d.conclusion;
    std::swap(c.lhs, c.rhs);
    return Item{node(ProofRule::Sym, c, {p.d}), p.cost};
  }

  std::optional<Item> trans() {
    const Item& a = any();
    const ConstrainedEquation& ca = a.d.conclusion;
    for (int tries = 0; tries < 60; ++tries) {
      const Item& b = any();
      const ConstrainedEquation& cb = b.d.conclusion;
      if (cb.logical_vars == ca.logical_vars && cb.constraint == ca.constraint && cb.lhs == ca.rhs)
        return Item{node(ProofRule::Trans, {ca.logical_vars, ca.lhs, cb.rhs, ca.constraint}, {a.d, b.d}),
                    a.cost + b.cost};
    }
    ConstrainedEquation back = ca;
    std::swap(back.lhs, back.rhs);
    Derivation s = node(ProofRule::Sym, back, {a.d});
    return Item{node(ProofRule::Trans, {ca.logical_vars, ca.lhs, ca.lhs, ca.constraint}, {a.d, s}), 2 * a.cost};
  }

  std::optional<Item> cong() {
    const Item& a = any();
    const ConstrainedEquation& ca = a.d.conclusion;
    std::vector<SymbolRef> fs;
    for (const auto& f : th_.signature.term_symbols())
      for (const auto& s : f->arg_sorts)
        if (s == ca.lhs.sort()) {
          fs.push_back(f);
          break;
        }
    if (fs.empty()) return std::nullopt;
    const SymbolRef& f = one_of(rng_, fs);
    std::vector<Derivation> ps;
    std::vector<Term> l, r;
    int cost = 0;
    bool used = false;
    for (const auto& s : f->arg_sorts) {
      if (s == ca.lhs.sort() && (!used || coin(rng_, 30))) {
        const Item& p = used ? any() : a;
        const ConstrainedEquation& cp = p.d.conclusion;
        if (cp.lhs.sort() == s && cp.logical_vars == ca.logical_vars && cp.constraint == ca.constraint) {
          ps.push_back(p.d);
          l.push_back(cp.lhs);
          r.push_back(cp.rhs);
          cost += p.cost;
          used = true;
          continue;
        }
      }
      Term t = g_.term(s, ca.logical_vars, 1);
      ps.push_back(node(ProofRule::Refl, {ca.logical_vars, t, t, ca.constraint}));
      l.push_back(t);
      r.push_back(t);
    }
    return Item{node(ProofRule::Cong, {ca.logical_vars, Term::app(f, l), Term::app(f, r), ca.constraint}, ps), cost};
  }

  std::optional<Item> tinst() {
    const Item& p = any();
    const ConstrainedEquation& c = p.d.conclusion;
    VarSet x = g_.subset(g_.theory_vars(), 50);
    Substitution s;
    for (const auto& y : c.logical_vars) s.bind(y, g_.theory_term(y.sort, x, 1));
    VarSet all = vars_of(c.lhs);
    collect_vars(c.rhs, all);
    for (const auto& v : all)
      if (!c.logical_vars.count(v) && coin(rng_, 40)) s.bind(v, g_.term(v.sort, x, 1));
    Derivation d = node(ProofRule::TheoryInstance,
                        {x, apply_subst(s, c.lhs), apply_subst(s, c.rhs), apply_subst(s, c.constraint)}, {p.d});
    d.witness = s;
    return Item{d, p.cost};
  }

  std::optional<Item> ginst() {
    const Item& p = any();
    const ConstrainedEquation& c = p.d.conclusion;
    VarSet all = vars_of(c.lhs);
    collect_vars(c.rhs, all);
    Substitution s;
    for (const auto& v : all)
      if (!c.logical_vars.count(v)) s.bind(v, g_.term(v.sort, c.logical_vars, 2));
    if (s.empty()) return std::nullopt;
    Derivation d = node(ProofRule::GeneralInstance,
                        {c.logical_vars, apply_subst(s, c.lhs), apply_subst(s, c.rhs), c.constraint}, {p.d});
    d.witness = s;
    return Item{d, p.cost};
  }

  std::optional<Item> weaken() {
    const Item& p = any();
    ConstrainedEquation c = p.d.conclusion;
    Term a = g_.atom(c.logical_vars);
    c.constraint = coin(rng_, 70) ? m_.mk_and(c.constraint, a) : a;
    return Item{node(ProofRule::Weakening, c, {p.d}), p.cost};
  }

  std::optional<Item> split() {
    const Item& p = any();
    const ConstrainedEquation& c = p.d.conclusion;
    Term a = g_.atom(c.logical_vars);
    ConstrainedEquation c1 = c, c2 = c;
    c1.constraint = m_.mk_and(c.constraint, a);
    c2.constraint = m_.mk_and(c.constraint, m_.mk_not(a));
    ConstrainedEquation top = c;
    top.constraint = m_.mk_or(c1.constraint, c2.constraint);
    return Item{node(ProofRule::Split, top,
                     {node(ProofRule::Weakening, c1, {p.d}), node(ProofRule::Weakening, c2, {p.d})}),
                p.cost};
  }

  std::optional<Item> abst() {
    const Item& p = any();
    const ConstrainedEquation& c = p.d.conclusion;
    VarSet used = vars_of(c.lhs);
    collect_vars(c.rhs, used);
    collect_vars(c.constraint, used);
    std::vector<Variable> fresh;
    for (const auto& v : g_.theory_vars())
      if (!used.count(v)) fresh.push_back(v);
    if (fresh.empty()) return std::nullopt;
    Variable v = one_of(rng_, fresh);
    std::vector<std::pair<int, Position>> spots;  // side, position
    std::vector<Term> vals;
    for (int side = 0; side < 2; ++side)
      for_each_subterm(side ? c.rhs : c.lhs, [&](const Position& pos, const Term& u) {
        if (u.is_value() && u.sort() == v.sort) spots.push_back({side, pos});
      });
    if (spots.empty()) return std::nullopt;
    auto [side0, pos0] = one_of(rng_, spots);
    Term cv = subterm_at(side0 ? c.rhs : c.lhs, pos0);
    Term l = c.lhs, r = c.rhs;
    for (const auto& [side, pos] : spots) {
      Term& t = side ? r : l;
      if (subterm_at(t, pos) == cv && (pos == pos0 || coin(rng_, 60))) t = replace_at(t, pos, Term::var(v));
    }
    VarSet x = c.logical_vars;
    x.insert(v);
    Derivation prem = p.d;
    if (!c.logical_vars.count(v)) prem = node(ProofRule::Enlarge, {x, c.lhs, c.rhs, c.constraint}, {prem});
    Term phi = m_.mk_and(c.constraint, m_.mk_eq(Term::var(v), cv));
    Substitution s;
    s.bind(v, cv);
    prem = node(ProofRule::Weakening, {x, c.lhs, c.rhs, apply_subst(s, phi)}, {prem});
    Derivation d = node(ProofRule::Abst, {x, l, r, phi}, {prem});
    d.witness = s;
    return Item{d, p.cost};
  }

  std::optional<Item> enlarge() {
    const Item& p = any();
    const ConstrainedEquation& c = p.d.conclusion;
    VarSet used = vars_of(c.lhs);
    collect_vars(c.rhs, used);
    collect_vars(c.constraint, used);
    VarSet x = c.logical_vars;
    Variable v = one_of(rng_, g_.theory_vars());
    if (x.count(v)) {
      if (used.count(v)) return std::nullopt;
      x.erase(v);
    } else {
      if (used.count(v)) return std::nullopt;
      x.insert(v);
    }
    return Item{node(ProofRule::Enlarge, {x, c.lhs, c.rhs, c.constraint}, {p.d}), p.cost};
  }

  const CETheory& th_;
  const UnderlyingModel& m_;
  ValidityOracle& oracle_;
  Gen g_;
  Rng& rng_;
  std::vector<Item> pool_;
};

void check_preservation(const Derivation& d, bool& ok) {
  try {
    d.conclusion.validate();
  } catch (const Error&) {
    ok = false;
  }
  for (const auto& p : d.premises) check_preservation(p, ok);
}

}  // namespace

SuiteResult soundness_suite(std::uint32_t seed, int count) {
  auto t0 = std::chrono::steady_clock::now();
  SuiteResult res;
  Rng rng(seed);
  std::vector<CETheory> theories = {parse_theory(kModTheory), parse_theory(kBoolTheory)};
  std::map<ProofRule, std::size_t> used;
  std::size_t nodes = 0, samples = 0;
  for (std::size_t ti = 0; ti < theories.size(); ++ti) {
    const CETheory& th = theories[ti];
    ValidityOracle oracle(th.model);
    DerivationGen gen(th, oracle, rng);
    std::set<std::string> seen;
    int target = count / static_cast<int>(theories.size()) + (ti == 0 ? count % static_cast<int>(theories.size()) : 0);
    int got = 0;
    for (int attempt = 0; attempt < 200000 && got < target; ++attempt) {
      auto it = gen.next();
      if (!it || it->cost > 8) continue;
      if (it->d.node_count() > 60) continue;
      if (!check_proof(th, it->d, oracle).accepted()) continue;
      gen.keep(*it);
      if (it->d.node_count() < 2) continue;
      if (!seen.insert(it->d.conclusion.to_string()).second) continue;
      ++got;
      ++res.cases;
      nodes += it->d.node_count();
      for (ProofRule r : all_rules()) used[r] += it->d.count(r);
      samples += satisfying_list(*th.model, it->d.conclusion.logical_vars, it->d.conclusion.constraint, 8).size();
      std::string why;
      if (!instances_convert(th, it->d.conclusion, 10, why)) violation(res, "no conversion for " + why);
      bool ok = true;
      check_preservation(it->d, ok);
      if (!ok) violation(res, "ill-formed node in " + it->d.conclusion.to_string());
      if (parse_proof(serialize_proof(it->d, th), th) != it->d)
        violation(res, "round trip changed " + it->d.conclusion.to_string());
    }
  }
  std::ostringstream out;
  out << "mean nodes " << (res.cases ? nodes / static_cast<std::size_t>(res.cases) : 0) << ", instances " << samples << ", rules";
  for (const auto& [r, n] : used) out << " " << rule_name(r) << "=" << n;
  res.detail = out.str();
  res.seconds = since(t0);
  return res;
}

SuiteResult calc_completeness_suite(std::uint32_t seed, int count) {
  auto t0 = std::chrono::steady_clock::now();
  SuiteResult res;
  Rng rng(seed);
  CETheory th = parse_theory(kLiaTheory);
  const UnderlyingModel& m = *th.model;
  ValidityOracle oracle(th.model);
  Gen g(th, rng);
  Sort I = int_sort();
  std::vector<Variable> logical;
  for (const char* n : {"x", "y", "z", "w"}) logical.push_back(th.variables.at(n));
  Variable free = th.variables.at("v");
  static const char* ops[] = {"+", "-", "*"};
  for (int attempt = 0; attempt < 50 * count && res.cases < count; ++attempt) {
    VarSet x;
    for (const auto& v : logical)
      if (coin(rng, 50)) x.insert(v);
    if (x.empty()) x.insert(one_of(rng, logical));
    std::vector<Variable> xs(x.begin(), x.end());
    auto leaf = [&]() { return coin(rng, 50) ? Term::var(one_of(rng, xs)) : Term::integer(pick(rng, 11) - 5); };
    Term redex = coin(rng, 15) ? Term::app(m.symbol("-", {I}), {leaf()})
                               : Term::app(m.symbol(ops[pick(rng, 3)], {I, I}), {leaf(), leaf()});
    Term rhs;
    Term phi = Term::boolean(true);
    if (redex.is_ground()) {
      rhs = calc_normalize(m, redex);
    } else if (coin(rng, 50)) {
      rhs = Term::var(one_of(rng, xs));
      phi = m.mk_eq(rhs, redex);
    } else {
      rhs = Term::integer(pick(rng, 11) - 5);
      phi = m.mk_eq(redex, rhs);
    }
    if (coin(rng, 30)) phi = m.mk_and(phi, m.mk_not(m.mk_eq(Term::var(one_of(rng, xs)), Term::integer(7))));
    // context over h/u with leaves from X, values and a non-logical variable
    std::function<Term(int)> leafy = [&](int depth) -> Term {
      if (depth <= 0 || coin(rng, 35)) {
        int k = pick(rng, 3);
        if (k == 0) return Term::var(one_of(rng, xs));
        if (k == 1) return Term::integer(pick(rng, 11) - 5);
        return Term::var(free);
      }
      if (coin(rng, 50)) return Term::app(th.signature.resolve("u", {I}), {leafy(depth - 1)});
      return Term::app(th.signature.resolve("h", {I, I}), {leafy(depth - 1), leafy(depth - 1)});
    };
    Term ctx = leafy(3);
    std::vector<Position> spots;
    for_each_subterm(ctx, [&](const Position& p, const Term& u) {
      if (u.sort() == I) spots.push_back(p);
    });
    Position hole = one_of(rng, spots);
    Term s = replace_at(ctx, hole, redex);
    Term t = replace_at(ctx, hole, rhs);
    if (coin(rng, 50)) std::swap(s, t);
    ConstrainedEquation ce{x, s, t, phi};
    // Precondition: a satisfying instance exists in the box.
    if (satisfying_list(m, x, phi, 8, 1).empty()) continue;
    ++res.cases;
    try {
      Derivation d = generate_calc_proof(th, ce, oracle);
      auto r = check_proof(th, d, oracle);
      if (!r.accepted()) violation(res, ce.to_string() + ": " + r.to_string());
      if (d.conclusion != ce) violation(res, ce.to_string() + ": wrong conclusion");
    } catch (const Error& e) {
      violation(res, ce.to_string() + ": " + e.what());
    }
  }
  res.seconds = since(t0);
  return res;
}

namespace {

struct Step {
  Term from, to;
};

std::optional<Step> random_step(const CETheory& th, Gen& g, Rng& rng, const Term& s) {
  auto pools = StepPools::defaults(th, {s});
  auto cands = rule_step_candidates(s, th, pools);
  if (cands.empty()) return std::nullopt;
  return Step{s, one_of(rng, cands).result};
  (void)g;
}

bool has_step(const CETheory& th, const Term& from, const Term& to, const std::vector<Term>& extra = {}) {
  std::vector<Term> goal = {from, to};
  goal.insert(goal.end(), extra.begin(), extra.end());
  auto pools = StepPools::defaults(th, goal);
  for (const auto& c : rule_step_candidates(from, th, pools))
    if (c.result == to || calc_normalize(*th.model, c.result) == calc_normalize(*th.model, to)) return true;
  return false;
}

}  // namespace

SuiteResult symmetry_closure_suite(std::uint32_t seed, int count) {
  auto t0 = std::chrono::steady_clock::now();
  SuiteResult res;
  Rng rng(seed);
  CETheory th = parse_theory(kModTheory);
  Gen g(th, rng);
  Sort A = *th.signature.find_sort("A");
  for (int attempt = 0; attempt < 20 * count && res.cases < count; ++attempt) {
    Term s = g.term(A, {}, 3);
    auto st = random_step(th, g, rng, s);
    if (!st) continue;
    ++res.cases;
    const Term& t = st->to;
    if (!has_step(th, t, s)) violation(res, "no reverse step " + t.to_string() + " -> " + s.to_string());
    auto [ctx, hole] = g.context(A, {}, 2);
    Term cs = replace_at(ctx, hole, s);
    Term ct = replace_at(ctx, hole, t);
    if (cs != ct && !has_step(th, cs, ct)) violation(res, "context lost " + cs.to_string() + " -> " + ct.to_string());
    Substitution sigma;
    VarSet vs = vars_of(s);
    collect_vars(t, vs);
    for (const auto& v : vs) sigma.bind(v, g.term(v.sort, {}, 2));
    Term ss = apply_subst(sigma, s);
    Term ts = apply_subst(sigma, t);
    if (ss != ts && !has_step(th, ss, ts)) violation(res, "instance lost " + ss.to_string() + " -> " + ts.to_string());
  }
  res.seconds = since(t0);
  return res;
}

SuiteResult congruence_suite(std::uint32_t seed, int count) {
  auto t0 = std::chrono::steady_clock::now();
  SuiteResult res;
  Rng rng(seed);
  CETheory th = parse_theory(kModTheory);
  ValidityOracle oracle(th.model);
  Gen g(th, rng);
  Sort A = *th.signature.find_sort("A");
  auto related = [&](const Term& a, const Term& b, int bound) {
    ValidityBudget budget;
    budget.bound = bound;
    return positive(check_ce_validity(th, ConstrainedEquation{{}, a, b, Term::boolean(true)}, oracle, budget));
  };
  auto walk = [&](const Term& s, int steps) {
    Term cur = s;
    for (int i = 0; i < steps; ++i) {
      auto st = random_step(th, g, rng, cur);
      if (!st) break;
      cur = calc_normalize(*th.model, st->to);
    }
    return cur;
  };
  for (int attempt = 0; attempt < 20 * count && res.cases < count; ++attempt) {
    Term s = g.term(A, {}, 3);
    switch (attempt % 4) {
      case 0:
        ++res.cases;
        if (!related(s, s, 4)) violation(res, "not reflexive at " + s.to_string());
        break;
      case 1: {
        Term t = walk(s, 2);
        if (!related(s, t, 4)) break;
        ++res.cases;
        if (!related(t, s, 4)) violation(res, "not symmetric at " + s.to_string() + ", " + t.to_string());
        break;
      }
      case 2: {
        Term t = walk(s, 2);
        Term u = walk(t, 2);
        if (!related(s, t, 4) || !related(t, u, 4)) break;
        ++res.cases;
        if (!related(s, u, 8)) violation(res, "not transitive via " + t.to_string());
        break;
      }
      default: {
        Term t = walk(s, 2);
        if (!related(s, t, 4)) break;
        auto [ctx, hole] = g.context(A, {}, 2);
        ++res.cases;
        if (!related(replace_at(ctx, hole, s), replace_at(ctx, hole, t), 4))
          violation(res, "not congruent in " + ctx.to_string());
      }
    }
  }
  res.seconds = since(t0);
  return res;
}

namespace {

// ⟨X_e⟩ C[ℓ] ≈ C[r] [φ] for a random equation and context.
ConstrainedEquation base_ce(const CETheory& th, Gen& g, Rng& rng) {
  const ConstrainedEquation& e = one_of(rng, th.equations);
  auto [ctx, hole] = g.context(e.lhs.sort(), {}, 2);
  ConstrainedEquation c = e;
  c.lhs = replace_at(ctx, hole, e.lhs);
  c.rhs = replace_at(ctx, hole, e.rhs);
  if (coin(rng, 50)) std::swap(c.lhs, c.rhs);
  return c;
}

SuiteResult stability_common(std::uint32_t seed, int count, bool general) {
  auto t0 = std::chrono::steady_clock::now();
  SuiteResult res;
  Rng rng(seed);
  CETheory th = parse_theory(kModTheory);
  ValidityOracle oracle(th.model);
  Gen g(th, rng);
  for (int attempt = 0; attempt < 20 * count && res.cases < count; ++attempt) {
    ConstrainedEquation c = base_ce(th, g, rng);
    if (!positive(check_ce_validity(th, c, oracle))) continue;
    ConstrainedEquation inst = c;
    Substitution s;
    if (!general) {
      VarSet x = g.subset(g.theory_vars(), 50);
      for (const auto& y : c.logical_vars) s.bind(y, g.theory_term(y.sort, x, 1));
      inst = {x, apply_subst(s, c.lhs), apply_subst(s, c.rhs), apply_subst(s, c.constraint)};
    } else {
      VarSet vs = vars_of(c.lhs);
      collect_vars(c.rhs, vs);
      for (const auto& v : vs)
        if (!c.logical_vars.count(v)) s.bind(v, g.term(v.sort, c.logical_vars, 2));
      if (s.empty()) continue;
      inst.lhs = apply_subst(s, c.lhs);
      inst.rhs = apply_subst(s, c.rhs);
    }
    ++res.cases;
    std::string why;
    if (!instances_convert(th, inst, 8, why)) violation(res, "instance " + why + " of " + c.to_string());
  }
  res.seconds = since(t0);
  return res;
}

}  // namespace

SuiteResult stability_suite(std::uint32_t seed, int count) { return stability_common(seed, count, false); }
SuiteResult general_stability_suite(std::uint32_t seed, int count) { return stability_common(seed, count, true); }

SuiteResult model_consequence_suite(std::uint32_t seed, int count) {
  auto t0 = std::chrono::steady_clock::now();
  SuiteResult res;
  Rng rng(seed);
  std::vector<CETheory> theories = {parse_theory(kModTheory), parse_theory(kBoolTheory)};
  for (int attempt = 0; attempt < 50 * count && res.cases < count; ++attempt) {
    const CETheory& th = theories[static_cast<std::size_t>(attempt % 2)];
    ValidityOracle oracle(th.model);
    Gen g(th, rng);
    VarSet x = g.subset(g.theory_vars(), 60);
    std::vector<Sort> ss;
    for (const auto& s : th.signature.sorts())
      if (s.is_theory()) ss.push_back(s);
    Sort s = one_of(rng, ss);
    Term a = g.theory_term(s, x, 2);
    Term b = g.theory_term(s, x, 2);
    Term phi = coin(rng, 50) ? g.atom(x) : th.model->mk_eq(a, b);
    if (!oracle.check_validity(th.model->mk_implies(phi, th.model->mk_eq(a, b))).is_valid()) continue;
    ++res.cases;
    std::string why;
    if (!instances_convert(th, {x, a, b, phi}, 0, why, true)) violation(res, "no calculation conversion " + why);
  }
  res.seconds = since(t0);
  return res;
}

// ---------------------------------------------------------------- algebras

namespace {

const char* kFgTheory = R"(
(theory
  (model bool)
  (funs (f Bool Bool) (g Bool Bool))
  (vars (x Bool))
  (eq (constraint (= x true)) (f x) true)
  (eq (constraint (= x false)) (f x) true)
  (eq (g x) true))
)";

// Term variables replaced by constants, theory variables by values.
Term grounded(const CETheory& th, Gen& g, const Term& t) {
  Substitution s;
  for (const auto& v : vars_of(t)) {
    if (v.is_theory()) {
      s.bind(v, g.value(v.sort));
      continue;
    }
    for (const auto& f : th.signature.term_symbols())
      if (f->arity() == 0 && f->result_sort == v.sort) s.bind(v, Term::app(f, {}));
  }
  return apply_subst(s, t);
}

Sort any_sort(const CETheory& th, Rng& rng) {
  std::vector<Sort> ss;
  for (const auto& s : th.signature.sorts())
    if (!s.is_theory()) ss.push_back(s);
  if (ss.empty() || coin(rng, 20)) {
    for (const auto& f : th.signature.term_symbols()) ss.push_back(f->result_sort);
  }
  return one_of(rng, ss);
}

CounterModelOptions small_search() {
  CounterModelOptions opt;
  opt.max_extra = 1;
  opt.max_term_sort_size = 2;
  opt.max_nodes = 200000;
  return opt;
}

// Models of th found by refuting random goals.
std::vector<FiniteCEAlgebra> random_models(const CETheory& th, Rng& rng, int want) {
  Gen g(th, rng);
  std::vector<FiniteCEAlgebra> out;
  for (int attempt = 0; attempt < 20 * want && static_cast<int>(out.size()) < want; ++attempt) {
    Sort s = any_sort(th, rng);
    ConstrainedEquation goal{{}, g.term(s, {}, 2), g.term(s, {}, 2), Term::boolean(true)};
    if (goal.lhs == goal.rhs) continue;
    auto r = search_counter_model(th, goal, small_search());
    if (r.algebra && std::none_of(out.begin(), out.end(), [&](const FiniteCEAlgebra& a) { return a == *r.algebra; }))
      out.push_back(std::move(*r.algebra));
  }
  return out;
}

// Random total tables over small carriers; rarely a model.
FiniteCEAlgebra random_algebra(const CETheory& th, Rng& rng) {
  std::vector<Carrier> cs;
  for (const auto& s : th.signature.sorts()) {
    Carrier c{s, {}, {}};
    if (s.is_theory()) {
      c.values = th.model->carrier(s);
      if (c.values.size() < 4 && coin(rng, 60)) c.extras.push_back("#" + s.name + "1");
    } else {
      int n = 1 + pick(rng, 3);
      for (int k = 0; k < n; ++k) c.extras.push_back(s.name + std::to_string(k + 1));
    }
    cs.push_back(std::move(c));
  }
  FiniteCEAlgebra a(th, cs);
  for (std::size_t ti = 0; ti < a.tables().size(); ++ti) {
    const Table& t = a.tables()[ti];
    int n = a.carrier(t.symbol->result_sort).size();
    for (std::size_t ci = 0; ci < t.cells.size(); ++ci)
      if (!t.fixed[ci]) a.set_cell(ti, ci, pick(rng, static_cast<std::size_t>(n)));
  }
  a.validate();
  return a;
}

// Class ids: each non-value element joins a random earlier class or its own.
FiniteCongruence random_partition(const FiniteCEAlgebra& a, Rng& rng) {
  FiniteCongruence c;
  for (const auto& car : a.carriers()) {
    std::vector<int> ids;
    for (int e = 0; e < car.size(); ++e)
      ids.push_back(car.is_value(e) || e == 0 || coin(rng, 50) ? e : ids[static_cast<std::size_t>(pick(rng, e))]);
    c.classes[car.sort.name] = ids;
  }
  return c;
}

// Independent congruence test: no merged values, tables compatible.
bool is_congruence(const FiniteCEAlgebra& a, const FiniteCongruence& c) {
  for (const auto& car : a.carriers()) {
    const auto& ids = c.classes.at(car.sort.name);
    for (int i = 0; i < car.size(); ++i)
      for (int j = i + 1; j < car.size(); ++j)
        if (car.is_value(i) && car.is_value(j) && ids[static_cast<std::size_t>(i)] == ids[static_cast<std::size_t>(j)])
          return false;
  }
  for (const auto& t : a.tables()) {
    const auto& rid = c.classes.at(t.symbol->result_sort.name);
    for (std::size_t i = 0; i < t.cells.size(); ++i) {
      auto ai = a.cell_args(t, i);
      for (std::size_t j = i + 1; j < t.cells.size(); ++j) {
        auto aj = a.cell_args(t, j);
        bool same = true;
        for (std::size_t k = 0; k < ai.size() && same; ++k) {
          const auto& ids = c.classes.at(t.symbol->arg_sorts[k].name);
          same = ids[static_cast<std::size_t>(ai[k])] == ids[static_cast<std::size_t>(aj[k])];
        }
        if (!same) continue;
        int ri = t.cells[i];
        int rj = t.cells[j];
        if ((ri < 0 || rj < 0) ? ri != rj : rid[static_cast<std::size_t>(ri)] != rid[static_cast<std::size_t>(rj)])
          return false;
      }
    }
  }
  return true;
}

bool equation_holds(const FiniteCEAlgebra& a, const ConstrainedEquation& e) {
  VarSet vs = e.logical_vars;
  collect_vars(e.lhs, vs);
  collect_vars(e.rhs, vs);
  collect_vars(e.constraint, vs);
  int yes = a.element_of(bool_value(true));
  return for_each_valuation(a, vs, e.logical_vars, [&](const AlgValuation& rho) {
    return eval_in_algebra(a, e.constraint, rho) != yes || eval_in_algebra(a, e.lhs, rho) == eval_in_algebra(a, e.rhs, rho);
  });
}

}  // namespace

SuiteResult algebra_conversion_suite(std::uint32_t seed, int count) {
  auto t0 = std::chrono::steady_clock::now();
  SuiteResult res;
  Rng rng(seed);
  std::vector<CETheory> theories = {parse_theory(kModTheory), parse_theory(kBoolTheory), parse_theory(kFgTheory)};
  std::vector<std::vector<FiniteCEAlgebra>> models;
  int found = 0;
  for (const auto& th : theories) {
    models.push_back(random_models(th, rng, 4));
    found += static_cast<int>(models.back().size());
  }
  std::size_t steps = 0;
  for (int attempt = 0; attempt < 20 * count && res.cases < count; ++attempt) {
    std::size_t ti = static_cast<std::size_t>(attempt) % theories.size();
    const CETheory& th = theories[ti];
    if (models[ti].empty()) continue;
    const FiniteCEAlgebra& a = one_of(rng, models[ti]);
    Gen g(th, rng);
    if (!check_is_model(a, th).valid) {
      violation(res, "search returned a non-model");
      continue;
    }
    Term s = grounded(th, g, g.term(any_sort(th, rng), {}, 3));
    Term cur = s;
    int len = 1 + pick(rng, 5);
    for (int i = 0; i < len; ++i) {
      auto st = random_step(th, g, rng, cur);
      if (!st) break;
      cur = coin(rng, 50) ? calc_normalize(*th.model, st->to) : st->to;
      ++steps;
    }
    if (cur == s) continue;
    ++res.cases;
    if (eval_in_algebra(a, s, {}) != eval_in_algebra(a, cur, {}))
      violation(res, s.to_string() + " and " + cur.to_string() + " differ in a model");
  }
  res.detail = std::to_string(found) + " models, " + std::to_string(steps) + " steps";
  res.seconds = since(t0);
  return res;
}

SuiteResult quotient_suite(std::uint32_t seed, int count) {
  auto t0 = std::chrono::steady_clock::now();
  SuiteResult res;
  Rng rng(seed);
  std::vector<CETheory> theories = {parse_theory(kModTheory), parse_theory(kBoolTheory), parse_theory(kFgTheory)};
  std::vector<std::vector<FiniteCEAlgebra>> models;
  for (const auto& th : theories) models.push_back(random_models(th, rng, 4));
  int congruences = 0;
  for (int attempt = 0; attempt < 20 * count && res.cases < count; ++attempt) {
    std::size_t ti = static_cast<std::size_t>(attempt) % theories.size();
    const CETheory& th = theories[ti];
    bool use_model = !models[ti].empty() && coin(rng, 50);
    FiniteCEAlgebra a = use_model ? one_of(rng, models[ti]) : random_algebra(th, rng);
    bool small = true;
    for (const auto& c : a.carriers()) small = small && c.size() <= 4;
    if (!small) continue;
    FiniteCongruence c = random_partition(a, rng);
    ++res.cases;
    bool expect = is_congruence(a, c);
    std::optional<FiniteCEAlgebra> q;
    try {
      q = quotient(a, c);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotACongruence) violation(res, std::string("unexpected error: ") + e.what());
    }
    if (expect != q.has_value()) {
      violation(res, std::string(expect ? "congruence rejected" : "non-congruence accepted") + " on " + print_algebra(a));
      continue;
    }
    if (!q) continue;
    ++congruences;
    try {
      q->validate();
    } catch (const Error& e) {
      violation(res, std::string("quotient invalid: ") + e.what());
      continue;
    }
    for (const auto& e : th.equations)
      if (equation_holds(a, e) && !equation_holds(*q, e)) violation(res, "quotient loses " + e.to_string());
    if (check_is_model(a, th).valid && !check_is_model(*q, th).valid) violation(res, "quotient of a model is no model");
  }
  res.detail = std::to_string(congruences) + " congruences";
  res.seconds = since(t0);
  return res;
}

SuiteResult contradiction_suite(std::uint32_t seed, int count) {
  auto t0 = std::chrono::steady_clock::now();
  SuiteResult res;
  Rng rng(seed);
  std::vector<CETheory> theories = {parse_theory(kModTheory), parse_theory(kBoolTheory), parse_theory(kFgTheory)};
  int proved = 0;
  int refuted = 0;
  for (int attempt = 0; attempt < 20 * count && res.cases < count; ++attempt) {
    const CETheory& th = theories[static_cast<std::size_t>(attempt) % theories.size()];
    ValidityOracle oracle(th.model);
    Gen g(th, rng);
    Sort s = any_sort(th, rng);
    ConstrainedEquation goal;
    goal.constraint = Term::boolean(true);
    if (attempt % 2 == 0) {
      // Endpoints of a random walk: provable by conversion.
      Term a = grounded(th, g, g.term(s, {}, 3));
      Term b = a;
      for (int i = 0; i < 3; ++i) {
        auto st = random_step(th, g, rng, b);
        if (!st) break;
        b = st->to;
      }
      goal.lhs = a;
      goal.rhs = b;
    } else {
      goal.logical_vars = g.subset(g.theory_vars(), 50);
      goal.lhs = g.term(s, goal.logical_vars, 2);
      goal.rhs = g.term(s, goal.logical_vars, 2);
      if (coin(rng, 30)) goal.constraint = g.atom(goal.logical_vars);
    }
    try {
      goal.validate();
    } catch (const Error&) {
      continue;
    }
    ++res.cases;
    ValidityBudget vb;
    vb.bound = 6;
    bool is_proved = check_ce_validity(th, goal, oracle, vb).is_proof();
    if (!is_proved) {
      ProveBudget pb;
      pb.conversion_bound = 8;
      pb.split_depth = 1;
      auto d = prove_heuristic(th, goal, oracle, pb);
      is_proved = d && check_proof(th, *d, oracle).accepted();
    }
    auto cm = search_counter_model(th, goal, small_search());
    bool is_refuted = cm.algebra.has_value();
    if (is_refuted && (!check_is_model(*cm.algebra, th).valid || !check_refutes(*cm.algebra, goal)))
      violation(res, "counter-model does not verify for " + goal.to_string());
    proved += is_proved;
    refuted += is_refuted;
    if (is_proved && is_refuted) violation(res, "proved and refuted: " + goal.to_string());
  }
  res.detail = std::to_string(proved) + " proved, " + std::to_string(refuted) + " refuted";
  res.seconds = since(t0);
  return res;
}

}  // namespace lcre::suites
