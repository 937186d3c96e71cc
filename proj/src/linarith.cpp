// Refutation of the negated formula by case splitting into conjunctions of
// linear integer constraints and Fourier-Motzkin elimination with gcd tightening.
#include <algorithm>
#include <map>
#include <optional>

#include "lcre/validity.hpp"

namespace lcre {

namespace {

using Monomial = std::vector<int>;
using Poly = std::map<Monomial, BigInt>;

void add_into(Poly& p, const Poly& q, const BigInt& k = 1) {
  for (const auto& [m, c] : q) {
    BigInt& slot = p[m];
    slot += c * k;
    if (slot == 0) p.erase(m);
  }
}

Poly constant(const BigInt& c) {
  Poly p;
  if (c != 0) p[{}] = c;
  return p;
}

Poly multiply(const Poly& a, const Poly& b) {
  Poly out;
  for (const auto& [ma, ca] : a)
    for (const auto& [mb, cb] : b) {
      Monomial m = ma;
      m.insert(m.end(), mb.begin(), mb.end());
      std::sort(m.begin(), m.end());
      BigInt& slot = out[m];
      slot += ca * cb;
      if (slot == 0) out.erase(m);
    }
  return out;
}

std::optional<BigInt> as_constant(const Poly& p) {
  if (p.empty()) return BigInt(0);
  if (p.size() == 1 && p.begin()->first.empty()) return p.begin()->second;
  return std::nullopt;
}

// p ≥ 0 or p = 0
struct LinAtom {
  Poly poly;
  bool eq = false;
};

struct Formula {
  enum class Kind { True, False, Lit, Lin, And, Or } kind = Kind::True;
  std::string lit;
  bool positive = true;
  LinAtom lin;
  std::vector<Formula> kids;
};

Formula mk(Formula::Kind k) {
  Formula f;
  f.kind = k;
  return f;
}

Formula mk_bin(Formula::Kind k, Formula a, Formula b) {
  using K = Formula::Kind;
  if (k == K::And) {
    if (a.kind == K::False || b.kind == K::False) return mk(K::False);
    if (a.kind == K::True) return b;
    if (b.kind == K::True) return a;
  } else {
    if (a.kind == K::True || b.kind == K::True) return mk(K::True);
    if (a.kind == K::False) return b;
    if (b.kind == K::False) return a;
  }
  Formula f = mk(k);
  f.kids.push_back(std::move(a));
  f.kids.push_back(std::move(b));
  return f;
}

Formula lin_ge(Poly p) {
  if (auto c = as_constant(p)) return mk(*c >= 0 ? Formula::Kind::True : Formula::Kind::False);
  Formula f = mk(Formula::Kind::Lin);
  f.lin.poly = std::move(p);
  return f;
}

Formula lin_eq(Poly p) {
  if (auto c = as_constant(p)) return mk(*c == 0 ? Formula::Kind::True : Formula::Kind::False);
  Formula f = mk(Formula::Kind::Lin);
  f.lin.poly = std::move(p);
  f.lin.eq = true;
  return f;
}

struct NotLinear {};

class Translator {
 public:
  std::vector<LinAtom> side;

  Poly lin(const Term& t) {
    switch (t.kind()) {
      case Term::Kind::Val: return constant(t.value().num);
      case Term::Kind::Var: return atom(t);
      case Term::Kind::App: break;
    }
    const FunSymbol& f = t.symbol();
    switch (f.op) {
      case Builtin::Add: {
        Poly p = lin(t.arg(0));
        add_into(p, lin(t.arg(1)));
        return p;
      }
      case Builtin::Sub: {
        Poly p = lin(t.arg(0));
        add_into(p, lin(t.arg(1)), -1);
        return p;
      }
      case Builtin::Neg: {
        Poly p;
        add_into(p, lin(t.arg(0)), -1);
        return p;
      }
      case Builtin::Mul: return multiply(lin(t.arg(0)), lin(t.arg(1)));
      case Builtin::Mod:
      case Builtin::Div: {
        Poly d = lin(t.arg(1));
        auto k = as_constant(d);
        if (!k) return atom(t);
        if (*k == 0) return f.op == Builtin::Div ? Poly{} : lin(t.arg(0));
        std::pair<int, int> qr;
        auto key = std::make_pair(t.arg(0), BigInt(*k));
        auto found = std::find_if(divs_.begin(), divs_.end(), [&](const auto& e) {
          return e.first.first == key.first && e.first.second == key.second;
        });
        if (found != divs_.end()) {
          qr = found->second;
        } else {
          qr = {fresh(), fresh()};
          divs_.push_back({key, qr});
          // a - k q - r = 0, r ≥ 0, |k| - 1 - r ≥ 0
          Poly a = lin(t.arg(0));
          Poly def = a;
          add_into(def, Poly{{{qr.first}, *k}}, -1);
          add_into(def, Poly{{{qr.second}, 1}}, -1);
          side.push_back({def, true});
          side.push_back({Poly{{{qr.second}, 1}}, false});
          BigInt absk = *k < 0 ? BigInt(-*k) : *k;
          Poly ub = constant(absk - 1);
          add_into(ub, Poly{{{qr.second}, 1}}, -1);
          side.push_back({ub, false});
        }
        return Poly{{{f.op == Builtin::Div ? qr.first : qr.second}, 1}};
      }
      default: return atom(t);
    }
  }

  // NNF of t (positive) or ¬t (negative).
  Formula nnf(const Term& t, bool pos) {
    using K = Formula::Kind;
    if (t.is_value()) return mk((t.value().as_bool() == pos) ? K::True : K::False);
    if (t.is_var()) {
      Formula f = mk(K::Lit);
      f.lit = t.variable().name;
      f.positive = pos;
      return f;
    }
    const FunSymbol& f = t.symbol();
    bool int_args = !t.args().empty() && t.arg(0).sort().name == "Int";
    switch (f.op) {
      case Builtin::Not: return nnf(t.arg(0), !pos);
      case Builtin::And:
        return mk_bin(pos ? K::And : K::Or, nnf(t.arg(0), pos), nnf(t.arg(1), pos));
      case Builtin::Or:
        return mk_bin(pos ? K::Or : K::And, nnf(t.arg(0), pos), nnf(t.arg(1), pos));
      case Builtin::Implies:
        return mk_bin(pos ? K::Or : K::And, nnf(t.arg(0), !pos), nnf(t.arg(1), pos));
      case Builtin::Eq:
        if (int_args) {
          Poly d = lin(t.arg(0));
          add_into(d, lin(t.arg(1)), -1);
          if (pos) return lin_eq(d);
          Poly up = d;
          add_into(up, constant(1), -1);
          Poly down;
          add_into(down, d, -1);
          add_into(down, constant(1), -1);
          return mk_bin(K::Or, lin_ge(up), lin_ge(down));
        }
        [[fallthrough]];
      case Builtin::Iff: {
        Formula same = mk_bin(K::Or, mk_bin(K::And, nnf(t.arg(0), true), nnf(t.arg(1), true)),
                              mk_bin(K::And, nnf(t.arg(0), false), nnf(t.arg(1), false)));
        Formula diff = mk_bin(K::Or, mk_bin(K::And, nnf(t.arg(0), true), nnf(t.arg(1), false)),
                              mk_bin(K::And, nnf(t.arg(0), false), nnf(t.arg(1), true)));
        return pos ? same : diff;
      }
      case Builtin::Lt:
      case Builtin::Le:
      case Builtin::Gt:
      case Builtin::Ge: {
        Poly a = lin(t.arg(0));
        Poly b = lin(t.arg(1));
        // normalize to "lhs - rhs REL 0" with REL in {≥, >}
        Poly d;
        bool strict;
        if (f.op == Builtin::Lt || f.op == Builtin::Le) {
          d = b;
          add_into(d, a, -1);
          strict = f.op == Builtin::Lt;
        } else {
          d = a;
          add_into(d, b, -1);
          strict = f.op == Builtin::Gt;
        }
        if (!pos) {
          // ¬(d ≥ 0) ⇔ -d - 1 ≥ 0 ; ¬(d > 0) ⇔ -d ≥ 0
          Poly n;
          add_into(n, d, -1);
          if (!strict) add_into(n, constant(1), -1);
          return lin_ge(n);
        }
        if (strict) add_into(d, constant(1), -1);
        return lin_ge(d);
      }
      default: throw NotLinear{};
    }
  }

 private:
  int fresh() { return next_id_++; }

  Poly atom(const Term& t) {
    auto it = atoms_.find(t);
    int id;
    if (it == atoms_.end()) {
      id = fresh();
      atoms_.emplace(t, id);
    } else {
      id = it->second;
    }
    return Poly{{{id}, 1}};
  }

  int next_id_ = 0;
  std::unordered_map<Term, int, TermHash> atoms_;
  std::vector<std::pair<std::pair<Term, BigInt>, std::pair<int, int>>> divs_;
};

struct TooLarge {};

// Conjunctions of literals; returns false when the cap is exceeded.
using Conj = std::vector<const Formula*>;

void dnf(const Formula& f, std::vector<Conj>& out, std::size_t cap) {
  using K = Formula::Kind;
  switch (f.kind) {
    case K::True: out.push_back({}); return;
    case K::False: return;
    case K::Lit:
    case K::Lin: out.push_back({&f}); return;
    case K::Or:
      for (const auto& k : f.kids) {
        dnf(k, out, cap);
        if (out.size() > cap) throw TooLarge{};
      }
      return;
    case K::And: {
      std::vector<Conj> acc{{}};
      for (const auto& k : f.kids) {
        std::vector<Conj> part;
        dnf(k, part, cap);
        std::vector<Conj> next;
        for (const auto& a : acc)
          for (const auto& b : part) {
            Conj c = a;
            c.insert(c.end(), b.begin(), b.end());
            next.push_back(std::move(c));
            if (next.size() > cap) throw TooLarge{};
          }
        acc = std::move(next);
      }
      for (auto& c : acc) out.push_back(std::move(c));
      if (out.size() > cap) throw TooLarge{};
      return;
    }
  }
}

// Σ coef·v + c ≥ 0  (or = 0)
struct Row {
  std::map<int, BigInt> coef;
  BigInt c;
  bool eq = false;
};

BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) q -= 1;
  return q;
}

// false = contradiction found
bool normalize(Row& r) {
  for (auto it = r.coef.begin(); it != r.coef.end();)
    it = it->second == 0 ? r.coef.erase(it) : std::next(it);
  if (r.coef.empty()) return r.eq ? r.c == 0 : r.c >= 0;
  BigInt g = 0;
  for (const auto& [v, a] : r.coef) g = boost::multiprecision::gcd(g, a < 0 ? BigInt(-a) : a);
  if (g > 1) {
    if (r.eq && r.c % g != 0) return false;
    for (auto& [v, a] : r.coef) a /= g;
    r.c = r.eq ? BigInt(r.c / g) : floor_div(r.c, g);
  }
  return true;
}

// Returns true when the rows are infeasible over the integers.
bool infeasible(std::vector<Row> rows) {
  for (auto& r : rows)
    if (!normalize(r)) return true;
  // Eliminate equalities with a unit coefficient by substitution.
  while (true) {
    auto it = std::find_if(rows.begin(), rows.end(), [](const Row& r) {
      if (!r.eq) return false;
      for (const auto& [v, a] : r.coef)
        if (a == 1 || a == -1) return true;
      return false;
    });
    if (it == rows.end()) break;
    Row e = *it;
    rows.erase(it);
    int var = -1;
    BigInt a;
    for (const auto& [v, k] : e.coef)
      if (k == 1 || k == -1) {
        var = v;
        a = k;
        break;
      }
    // var = -(rest + c)/a
    for (auto& r : rows) {
      auto f = r.coef.find(var);
      if (f == r.coef.end()) continue;
      BigInt k = f->second;
      r.coef.erase(f);
      BigInt mult = -k * a;  // since 1/a == a for a = ±1
      for (const auto& [v, b] : e.coef)
        if (v != var) r.coef[v] += mult * b;
      r.c += mult * e.c;
      if (!normalize(r)) return true;
    }
  }
  std::vector<Row> ineq;
  for (auto& r : rows) {
    if (!r.eq) {
      ineq.push_back(std::move(r));
      continue;
    }
    Row a = r;
    a.eq = false;
    Row b = r;
    b.eq = false;
    for (auto& [v, k] : b.coef) k = -k;
    b.c = -b.c;
    ineq.push_back(std::move(a));
    ineq.push_back(std::move(b));
  }
  const std::size_t cap = 4000;
  while (true) {
    std::map<int, std::pair<int, int>> counts;
    for (const auto& r : ineq)
      for (const auto& [v, a] : r.coef) (a > 0 ? counts[v].first : counts[v].second)++;
    if (counts.empty()) return false;
    int best = -1;
    long best_cost = -1;
    for (const auto& [v, pn] : counts) {
      long cost = static_cast<long>(pn.first) * pn.second - pn.first - pn.second;
      if (best < 0 || cost < best_cost) {
        best = v;
        best_cost = cost;
      }
    }
    std::vector<Row> pos, neg, rest;
    for (auto& r : ineq) {
      auto f = r.coef.find(best);
      if (f == r.coef.end())
        rest.push_back(std::move(r));
      else if (f->second > 0)
        pos.push_back(std::move(r));
      else
        neg.push_back(std::move(r));
    }
    for (const auto& p : pos)
      for (const auto& n : neg) {
        BigInt a = p.coef.at(best);
        BigInt b = -n.coef.at(best);
        Row c;
        for (const auto& [v, k] : p.coef) c.coef[v] += k * b;
        for (const auto& [v, k] : n.coef) c.coef[v] += k * a;
        c.c = p.c * b + n.c * a;
        if (!normalize(c)) return true;
        if (!c.coef.empty()) rest.push_back(std::move(c));
      }
    // drop duplicates, keeping the tightest constant
    std::map<std::map<int, BigInt>, BigInt> dedup;
    for (auto& r : rest) {
      auto [it, fresh] = dedup.emplace(r.coef, r.c);
      if (!fresh && r.c < it->second) it->second = r.c;
    }
    ineq.clear();
    for (auto& [k, c] : dedup) ineq.push_back(Row{k, c, false});
    if (ineq.size() > cap) return false;
  }
}

}  // namespace

bool linear_prove_valid(const UnderlyingModel& m, const Term& phi) {
  if (m.kind() == UnderlyingModel::Kind::IntMod) return false;
  Term body = calc_normalize(m, phi);
  Translator tr;
  Formula neg;
  try {
    neg = tr.nnf(body, false);
  } catch (const NotLinear&) {
    return false;
  }
  std::vector<Conj> cases;
  try {
    dnf(neg, cases, 2048);
  } catch (const TooLarge&) {
    return false;
  }
  // Monomials of degree ≥ 2 become opaque columns.
  std::map<Monomial, int> columns;
  auto to_row = [&](const LinAtom& a) {
    Row r;
    r.eq = a.eq;
    for (const auto& [mono, c] : a.poly) {
      if (mono.empty()) {
        r.c += c;
        continue;
      }
      auto [it, fresh] = columns.emplace(mono, static_cast<int>(columns.size()));
      r.coef[it->second] += c;
    }
    return r;
  };
  for (const auto& conj : cases) {
    std::map<std::string, bool> lits;
    bool clash = false;
    std::vector<Row> rows;
    for (const Formula* f : conj) {
      if (f->kind == Formula::Kind::Lit) {
        auto [it, fresh] = lits.emplace(f->lit, f->positive);
        if (!fresh && it->second != f->positive) clash = true;
      } else {
        rows.push_back(to_row(f->lin));
      }
    }
    if (clash) continue;
    for (const auto& s : tr.side) rows.push_back(to_row(s));
    if (!infeasible(std::move(rows))) return false;
  }
  return true;
}

}  // namespace lcre
