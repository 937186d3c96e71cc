#include <algorithm>
#include <unordered_map>

#include "lcre/proof.hpp"
#include "proof_build.hpp"

namespace lcre {

namespace {

using build::Frame;

void conjuncts(const Term& phi, std::vector<Term>& out) {
  if (phi.is_app() && phi.symbol().op == Builtin::And) {
    for (const auto& a : phi.args()) conjuncts(a, out);
    return;
  }
  out.push_back(phi);
}

bool mentions(const Term& t, const VarSet& vs) {
  for (const auto& v : vars_of(t))
    if (vs.count(v)) return true;
  return false;
}

// Isolates v in `side = other` when side is v, v+k, k+v, v-k or -v.
std::optional<Term> isolate(const UnderlyingModel& m, const Term& side, const Term& other, const Variable& v) {
  if (side.is_var()) return side.variable() == v ? std::optional<Term>(other) : std::nullopt;
  if (!side.is_app()) return std::nullopt;
  const FunSymbol& f = side.symbol();
  const Sort& s = side.sort();
  auto plus = [&](const Term& a, const Term& b) { return Term::app(m.symbol("+", {s, s}), {a, b}); };
  auto minus = [&](const Term& a, const Term& b) { return Term::app(m.symbol("-", {s, s}), {a, b}); };
  VarSet just{v};
  if (f.op == Builtin::Add) {
    if (mentions(side.arg(0), just) && !mentions(side.arg(1), just))
      return isolate(m, side.arg(0), minus(other, side.arg(1)), v);
    if (mentions(side.arg(1), just) && !mentions(side.arg(0), just))
      return isolate(m, side.arg(1), minus(other, side.arg(0)), v);
  } else if (f.op == Builtin::Sub) {
    if (mentions(side.arg(0), just) && !mentions(side.arg(1), just))
      return isolate(m, side.arg(0), plus(other, side.arg(1)), v);
  } else if (f.op == Builtin::Neg) {
    return isolate(m, side.arg(0), Term::app(m.symbol("-", {s}), {other}), v);
  }
  return std::nullopt;
}

class SymbolicProver {
 public:
  SymbolicProver(const CETheory& th, const ConstrainedEquation& ce, ValidityOracle& oracle, const ProveBudget& b)
      : th_(th), m_(*th.model), ce_(ce), oracle_(oracle), budget_(b), frame_{ce.logical_vars, ce.constraint} {
    std::vector<Term> seeds = {ce.lhs, ce.rhs};
    seeds.insert(seeds.end(), b.seeds.begin(), b.seeds.end());
    for (const auto& t : seeds)
      for_each_subterm(t, [&](const Position&, const Term& u) { pool_[u.sort().name].insert(u); });
    for (const auto& x : ce.logical_vars) xpool_[x.sort.name].insert(Term::var(x));
  }

  std::optional<Derivation> run() {
    Side fwd, bwd;
    if (!init(fwd, ce_.lhs) || !init(bwd, ce_.rhs)) return std::nullopt;
    if (auto d = meet_new(fwd, bwd, 0)) return d;
    std::vector<std::size_t> frontier_f = {fwd.nodes.size() - 1}, frontier_b = {bwd.nodes.size() - 1};
    for (int depth = 0; depth < budget_.symbolic_depth; ++depth) {
      bool forward = frontier_f.size() <= frontier_b.size();
      if (frontier_f.empty()) forward = false;
      if (frontier_b.empty()) forward = true;
      if (frontier_f.empty() && frontier_b.empty()) break;
      Side& grow = forward ? fwd : bwd;
      std::vector<std::size_t>& frontier = forward ? frontier_f : frontier_b;
      std::vector<std::size_t> next;
      for (std::size_t idx : frontier) {
        Term u = grow.nodes[idx].term;
        for (auto& [v, edge] : successors(u)) {
          if (grow.index.count(v)) continue;
          if (grow.nodes.size() >= budget_.max_nodes) break;
          std::size_t id = grow.nodes.size();
          grow.nodes.push_back({v, idx, std::move(edge)});
          grow.index.emplace(v, id);
          grow.by_skeleton[skeleton(v).to_string()].push_back(id);
          next.push_back(id);
          auto d = forward ? meet_one(fwd, id, bwd) : meet_one_rev(fwd, bwd, id);
          if (d) return d;
        }
      }
      frontier = std::move(next);
    }
    return std::nullopt;
  }

 private:
  struct Node {
    Term term;
    std::size_t parent;
    std::optional<Derivation> edge;  // ⟨X⟩ parent ≈ term [φ]
  };
  struct Side {
    std::vector<Node> nodes;
    std::unordered_map<Term, std::size_t, TermHash> index;
    std::map<std::string, std::vector<std::size_t>> by_skeleton;
  };

  bool init(Side& side, const Term& t) {
    Term n = calc_normalize(m_, t);
    std::optional<Derivation> edge;
    if (n != t) {
      edge = build::close_gap(frame_, t, n, m_, oracle_);
      if (!edge) return false;
    }
    side.nodes.push_back({t, SIZE_MAX, std::nullopt});
    std::size_t id = 0;
    if (edge) {
      side.nodes.push_back({n, 0, std::move(edge)});
      id = 1;
    }
    side.index.emplace(n, id);
    side.by_skeleton[skeleton(n).to_string()].push_back(id);
    return true;
  }

  // Maximal theory subterms over X collapse to a per-sort placeholder.
  Term skeleton(const Term& t) {
    if (is_theory_term_over(t, ce_.logical_vars))
      return Term::var(Variable{"_" + t.sort().name, t.sort()});
    if (!t.is_app()) return t;
    std::vector<Term> args;
    for (const auto& a : t.args()) args.push_back(skeleton(a));
    return Term::app(t.symbol_ref(), std::move(args));
  }

  // Edges from the root of `side` to node `id`, in order.
  std::vector<Derivation> path(const Side& side, std::size_t id) {
    std::vector<Derivation> out;
    while (side.nodes[id].edge) {
      out.push_back(*side.nodes[id].edge);
      id = side.nodes[id].parent;
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  std::optional<Derivation> join(const Side& fwd, std::size_t a, const Side& bwd, std::size_t b) {
    auto gap = build::close_gap(frame_, fwd.nodes[a].term, bwd.nodes[b].term, m_, oracle_);
    if (!gap) return std::nullopt;
    std::vector<Derivation> parts = path(fwd, a);
    if (gap->rule != ProofRule::Refl) parts.push_back(*gap);
    std::vector<Derivation> back = path(bwd, b);
    for (auto it = back.rbegin(); it != back.rend(); ++it) parts.push_back(build::sym(*it));
    Derivation d = parts.empty() ? build::refl(frame_, ce_.lhs) : build::chain(std::move(parts));
    if (!check_proof(th_, d, oracle_).accepted()) return std::nullopt;
    return d;
  }

  std::optional<Derivation> meet_one(const Side& fwd, std::size_t a, const Side& bwd) {
    auto it = bwd.by_skeleton.find(skeleton(fwd.nodes[a].term).to_string());
    if (it == bwd.by_skeleton.end()) return std::nullopt;
    for (std::size_t b : it->second)
      if (auto d = join(fwd, a, bwd, b)) return d;
    return std::nullopt;
  }

  std::optional<Derivation> meet_one_rev(const Side& fwd, const Side& bwd, std::size_t b) {
    auto it = fwd.by_skeleton.find(skeleton(bwd.nodes[b].term).to_string());
    if (it == fwd.by_skeleton.end()) return std::nullopt;
    for (std::size_t a : it->second)
      if (auto d = join(fwd, a, bwd, b)) return d;
    return std::nullopt;
  }

  std::optional<Derivation> meet_new(const Side& fwd, const Side& bwd, std::size_t) {
    return meet_one(fwd, fwd.nodes.size() - 1, bwd);
  }

  // Matching where a pattern value may face a theory term over X; such pairs
  // become equalities the constraint has to entail.
  bool sym_match(const Term& p, const Term& u, Bindings& b, std::vector<Term>& deferred) {
    if (p.is_var()) {
      auto it = b.find(p.variable());
      if (it == b.end()) {
        b.emplace(p.variable(), u);
        return true;
      }
      if (it->second == u) return true;
      if (p.sort().is_theory() && is_theory_term_over(u, ce_.logical_vars) &&
          is_theory_term_over(it->second, ce_.logical_vars)) {
        deferred.push_back(m_.mk_eq(it->second, u));
        return true;
      }
      return false;
    }
    if (p.is_value()) {
      if (p == u) return true;
      if (p.sort() == u.sort() && is_theory_term_over(u, ce_.logical_vars)) {
        deferred.push_back(m_.mk_eq(u, p));
        return true;
      }
      return false;
    }
    if (!u.is_app() || !p.symbol().same_declaration(u.symbol())) return false;
    for (std::size_t i = 0; i < p.args().size(); ++i)
      if (!sym_match(p.arg(i), u.arg(i), b, deferred)) return false;
    return true;
  }

  std::vector<Term> candidates_for(const Variable& v, bool logical) {
    std::vector<Term> out;
    if (logical) {
      for (const auto& t : xpool_[v.sort.name]) out.push_back(t);
      if (m_.is_finite(v.sort)) {
        for (const auto& c : m_.carrier(v.sort)) out.push_back(Term::val(c));
      } else {
        for (int k = -2; k <= 2; ++k) out.push_back(Term::integer(k));
      }
    } else {
      for (const auto& t : pool_[v.sort.name]) out.push_back(t);
    }
    return out;
  }

  void instantiate_rest(const ConstrainedEquation& e, const Term& to, Bindings b, std::vector<Bindings>& out) {
    VarSet need = vars_of(to);
    collect_vars(e.constraint, need);
    std::vector<Variable> open;
    for (const auto& v : need)
      if (!b.count(v)) open.push_back(v);
    // Solve equalities of the constraint for open logical variables.
    bool progress = true;
    while (progress && !open.empty()) {
      progress = false;
      std::vector<Term> cs;
      conjuncts(apply_subst(to_substitution(b), e.constraint), cs);
      for (const auto& c : cs) {
        if (!c.is_app() || c.symbol().op != Builtin::Eq) continue;
        for (auto it = open.begin(); it != open.end(); ++it) {
          if (!e.logical_vars.count(*it)) continue;
          VarSet rest(open.begin(), open.end());
          rest.erase(*it);
          for (int side = 0; side < 2; ++side) {
            const Term& l = c.arg(side);
            const Term& r = c.arg(1 - side);
            if (mentions(r, VarSet{*it}) || mentions(r, rest) || mentions(l, rest)) continue;
            if (auto sol = isolate(m_, l, r, *it)) {
              b.emplace(*it, calc_normalize(m_, *sol));
              open.erase(it);
              progress = true;
              break;
            }
          }
          if (progress) break;
        }
        if (progress) break;
      }
    }
    std::vector<std::vector<Term>> choices;
    std::size_t combos = 1;
    for (const auto& v : open) {
      choices.push_back(candidates_for(v, e.logical_vars.count(v) != 0));
      combos *= std::max<std::size_t>(choices.back().size(), 1);
      if (choices.back().empty() || combos > 256) return;
    }
    std::vector<std::size_t> idx(open.size(), 0);
    while (true) {
      Bindings full = b;
      for (std::size_t i = 0; i < open.size(); ++i) full.emplace(open[i], choices[i][idx[i]]);
      out.push_back(std::move(full));
      std::size_t i = 0;
      for (; i < idx.size(); ++i) {
        if (++idx[i] < choices[i].size()) break;
        idx[i] = 0;
      }
      if (i == idx.size()) break;
    }
  }

  std::vector<std::pair<Term, Derivation>> successors(const Term& u) {
    std::vector<std::pair<Term, Derivation>> out;
    for (const auto& pos : positions(u)) {
      Term sub = subterm_at(u, pos);
      if (sub.is_var() || sub.is_value()) continue;
      for (std::size_t ei = 0; ei < th_.equations.size(); ++ei) {
        const ConstrainedEquation& e = th_.equations[ei];
        for (Direction dir : {Direction::LeftToRight, Direction::RightToLeft}) {
          const Term& from = dir == Direction::LeftToRight ? e.lhs : e.rhs;
          const Term& to = dir == Direction::LeftToRight ? e.rhs : e.lhs;
          if (from.is_var()) continue;
          Bindings b;
          std::vector<Term> deferred;
          if (!sym_match(from, sub, b, deferred)) continue;
          std::vector<Bindings> all;
          instantiate_rest(e, to, b, all);
          for (const auto& full : all) {
            if (auto step = make_step(u, pos, static_cast<int>(ei), dir, full, deferred))
              out.push_back(std::move(*step));
          }
        }
      }
    }
    return out;
  }

  std::optional<std::pair<Term, Derivation>> make_step(const Term& u, const Position& pos, int ei, Direction dir,
                                                       const Bindings& b, const std::vector<Term>& deferred) {
    const ConstrainedEquation& e = th_.equations[static_cast<std::size_t>(ei)];
    Substitution s = to_substitution(b);
    for (const auto& x : e.logical_vars)
      if (!is_theory_term_over(apply_subst(s, Term::var(x)), ce_.logical_vars)) return std::nullopt;
    std::vector<Term> goals = deferred;
    goals.push_back(apply_subst(s, e.constraint));
    Term need = m_.conjunction(goals);
    if (!oracle_.check_validity(m_.mk_implies(ce_.constraint, need)).is_valid()) return std::nullopt;
    const Term& from = dir == Direction::LeftToRight ? e.lhs : e.rhs;
    const Term& to = dir == Direction::LeftToRight ? e.rhs : e.lhs;
    Term expanded = replace_at(u, pos, apply_subst(s, from));
    Term result = replace_at(u, pos, apply_subst(s, to));
    Term normal = calc_normalize(m_, result);
    if (normal == u) return std::nullopt;
    std::vector<Derivation> parts;
    if (expanded != u) {
      auto g = build::close_gap(frame_, u, expanded, m_, oracle_);
      if (!g) return std::nullopt;
      parts.push_back(*g);
    }
    parts.push_back(build::lift(frame_, expanded, pos, build::rule_instance(th_, frame_, ei, dir, s)));
    if (normal != result) {
      auto g = build::close_gap(frame_, result, normal, m_, oracle_);
      if (!g) return std::nullopt;
      parts.push_back(*g);
    }
    return std::make_pair(normal, build::chain(std::move(parts)));
  }

  const CETheory& th_;
  const UnderlyingModel& m_;
  const ConstrainedEquation& ce_;
  ValidityOracle& oracle_;
  const ProveBudget& budget_;
  Frame frame_;
  std::map<std::string, std::set<Term, TermLess>> pool_;
  std::map<std::string, std::set<Term, TermLess>> xpool_;
};

std::optional<Derivation> ground_attempt(const CETheory& th, const ConstrainedEquation& ce, ValidityOracle& oracle,
                                         const ProveBudget& budget) {
  SearchOptions opt;
  opt.bound = budget.conversion_bound;
  opt.max_nodes = 20000;
  opt.seeds = budget.seeds;
  auto trace = conversion_search(ce.lhs, ce.rhs, th, opt);
  if (!trace) return std::nullopt;
  return derivation_from_trace(th, ce, *trace, oracle);
}

std::optional<Derivation> prove_rec(const CETheory& th, const ConstrainedEquation& ce, ValidityOracle& oracle,
                                    const ProveBudget& budget, int split_depth);

// Case split on the first finite logical variable: one Abst per carrier value.
std::optional<Derivation> split_attempt(const CETheory& th, const ConstrainedEquation& ce, ValidityOracle& oracle,
                                        const ProveBudget& budget, int split_depth) {
  const UnderlyingModel& m = *th.model;
  VarSet st = vars_of(ce.lhs);
  collect_vars(ce.rhs, st);
  for (const auto& v : st)
    if (!ce.logical_vars.count(v)) return std::nullopt;
  for (const auto& x : ce.logical_vars) {
    if (!st.count(x) || !m.is_finite(x.sort)) continue;
    std::vector<Derivation> cases;
    bool ok = true;
    for (const auto& c : m.carrier(x.sort)) {
      Substitution s;
      s.bind(x, Term::val(c));
      Term phi_c_inst = apply_subst(s, ce.constraint);
      if (oracle.check_validity(m.mk_not(phi_c_inst)).is_valid()) continue;
      Term eq = m.mk_eq(Term::var(x), Term::val(c));
      bool trivial = ce.constraint.is_value() && ce.constraint.value().as_bool();
      Term phi_c = trivial ? eq : m.mk_and(ce.constraint, eq);
      ConstrainedEquation sub{ce.logical_vars, apply_subst(s, ce.lhs), apply_subst(s, ce.rhs), apply_subst(s, phi_c)};
      auto p = prove_rec(th, sub, oracle, budget, split_depth - 1);
      if (!p) {
        ok = false;
        break;
      }
      Derivation abst;
      abst.rule = ProofRule::Abst;
      abst.witness = s;
      abst.conclusion = {ce.logical_vars, ce.lhs, ce.rhs, phi_c};
      abst.premises.push_back(std::move(*p));
      cases.push_back(std::move(abst));
    }
    if (!ok || cases.empty()) continue;
    Derivation acc = std::move(cases[0]);
    for (std::size_t i = 1; i < cases.size(); ++i) {
      Derivation sp;
      sp.rule = ProofRule::Split;
      sp.conclusion = acc.conclusion;
      sp.conclusion.constraint = m.mk_or(acc.conclusion.constraint, cases[i].conclusion.constraint);
      sp.premises = {std::move(acc), std::move(cases[i])};
      acc = std::move(sp);
    }
    if (acc.conclusion.constraint != ce.constraint) {
      Derivation w;
      w.rule = ProofRule::Weakening;
      w.conclusion = acc.conclusion;
      w.conclusion.constraint = ce.constraint;
      w.premises.push_back(std::move(acc));
      acc = std::move(w);
    }
    if (check_proof(th, acc, oracle).accepted()) return acc;
  }
  return std::nullopt;
}

std::optional<Derivation> prove_rec(const CETheory& th, const ConstrainedEquation& ce, ValidityOracle& oracle,
                                    const ProveBudget& budget, int split_depth) {
  Frame f{ce.logical_vars, ce.constraint};
  if (auto d = build::close_gap(f, ce.lhs, ce.rhs, *th.model, oracle))
    if (check_proof(th, *d, oracle).accepted()) return d;
  if (auto d = SymbolicProver(th, ce, oracle, budget).run()) return d;
  if (auto d = ground_attempt(th, ce, oracle, budget)) return d;
  if (split_depth > 0)
    if (auto d = split_attempt(th, ce, oracle, budget, split_depth)) return d;
  return std::nullopt;
}

}  // namespace

std::optional<Derivation> prove_heuristic(const CETheory& th, const ConstrainedEquation& ce, ValidityOracle& oracle,
                                          const ProveBudget& budget) {
  ce.validate();
  return prove_rec(th, ce, oracle, budget, budget.split_depth);
}

}  // namespace lcre
