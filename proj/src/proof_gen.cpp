#include "lcre/proof.hpp"
#include "proof_build.hpp"

namespace lcre {

namespace build {

Derivation refl(const Frame& f, const Term& t) {
  Derivation d;
  d.rule = ProofRule::Refl;
  d.conclusion = {f.x, t, t, f.phi};
  return d;
}

Derivation axiom(const Frame& f, const Term& s, const Term& t) {
  Derivation d;
  d.rule = ProofRule::Axiom;
  d.conclusion = {f.x, s, t, f.phi};
  return d;
}

Derivation sym(const Derivation& p) {
  Derivation d;
  d.rule = ProofRule::Sym;
  d.conclusion = p.conclusion;
  std::swap(d.conclusion.lhs, d.conclusion.rhs);
  d.premises.push_back(p);
  return d;
}

Derivation trans(const Derivation& a, const Derivation& b) {
  Derivation d;
  d.rule = ProofRule::Trans;
  d.conclusion = {a.conclusion.logical_vars, a.conclusion.lhs, b.conclusion.rhs, a.conclusion.constraint};
  d.premises = {a, b};
  return d;
}

Derivation chain(std::vector<Derivation> parts) {
  Derivation acc = std::move(parts.back());
  for (std::size_t i = parts.size() - 1; i-- > 0;) acc = trans(parts[i], acc);
  return acc;
}

Derivation lift(const Frame& f, const Term& context, const Position& p, const Derivation& d) {
  if (p.is_root()) return d;
  // Innermost first: walk up from the hole.
  Derivation cur = d;
  for (std::size_t depth = p.path.size(); depth-- > 0;) {
    Position at{std::vector<int>(p.path.begin(), p.path.begin() + static_cast<long>(depth))};
    Term u = subterm_at(context, at);
    int hole = p.path[depth] - 1;  // positions are 1-based
    Derivation cong;
    cong.rule = ProofRule::Cong;
    std::vector<Term> lhs_args = u.args();
    std::vector<Term> rhs_args = u.args();
    lhs_args[static_cast<std::size_t>(hole)] = cur.conclusion.lhs;
    rhs_args[static_cast<std::size_t>(hole)] = cur.conclusion.rhs;
    for (std::size_t i = 0; i < u.args().size(); ++i)
      cong.premises.push_back(static_cast<int>(i) == hole ? cur : refl(f, u.arg(i)));
    cong.conclusion = {f.x, Term::app(u.symbol_ref(), lhs_args), Term::app(u.symbol_ref(), rhs_args), f.phi};
    cur = std::move(cong);
  }
  return cur;
}

Derivation rule_instance(const CETheory& th, const Frame& f, int equation, Direction dir, const Substitution& s) {
  const ConstrainedEquation& e = th.equations[static_cast<std::size_t>(equation)];
  Derivation rule;
  rule.rule = ProofRule::Rule;
  rule.conclusion = e;
  Derivation inst;
  inst.rule = ProofRule::TheoryInstance;
  inst.witness = s;
  inst.conclusion = {f.x, apply_subst(s, e.lhs), apply_subst(s, e.rhs), apply_subst(s, e.constraint)};
  inst.premises.push_back(rule);
  Derivation cur = inst;
  if (inst.conclusion.constraint != f.phi) {
    Derivation w;
    w.rule = ProofRule::Weakening;
    w.conclusion = inst.conclusion;
    w.conclusion.constraint = f.phi;
    w.premises.push_back(inst);
    cur = std::move(w);
  }
  return dir == Direction::LeftToRight ? cur : sym(cur);
}

std::optional<Derivation> close_gap(const Frame& f, const Term& s, const Term& t, const UnderlyingModel& m,
                                    ValidityOracle& oracle) {
  if (s == t) return refl(f, s);
  if (is_theory_term_over(s, f.x) && is_theory_term_over(t, f.x)) {
    if (oracle.check_validity(m.mk_implies(f.phi, m.mk_eq(s, t))).is_valid()) return axiom(f, s, t);
    return std::nullopt;
  }
  if (!s.is_app() || !t.is_app() || !s.symbol().same_declaration(t.symbol())) return std::nullopt;
  Derivation cong;
  cong.rule = ProofRule::Cong;
  cong.conclusion = {f.x, s, t, f.phi};
  for (std::size_t i = 0; i < s.args().size(); ++i) {
    auto sub = close_gap(f, s.arg(i), t.arg(i), m, oracle);
    if (!sub) return std::nullopt;
    cong.premises.push_back(std::move(*sub));
  }
  return cong;
}

}  // namespace build

namespace {

bool within_one_calc(const UnderlyingModel& m, const Term& a, const Term& b) {
  if (a == b) return true;
  for (const auto& c : calc_step_candidates(m, a))
    if (c.result == b) return true;
  for (const auto& c : calc_step_candidates(m, b))
    if (c.result == a) return true;
  return false;
}

}  // namespace

Derivation generate_calc_proof(const CETheory& th, const ConstrainedEquation& ce, ValidityOracle& oracle,
                               int box) {
  ce.validate();
  const UnderlyingModel& m = *th.model;
  std::size_t samples = 0;
  std::optional<Substitution> bad;
  // Theory terms over X go straight to Axiom, however many calculations apart.
  bool axiom_case = is_theory_term_over(ce.lhs, ce.logical_vars) && is_theory_term_over(ce.rhs, ce.logical_vars);
  enumerate_satisfying(m, ce.logical_vars, ce.constraint, box, [&](const Substitution& s) {
    ++samples;
    if (axiom_case) return false;
    if (!within_one_calc(m, apply_subst(s, ce.lhs), apply_subst(s, ce.rhs))) {
      bad = s;
      return false;
    }
    return true;
  });
  if (bad)
    throw Error(ErrorCode::PreconditionUnverifiable,
                "instance " + bad->to_string() + " differs by more than one calculation step");
  if (samples == 0) {
    Verdict unsat = oracle.check_validity(m.mk_not(ce.constraint));
    if (!unsat.is_invalid())
      throw Error(ErrorCode::PreconditionUnverifiable, "constraint is not known to be satisfiable");
  }
  build::Frame f{ce.logical_vars, ce.constraint};
  auto d = build::close_gap(f, ce.lhs, ce.rhs, m, oracle);
  if (!d) throw Error(ErrorCode::PreconditionUnverifiable, "no Refl/Cong/Axiom derivation for " + ce.to_string());
  CheckReport r = check_proof(th, *d, oracle);
  if (!r.accepted()) throw Error(ErrorCode::PreconditionUnverifiable, "generated derivation: " + r.to_string());
  return *d;
}

std::optional<Derivation> derivation_from_trace(const CETheory& th, const ConstrainedEquation& ce,
                                                const ConversionTrace& trace, ValidityOracle& oracle) {
  if (trace.start != ce.lhs) return std::nullopt;
  build::Frame f{ce.logical_vars, ce.constraint};
  std::vector<Derivation> parts;
  Term cur = trace.start;
  for (const auto& st : trace.steps) {
    Term next;
    try {
      next = replay_trace(cur, ConversionTrace{cur, {st}}, th);
    } catch (const Error&) {
      return std::nullopt;
    }
    if (st.kind == StepKind::Rule) {
      parts.push_back(build::lift(f, cur, st.pos, build::rule_instance(th, f, st.equation, st.dir, st.witness)));
    } else {
      Term a = subterm_at(cur, st.pos);
      Term b = subterm_at(next, st.pos);
      parts.push_back(build::lift(f, cur, st.pos, build::axiom(f, a, b)));
    }
    cur = next;
  }
  if (cur != ce.rhs) return std::nullopt;
  Derivation d = parts.empty() ? build::refl(f, ce.lhs) : build::chain(std::move(parts));
  if (!check_proof(th, d, oracle).accepted()) return std::nullopt;
  return d;
}

}  // namespace lcre
