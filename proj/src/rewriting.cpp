#include "lcre/rewriting.hpp"

#include <algorithm>
#include <set>

namespace lcre {

namespace {

std::string xset_string(const VarSet& x) {
  std::string out = "{";
  bool first = true;
  for (const auto& v : x) {
    if (!first) out += ",";
    first = false;
    out += v.name;
  }
  return out + "}";
}

void flatten_and(const Term& phi, std::vector<Term>& out) {
  if (phi.is_app() && phi.symbol().op == Builtin::And) {
    flatten_and(phi.arg(0), out);
    flatten_and(phi.arg(1), out);
  } else {
    out.push_back(phi);
  }
}

void collect_int_literals(const Term& t, std::set<BigInt>& out) {
  for_each_subterm(t, [&](const Position&, const Term& u) {
    if (u.is_value() && u.sort().name == "Int") out.insert(u.value().num);
  });
}

}  // namespace

void ConstrainedEquation::validate() const {
  if (!lhs.valid() || !rhs.valid() || !constraint.valid())
    throw Error(ErrorCode::IllSortedEquation, "incomplete constrained equation");
  if (!(lhs.sort() == rhs.sort()))
    throw Error(ErrorCode::IllSortedEquation, "sides of " + to_string() + " have sorts " +
                                                  lhs.sort().name + " and " + rhs.sort().name);
  if (!(constraint.sort() == bool_sort()) || !constraint.is_theory_term())
    throw Error(ErrorCode::IllSortedEquation, "constraint of " + to_string() + " is not a logical constraint");
  for (const auto& x : logical_vars)
    if (!x.is_theory())
      throw Error(ErrorCode::IllSortedEquation, "logical variable " + x.name + " has term sort");
  for (const auto& v : vars_of(constraint))
    if (!logical_vars.count(v))
      throw Error(ErrorCode::ConstraintVarsNotInX,
                  "constraint variable " + v.name + " of " + to_string() + " is not in X");
}

std::string ConstrainedEquation::to_string() const {
  return "⟨" + xset_string(logical_vars) + "⟩ " + (lhs.valid() ? lhs.to_string() : "?") + " ≈ " +
         (rhs.valid() ? rhs.to_string() : "?") + " [" +
         (constraint.valid() ? constraint.to_string() : "?") + "]";
}

const NamedGoal* CETheory::find_goal(const std::string& name) const {
  for (const auto& g : goals)
    if (g.name == name) return &g;
  return nullptr;
}

std::string TraceStep::to_string() const {
  std::string out = kind == StepKind::Calc ? "calc" : "rule " + std::to_string(equation + 1);
  out += dir == Direction::LeftToRight ? " ->" : " <-";
  out += " @" + pos.to_string();
  if (kind == StepKind::Rule) out += " " + witness.to_string();
  if (result) out += " => " + result->to_string();
  return out;
}

std::size_t ConversionTrace::rule_steps() const {
  std::size_t n = 0;
  for (const auto& s : steps) n += s.kind == StepKind::Rule;
  return n;
}

Term ConversionTrace::end() const {
  for (auto it = steps.rbegin(); it != steps.rend(); ++it)
    if (it->result) return *it->result;
  return start;
}

StepPools StepPools::defaults(const CETheory& th, const std::vector<Term>& goal_terms,
                              const std::vector<Term>& seeds,
                              const std::optional<std::vector<BigInt>>& int_pool) {
  StepPools p;
  const UnderlyingModel& m = *th.model;
  for (const auto& s : m.theory_signature().sorts()) {
    std::vector<Term>& vals = p.values[s.name];
    if (m.is_finite(s)) {
      for (const auto& v : m.carrier(s)) vals.push_back(Term::val(v));
      continue;
    }
    std::set<BigInt> ints;
    if (int_pool) {
      ints.insert(int_pool->begin(), int_pool->end());
    } else {
      for (int k = -8; k <= 8; ++k) ints.insert(k);
      for (const auto& e : th.equations) {
        collect_int_literals(e.lhs, ints);
        collect_int_literals(e.rhs, ints);
        collect_int_literals(e.constraint, ints);
      }
      for (const auto& g : goal_terms) collect_int_literals(calc_normalize(m, g), ints);
    }
    for (const auto& v : ints) vals.push_back(Term::integer(v));
  }
  std::set<Term, TermLess> seen;
  auto add_terms = [&](const Term& root) {
    for_each_subterm(root, [&](const Position&, const Term& u) {
      if (seen.insert(u).second) p.terms[u.sort().name].push_back(u);
    });
  };
  for (const auto& g : goal_terms) add_terms(calc_normalize(m, g));
  for (const auto& g : seeds) add_terms(calc_normalize(m, g));
  for (auto& [sort, list] : p.terms)
    std::sort(list.begin(), list.end(), TermLess{});
  return p;
}

namespace {

// Values for unbound logical variables forced by equational conjuncts, solved
// one unknown at a time.
Bindings solve_from_constraint(const UnderlyingModel& m, const std::vector<Term>& conjuncts,
                               const VarSet& x, const Bindings& bound) {
  Bindings b = bound;
  Bindings solved;
  bool progress = true;
  while (progress) {
    progress = false;
    for (const auto& c : conjuncts) {
      if (!c.is_app() || c.symbol().op != Builtin::Eq) continue;
      Substitution s = to_substitution(b);
      Term l = apply_subst(s, c.arg(0));
      Term r = apply_subst(s, c.arg(1));
      VarSet open;
      collect_vars(l, open);
      collect_vars(r, open);
      if (open.size() != 1) continue;
      const Variable& v = *open.begin();
      if (!x.count(v) || b.count(v)) continue;
      std::optional<Term> value;
      if (l.is_var() && r.is_ground()) {
        value = calc_normalize(m, r);
      } else if (r.is_var() && l.is_ground()) {
        value = calc_normalize(m, l);
      } else if (v.sort.name == "Int" && m.kind() == UnderlyingModel::Kind::Lia) {
        // f(v) = l - r; solvable when f is affine with unit slope
        Term diff = Term::app(m.symbol("-", {int_sort(), int_sort()}), {l, r});
        auto eval = [&](long k) {
          Substitution t;
          t.bind(v, Term::integer(k));
          return interpret(m, apply_subst(t, diff)).num;
        };
        try {
          BigInt f0 = eval(0), f1 = eval(1), f2 = eval(2);
          BigInt slope = f1 - f0;
          if (f2 - f1 == slope && (slope == 1 || slope == -1)) value = Term::integer(-f0 * slope);
        } catch (const Error&) {
        }
      }
      if (value && value->is_value() && m.in_carrier(value->value())) {
        b.emplace(v, *value);
        solved.emplace(v, *value);
        progress = true;
      }
    }
  }
  return solved;
}

// Matching where a theory subterm of the pattern over logical variables may
// stand for a value of the subject; such pairs are returned in `deferred` and
// become extra constraints.
bool match_mod_calc(const Term& pattern, const Term& subject, const VarSet& x, Bindings& b,
                    std::vector<std::pair<Term, Term>>& deferred) {
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
      if (subject.is_value() && pattern.symbol().is_theory() && is_theory_term_over(pattern, x)) {
        deferred.emplace_back(pattern, subject);
        return true;
      }
      if (!subject.is_app()) return false;
      if (pattern.symbol().name != subject.symbol().name ||
          !pattern.symbol().same_declaration(subject.symbol()))
        return false;
      for (std::size_t i = 0; i < pattern.args().size(); ++i)
        if (!match_mod_calc(pattern.arg(i), subject.arg(i), x, b, deferred)) return false;
      return true;
    }
  }
  return false;
}

}  // namespace

std::vector<RuleStep> rule_step_candidates(const Term& t, const CETheory& th, const StepPools& pools) {
  std::vector<RuleStep> out;
  const UnderlyingModel& m = *th.model;
  static const std::vector<Term> empty;
  for_each_subterm(t, [&](const Position& p, const Term& u) {
    for (std::size_t i = 0; i < th.equations.size(); ++i) {
      const ConstrainedEquation& e = th.equations[i];
      for (Direction dir : {Direction::LeftToRight, Direction::RightToLeft}) {
        const Term& pattern = dir == Direction::LeftToRight ? e.lhs : e.rhs;
        const Term& other = dir == Direction::LeftToRight ? e.rhs : e.lhs;
        if (!(pattern.sort() == u.sort())) continue;
        if (pattern.is_value() && pattern != u) continue;
        if (pattern.is_app() && !pattern.symbol().is_theory() &&
            (!u.is_app() || pattern.symbol().name != u.symbol().name))
          continue;
        Bindings b;
        std::vector<std::pair<Term, Term>> deferred;
        if (!match_mod_calc(pattern, u, e.logical_vars, b, deferred)) continue;
        bool ok = true;
        for (const auto& [v, val] : b)
          if (e.logical_vars.count(v) && !val.is_value()) ok = false;
        if (!ok) continue;
        std::vector<Term> conj;
        flatten_and(e.constraint, conj);
        for (const auto& [pt, val] : deferred) conj.push_back(m.mk_eq(pt, val));
        VarSet needed;
        collect_vars(other, needed);
        for (const auto& c : conj) collect_vars(c, needed);
        for (auto it = needed.begin(); it != needed.end();)
          it = b.count(*it) ? needed.erase(it) : std::next(it);
        Bindings solved;
        if (!needed.empty()) solved = solve_from_constraint(m, conj, e.logical_vars, b);
        std::vector<Variable> extra(needed.begin(), needed.end());
        std::vector<std::vector<Term>> choices;
        std::size_t combos = 1;
        for (const auto& v : extra) {
          std::vector<Term> list;
          auto sv = solved.find(v);
          if (sv != solved.end()) list.push_back(sv->second);
          const auto& src = e.logical_vars.count(v) ? pools.values : pools.terms;
          auto it = src.find(v.sort.name);
          for (const auto& c : it == src.end() ? empty : it->second)
            if (sv == solved.end() || c != sv->second) list.push_back(c);
          combos *= list.size();
          choices.push_back(std::move(list));
        }
        if (combos == 0 || combos > pools.max_combinations) continue;
        Term phi = m.conjunction(conj);
        std::vector<std::size_t> idx(extra.size(), 0);
        while (true) {
          Bindings full = b;
          for (std::size_t k = 0; k < extra.size(); ++k) full[extra[k]] = choices[k][idx[k]];
          // logical variables occurring nowhere get a fixed value
          for (const auto& xv : e.logical_vars) {
            if (full.count(xv)) continue;
            auto it = pools.values.find(xv.sort.name);
            if (it != pools.values.end() && !it->second.empty()) full[xv] = it->second.front();
          }
          Substitution s = to_substitution(full);
          bool holds = false;
          try {
            holds = eval_constraint(m, apply_subst(s, phi));
          } catch (const Error&) {
            holds = false;
          }
          if (holds) {
            RuleStep rs{p, static_cast<int>(i), dir, s, replace_at(t, p, apply_subst(s, other)), std::nullopt};
            if (!deferred.empty()) rs.expanded = replace_at(t, p, apply_subst(s, pattern));
            if (rs.result != t) out.push_back(std::move(rs));
          }
          std::size_t k = extra.size();
          bool carry = true;
          while (carry && k > 0) {
            --k;
            if (++idx[k] < choices[k].size()) carry = false;
            else idx[k] = 0;
          }
          if (carry) break;
        }
      }
    }
  });
  return out;
}

Term replay_trace(const Term& s, const ConversionTrace& trace, const CETheory& th) {
  const UnderlyingModel& m = *th.model;
  Term cur = s;
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const TraceStep& st = trace.steps[i];
    auto fail = [&](const std::string& why) -> Term {
      throw Error(ErrorCode::IllegalStep, "step " + std::to_string(i + 1) + ": " + why);
    };
    if (!valid_position(cur, st.pos)) fail("invalid position " + st.pos.to_string());
    Term u = subterm_at(cur, st.pos);
    Term next;
    if (st.kind == StepKind::Calc) {
      if (st.dir == Direction::LeftToRight) {
        if (!u.is_app() || !u.symbol().is_theory()) fail("no calculation redex");
        for (const auto& a : u.args())
          if (!a.is_value()) fail("no calculation redex");
        next = replace_at(cur, st.pos, Term::val(interpret(m, u)));
      } else {
        if (!st.result) fail("reverse calculation step without result");
        if (!u.is_value()) fail("reverse calculation from a non-value");
        if (!valid_position(*st.result, st.pos)) fail("result does not fit position");
        Term redex = subterm_at(*st.result, st.pos);
        if (!redex.is_app() || !redex.symbol().is_theory()) fail("not a calculation redex");
        for (const auto& a : redex.args())
          if (!a.is_value()) fail("not a calculation redex");
        if (!(Term::val(interpret(m, redex)) == u)) fail("calculation does not yield the value");
        next = replace_at(cur, st.pos, redex);
      }
    } else {
      if (st.equation < 0 || static_cast<std::size_t>(st.equation) >= th.equations.size())
        fail("unknown equation index");
      const ConstrainedEquation& e = th.equations[st.equation];
      const Term& from = st.dir == Direction::LeftToRight ? e.lhs : e.rhs;
      const Term& to = st.dir == Direction::LeftToRight ? e.rhs : e.lhs;
      for (const auto& x : e.logical_vars) {
        const Term* img = st.witness.lookup(x);
        bool occurs = vars_of(e.lhs).count(x) || vars_of(e.rhs).count(x) || vars_of(e.constraint).count(x);
        if (occurs && (!img || !img->is_value())) fail("logical variable " + x.name + " not mapped to a value");
      }
      if (apply_subst(st.witness, from) != u) fail("pattern does not match at " + st.pos.to_string());
      Term phi = apply_subst(st.witness, e.constraint);
      if (!phi.is_ground()) fail("constraint instance is not ground");
      if (!eval_constraint(m, phi)) fail("constraint evaluates to false");
      next = replace_at(cur, st.pos, apply_subst(st.witness, to));
    }
    if (st.result && *st.result != next) fail("recorded result differs");
    cur = next;
  }
  return cur;
}

Verdict is_trivial(const ConstrainedEquation& ce, const CETheory& th, ValidityOracle& oracle) {
  const UnderlyingModel& m = *th.model;
  const VarSet& x = ce.logical_vars;
  auto d = decompose_differences(ce.lhs, ce.rhs, [&](const Term& a, const Term& b) {
    return is_theory_term_over(a, x) && is_theory_term_over(b, x);
  });
  bool unknown = false;
  std::string reason;
  bool structural = false;
  for (const auto& [a, b] : d.pairs) {
    if (is_theory_term_over(a, x) && is_theory_term_over(b, x)) {
      Verdict v = oracle.check_validity(m.mk_implies(ce.constraint, m.mk_eq(a, b)));
      if (v.is_invalid()) return v;
      if (v.is_unknown()) {
        unknown = true;
        reason = v.reason;
      }
    } else {
      structural = true;
    }
  }
  if (!structural) return unknown ? Verdict::unknown(reason) : Verdict::valid();
  // Some pair can never be closed by an X-valued instance unless φ is unsatisfiable.
  auto sample = satisfying_list(m, x, ce.constraint, oracle.config().box, 1);
  if (sample.empty()) {
    Verdict unsat = oracle.check_validity(m.mk_not(ce.constraint));
    if (unsat.is_valid()) return Verdict::valid();
    return Verdict::unknown("no satisfying instance found for the constraint");
  }
  Substitution w = sample.front();
  VarSet free;
  for (const auto& [a, b] : d.pairs) {
    if (is_theory_term_over(a, x) && is_theory_term_over(b, x)) continue;
    for (const auto& v : vars_of(a, SortKind::Theory))
      if (!x.count(v)) free.insert(v);
    for (const auto& v : vars_of(b, SortKind::Theory))
      if (!x.count(v)) free.insert(v);
  }
  // Instantiate outside variables so that the instances visibly differ.
  for (long k : {1L, 2L, -1L, 3L, 0L}) {
    Substitution tryw = w;
    for (const auto& v : free) {
      if (m.is_finite(v.sort)) {
        auto c = m.carrier(v.sort);
        tryw.bind(v, Term::val(c[static_cast<std::size_t>(std::abs(k)) % c.size()]));
      } else {
        tryw.bind(v, Term::integer(k));
      }
    }
    if (calc_normalize(m, apply_subst(tryw, ce.lhs)) != calc_normalize(m, apply_subst(tryw, ce.rhs)))
      return Verdict::invalid(tryw);
  }
  return Verdict::invalid(w);
}

std::string ValidityStatus::name() const {
  switch (kind) {
    case Kind::ProvedGroundConversion: return "ProvedGroundConversion";
    case Kind::ProvedByTriviality: return "ProvedByTriviality";
    case Kind::ConfirmedOnSamples: return "ConfirmedOnSamples";
    case Kind::NoConversionWithinBound: return "NoConversionWithinBound";
    case Kind::Unknown: return "Unknown";
  }
  return "";
}

ValidityStatus check_ce_validity(const CETheory& th, const ConstrainedEquation& ce,
                                 ValidityOracle& oracle, const ValidityBudget& budget) {
  ce.validate();
  const UnderlyingModel& m = *th.model;
  ValidityStatus st;
  SearchOptions opt;
  opt.bound = budget.bound;
  opt.max_nodes = budget.max_nodes;
  opt.int_pool = budget.int_pool;
  opt.seeds = budget.seeds;
  bool trivially_true = ce.constraint.is_value() && ce.constraint.value().as_bool();
  if (ce.logical_vars.empty() && trivially_true) {
    auto tr = conversion_search(ce.lhs, ce.rhs, th, opt);
    if (tr) {
      st.kind = ValidityStatus::Kind::ProvedGroundConversion;
      st.trace = tr;
    } else {
      st.kind = ValidityStatus::Kind::NoConversionWithinBound;
      st.note = "no conversion within bound " + std::to_string(budget.bound) +
                " (not a proof of invalidity)";
    }
    return st;
  }
  // Rewrite both sides a little and look for a trivial pair.
  StepPools pools = StepPools::defaults(th, {ce.lhs, ce.rhs}, budget.seeds, budget.int_pool);
  auto left = reachable(ce.lhs, th, pools, budget.rewrite_depth, 2000);
  auto right = reachable(ce.rhs, th, pools, budget.rewrite_depth, 2000);
  std::size_t tried = 0;
  for (std::size_t total = 0; total <= 2 * static_cast<std::size_t>(budget.rewrite_depth); ++total) {
    for (const auto& [l, lt] : left) {
      for (const auto& [r, rt] : right) {
        if (lt.rule_steps() + rt.rule_steps() != total) continue;
        if (++tried > 5000) break;
        ConstrainedEquation cand{ce.logical_vars, l, r, ce.constraint};
        auto d = decompose_differences(l, r, [&](const Term& a, const Term& b) {
          return is_theory_term_over(a, ce.logical_vars) && is_theory_term_over(b, ce.logical_vars);
        });
        bool closable = true;
        for (const auto& [a, b] : d.pairs)
          closable = closable && is_theory_term_over(a, ce.logical_vars) &&
                     is_theory_term_over(b, ce.logical_vars);
        if (!closable && total > 0) continue;
        Verdict v = is_trivial(cand, th, oracle);
        if (v.is_valid()) {
          st.kind = ValidityStatus::Kind::ProvedByTriviality;
          st.lhs_rewritten = l;
          st.rhs_rewritten = r;
          st.lhs_trace = lt;
          st.rhs_trace = rt;
          return st;
        }
      }
    }
  }
  // Sampling: evidence only.
  std::size_t count = 0;
  std::optional<Substitution> failed;
  bool truncated = false;
  enumerate_satisfying(m, ce.logical_vars, ce.constraint, budget.box, [&](const Substitution& s) {
    if (count >= budget.max_samples) {
      truncated = true;
      return false;
    }
    ++count;
    auto tr = conversion_search(apply_subst(s, ce.lhs), apply_subst(s, ce.rhs), th, opt);
    if (!tr) {
      failed = s;
      return false;
    }
    return true;
  });
  if (failed) {
    st.kind = ValidityStatus::Kind::NoConversionWithinBound;
    st.sample = *failed;
    st.samples = count;
    st.note = "sample without conversion within bound " + std::to_string(budget.bound) +
              " (not a proof of invalidity)";
    return st;
  }
  if (count == 0) {
    st.kind = ValidityStatus::Kind::Unknown;
    st.note = "no satisfying sample in the box";
    return st;
  }
  st.kind = ValidityStatus::Kind::ConfirmedOnSamples;
  st.samples = count;
  st.note = "confirmed on " + std::to_string(count) + " samples; evidence, not a proof" +
            (truncated ? " (sample budget exhausted)" : "");
  return st;
}

}  // namespace lcre
