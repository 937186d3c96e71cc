#include <algorithm>

#include "lcre/proof.hpp"

namespace lcre {

namespace {

const std::vector<std::pair<ProofRule, const char*>>& rule_table() {
  static const std::vector<std::pair<ProofRule, const char*>> t = {
      {ProofRule::Refl, "Refl"},
      {ProofRule::Trans, "Trans"},
      {ProofRule::Sym, "Sym"},
      {ProofRule::Cong, "Cong"},
      {ProofRule::Rule, "Rule"},
      {ProofRule::TheoryInstance, "TheoryInstance"},
      {ProofRule::GeneralInstance, "GeneralInstance"},
      {ProofRule::Weakening, "Weakening"},
      {ProofRule::Split, "Split"},
      {ProofRule::Axiom, "Axiom"},
      {ProofRule::Abst, "Abst"},
      {ProofRule::Enlarge, "Enlarge"},
  };
  return t;
}

}  // namespace

std::string rule_name(ProofRule r) {
  for (const auto& [k, v] : rule_table())
    if (k == r) return v;
  return "?";
}

std::optional<ProofRule> rule_from_name(const std::string& name) {
  for (const auto& [k, v] : rule_table())
    if (name == v) return k;
  return std::nullopt;
}

const std::vector<ProofRule>& all_rules() {
  static const std::vector<ProofRule> rules = [] {
    std::vector<ProofRule> out;
    for (const auto& [k, v] : rule_table()) out.push_back(k);
    return out;
  }();
  return rules;
}

bool Derivation::operator==(const Derivation& o) const {
  return rule == o.rule && conclusion == o.conclusion && witness == o.witness && premises == o.premises;
}

std::size_t Derivation::node_count() const {
  std::size_t n = 1;
  for (const auto& p : premises) n += p.node_count();
  return n;
}

std::size_t Derivation::count(ProofRule r) const {
  std::size_t n = rule == r;
  for (const auto& p : premises) n += p.count(r);
  return n;
}

std::string proof_error_name(ProofError e) {
  switch (e) {
    case ProofError::ShapeMismatch: return "shape-mismatch";
    case ProofError::SideConditionFailed: return "side-condition-failed";
    case ProofError::NotInTheory: return "not-in-theory";
    case ProofError::OracleUnknown: return "oracle-unknown";
    case ProofError::MalformedCe: return "malformed-ce";
  }
  return "";
}

std::string CheckReport::path_string() const {
  if (path.empty()) return "root";
  std::string out;
  for (int i : path) out += (out.empty() ? "" : ".") + std::to_string(i);
  return out;
}

std::string CheckReport::error_string() const {
  std::string out = proof_error_name(error);
  if (error == ProofError::SideConditionFailed && failed_rule) out += "(" + rule_name(*failed_rule) + ")";
  return out;
}

std::string CheckReport::to_string() const {
  switch (verdict) {
    case Verdict::Accepted: return "Accepted";
    case Verdict::Rejected: return "Rejected at " + path_string() + ": " + error_string() + ": " + detail;
    case Verdict::OracleUnknown:
      return "OracleUnknown at " + path_string() + ": " + (constraint.valid() ? constraint.to_string() : "") +
             (detail.empty() ? "" : " (" + detail + ")");
  }
  return "";
}

namespace {

// Outcome of checking one node.
struct NodeResult {
  bool ok = true;
  bool unknown = false;
  ProofError error = ProofError::ShapeMismatch;
  std::optional<ProofRule> rule;
  std::string detail;
  Term constraint;
};

NodeResult fail(ProofError e, std::string detail, std::optional<ProofRule> r = std::nullopt) {
  NodeResult n;
  n.ok = false;
  n.error = e;
  n.rule = r;
  n.detail = std::move(detail);
  return n;
}

bool subset(const VarSet& a, const VarSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::string ce_str(const ConstrainedEquation& c) { return c.to_string(); }

class Checker {
 public:
  Checker(const CETheory& th, ValidityOracle& oracle) : th_(th), m_(*th.model), oracle_(oracle) {}

  NodeResult check(const Derivation& d) {
    const ConstrainedEquation& c = d.conclusion;
    const std::size_t n = d.premises.size();
    auto arity_ok = [&]() -> bool {
      switch (d.rule) {
        case ProofRule::Refl:
        case ProofRule::Rule:
        case ProofRule::Axiom: return n == 0;
        case ProofRule::Sym:
        case ProofRule::TheoryInstance:
        case ProofRule::GeneralInstance:
        case ProofRule::Weakening:
        case ProofRule::Abst:
        case ProofRule::Enlarge: return n == 1;
        case ProofRule::Trans:
        case ProofRule::Split: return n == 2;
        case ProofRule::Cong: return true;
      }
      return false;
    };
    if (!arity_ok())
      return fail(ProofError::ShapeMismatch, rule_name(d.rule) + " with " + std::to_string(n) + " premises");
    bool needs_witness = d.rule == ProofRule::TheoryInstance || d.rule == ProofRule::GeneralInstance ||
                         d.rule == ProofRule::Abst;
    if (needs_witness && !d.witness) return fail(ProofError::ShapeMismatch, rule_name(d.rule) + " without substitution");

    if (auto bad = sanity(c)) return *bad;
    for (const auto& p : d.premises)
      if (auto bad = sanity(p.conclusion)) return fail(ProofError::MalformedCe, "premise: " + bad->detail);

    NodeResult r = check_rule(d);
    if (!r.ok || r.unknown) return r;
    if (!subset(vars_of(c.constraint), c.logical_vars))
      return fail(ProofError::MalformedCe, "Var(φ) ⊄ X in " + ce_str(c));
    return r;
  }

 private:
  std::optional<NodeResult> sanity(const ConstrainedEquation& c) {
    if (!c.lhs.valid() || !c.rhs.valid() || !c.constraint.valid())
      return fail(ProofError::MalformedCe, "incomplete conclusion");
    if (!(c.lhs.sort() == c.rhs.sort())) return fail(ProofError::MalformedCe, "sides differ in sort: " + ce_str(c));
    if (!(c.constraint.sort() == bool_sort()) || !c.constraint.is_theory_term())
      return fail(ProofError::MalformedCe, "constraint is not a logical constraint: " + ce_str(c));
    for (const auto& x : c.logical_vars)
      if (!x.is_theory()) return fail(ProofError::MalformedCe, "logical variable " + x.name + " has a term sort");
    return std::nullopt;
  }

  // Validity of phi; fills `out` on failure or unknown.
  bool valid(const Term& phi, ProofRule r, const std::string& what, NodeResult& out) {
    Verdict v = oracle_.check_validity(phi);
    if (v.is_valid()) return true;
    if (v.is_invalid()) {
      out = fail(ProofError::SideConditionFailed, what + " fails for " + v.witness.to_string(), r);
    } else {
      out = NodeResult{};
      out.unknown = true;
      out.constraint = phi;
      out.detail = v.reason;
    }
    return false;
  }

  NodeResult side(ProofRule r, const std::string& what) {
    return fail(ProofError::SideConditionFailed, what, r);
  }

  NodeResult check_rule(const Derivation& d) {
    const ConstrainedEquation& c = d.conclusion;
    const VarSet& X = c.logical_vars;
    auto same_frame = [&](const ConstrainedEquation& p) {
      return p.logical_vars == X && p.constraint == c.constraint;
    };
    auto phi_in_x = [&]() { return subset(vars_of(c.constraint), X); };
    NodeResult ok;
    switch (d.rule) {
      case ProofRule::Refl:
        if (c.lhs != c.rhs) return fail(ProofError::ShapeMismatch, "sides differ");
        if (!phi_in_x()) return side(ProofRule::Refl, "Var(φ) ⊄ X");
        return ok;

      case ProofRule::Trans: {
        const auto& a = d.premises[0].conclusion;
        const auto& b = d.premises[1].conclusion;
        if (!same_frame(a) || !same_frame(b)) return fail(ProofError::ShapeMismatch, "premises differ in X or φ");
        if (a.lhs != c.lhs || b.rhs != c.rhs) return fail(ProofError::ShapeMismatch, "outer terms do not match");
        if (a.rhs != b.lhs) return fail(ProofError::ShapeMismatch, "middle terms differ");
        return ok;
      }

      case ProofRule::Sym: {
        const auto& p = d.premises[0].conclusion;
        if (!same_frame(p) || p.lhs != c.rhs || p.rhs != c.lhs)
          return fail(ProofError::ShapeMismatch, "premise is not the mirrored equation");
        return ok;
      }

      case ProofRule::Cong: {
        if (!c.lhs.is_app() || !c.rhs.is_app() || !c.lhs.symbol().same_declaration(c.rhs.symbol()))
          return fail(ProofError::ShapeMismatch, "sides are not applications of the same symbol");
        if (d.premises.size() != c.lhs.args().size())
          return fail(ProofError::ShapeMismatch, "premise count differs from the arity");
        for (std::size_t i = 0; i < d.premises.size(); ++i) {
          const auto& p = d.premises[i].conclusion;
          if (!same_frame(p)) return fail(ProofError::ShapeMismatch, "premise " + std::to_string(i) + " differs in X or φ");
          if (p.lhs != c.lhs.arg(i) || p.rhs != c.rhs.arg(i))
            return fail(ProofError::ShapeMismatch, "premise " + std::to_string(i) + " does not match argument");
        }
        return ok;
      }

      case ProofRule::Rule:
        for (const auto& e : th_.equations)
          if (e == c) return ok;
        return fail(ProofError::NotInTheory, ce_str(c) + " is not an equation of the theory");

      case ProofRule::TheoryInstance: {
        const auto& p = d.premises[0].conclusion;
        const Substitution& s = *d.witness;
        if (apply_subst(s, p.lhs) != c.lhs || apply_subst(s, p.rhs) != c.rhs ||
            apply_subst(s, p.constraint) != c.constraint)
          return fail(ProofError::ShapeMismatch, "conclusion is not the instance of the premise");
        for (const auto& y : p.logical_vars)
          if (!is_theory_term_over(s.image(y), X))
            return side(ProofRule::TheoryInstance, y.name + "σ = " + s.image(y).to_string() + " ∉ T(Fth, X)");
        return ok;
      }

      case ProofRule::GeneralInstance: {
        const auto& p = d.premises[0].conclusion;
        const Substitution& s = *d.witness;
        if (!same_frame(p)) return fail(ProofError::ShapeMismatch, "premise differs in X or φ");
        if (apply_subst(s, p.lhs) != c.lhs || apply_subst(s, p.rhs) != c.rhs)
          return fail(ProofError::ShapeMismatch, "conclusion is not the instance of the premise");
        for (const auto& v : s.domain())
          if (X.count(v)) return side(ProofRule::GeneralInstance, "Dom(σ) ∩ X contains " + v.name);
        return ok;
      }

      case ProofRule::Weakening: {
        const auto& p = d.premises[0].conclusion;
        if (p.logical_vars != X || p.lhs != c.lhs || p.rhs != c.rhs)
          return fail(ProofError::ShapeMismatch, "premise differs beyond its constraint");
        if (!phi_in_x()) return side(ProofRule::Weakening, "Var(φ) ⊄ X");
        NodeResult out;
        if (!valid(m_.mk_implies(c.constraint, p.constraint), ProofRule::Weakening, "φ ⇒ ψ", out)) return out;
        return ok;
      }

      case ProofRule::Split: {
        const auto& a = d.premises[0].conclusion;
        const auto& b = d.premises[1].conclusion;
        if (a.logical_vars != X || b.logical_vars != X || a.lhs != c.lhs || a.rhs != c.rhs || b.lhs != c.lhs ||
            b.rhs != c.rhs)
          return fail(ProofError::ShapeMismatch, "premises differ beyond their constraints");
        const Term& phi = c.constraint;
        if (!phi.is_app() || phi.symbol().op != Builtin::Or || phi.arg(0) != a.constraint ||
            phi.arg(1) != b.constraint)
          return fail(ProofError::ShapeMismatch, "constraint is not the disjunction of the premise constraints");
        return ok;
      }

      case ProofRule::Axiom: {
        if (!is_theory_term_over(c.lhs, X) || !is_theory_term_over(c.rhs, X))
          return side(ProofRule::Axiom, "sides are not in T(Fth, X)");
        if (!phi_in_x()) return side(ProofRule::Axiom, "Var(φ) ⊄ X");
        NodeResult out;
        if (!valid(m_.mk_implies(c.constraint, m_.mk_eq(c.lhs, c.rhs)), ProofRule::Axiom, "φ ⇒ s = t", out))
          return out;
        return ok;
      }

      case ProofRule::Abst: {
        const auto& p = d.premises[0].conclusion;
        const Substitution& s = *d.witness;
        if (p.logical_vars != X || p.lhs != apply_subst(s, c.lhs) || p.rhs != apply_subst(s, c.rhs) ||
            p.constraint != apply_subst(s, c.constraint))
          return fail(ProofError::ShapeMismatch, "premise is not the instance of the conclusion");
        if (!phi_in_x()) return side(ProofRule::Abst, "Var(φ) ⊄ X");
        VarSet st = vars_of(c.lhs);
        collect_vars(c.rhs, st);
        if (!subset(st, X)) return side(ProofRule::Abst, "Var(s, t) ⊄ X");
        std::vector<Term> eqs;
        for (const auto& x : X) {
          Term img = s.image(x);
          if (!is_theory_term_over(img, X))
            return side(ProofRule::Abst, "σ(" + x.name + ") = " + img.to_string() + " is not a theory term over X");
          eqs.push_back(m_.mk_eq(Term::var(x), img));
        }
        NodeResult out;
        if (!valid(m_.mk_implies(c.constraint, m_.conjunction(eqs)), ProofRule::Abst, "φ ⇒ ⋀ x = σ(x)", out))
          return out;
        return ok;
      }

      case ProofRule::Enlarge: {
        const auto& p = d.premises[0].conclusion;
        if (p.lhs != c.lhs || p.rhs != c.rhs || p.constraint != c.constraint)
          return fail(ProofError::ShapeMismatch, "premise differs beyond X");
        VarSet st = vars_of(c.lhs);
        collect_vars(c.rhs, st);
        for (const auto& y : p.logical_vars)
          if (!X.count(y) && st.count(y)) return side(ProofRule::Enlarge, "removed variable " + y.name + " occurs in s, t");
        if (!phi_in_x()) return side(ProofRule::Enlarge, "Var(φ) ⊄ X");
        return ok;
      }
    }
    return ok;
  }

  const CETheory& th_;
  const UnderlyingModel& m_;
  ValidityOracle& oracle_;
};

void walk(Checker& ck, const Derivation& d, std::vector<int>& path, CheckReport& report,
          std::optional<CheckReport>& unknown) {
  NodeResult r = ck.check(d);
  if (!r.ok) {
    report.verdict = CheckReport::Verdict::Rejected;
    report.path = path;
    report.error = r.error;
    report.failed_rule = r.rule;
    report.detail = r.detail;
    return;
  }
  if (r.unknown && !unknown) {
    CheckReport u;
    u.verdict = CheckReport::Verdict::OracleUnknown;
    u.path = path;
    u.error = ProofError::OracleUnknown;
    u.constraint = r.constraint;
    u.detail = r.detail;
    unknown = u;
  }
  for (std::size_t i = 0; i < d.premises.size(); ++i) {
    path.push_back(static_cast<int>(i));
    walk(ck, d.premises[i], path, report, unknown);
    path.pop_back();
    if (!report.accepted()) return;
  }
}

}  // namespace

CheckReport check_proof(const CETheory& th, const Derivation& d, ValidityOracle& oracle) {
  Checker ck(th, oracle);
  CheckReport report;
  std::optional<CheckReport> unknown;
  std::vector<int> path;
  walk(ck, d, path, report, unknown);
  if (report.accepted() && unknown) return *unknown;
  return report;
}

}  // namespace lcre
