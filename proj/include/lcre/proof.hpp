#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lcre/rewriting.hpp"

namespace lcre {

enum class ProofRule {
  Refl,
  Trans,
  Sym,
  Cong,
  Rule,
  TheoryInstance,
  GeneralInstance,
  Weakening,
  Split,
  Axiom,
  Abst,
  Enlarge,
};

std::string rule_name(ProofRule r);
std::optional<ProofRule> rule_from_name(const std::string& name);
const std::vector<ProofRule>& all_rules();

struct Derivation {
  ProofRule rule = ProofRule::Refl;
  ConstrainedEquation conclusion;
  std::optional<Substitution> witness;
  std::vector<Derivation> premises;

  bool operator==(const Derivation& o) const;
  std::size_t node_count() const;
  std::size_t count(ProofRule r) const;
};

enum class ProofError { ShapeMismatch, SideConditionFailed, NotInTheory, OracleUnknown, MalformedCe };
std::string proof_error_name(ProofError e);

struct CheckReport {
  enum class Verdict { Accepted, Rejected, OracleUnknown };
  Verdict verdict = Verdict::Accepted;
  std::vector<int> path;      // premise indices from the root
  ProofError error = ProofError::ShapeMismatch;
  std::optional<ProofRule> failed_rule;  // for side-condition-failed
  std::string detail;
  Term constraint;            // the undecided formula for OracleUnknown

  bool accepted() const { return verdict == Verdict::Accepted; }
  std::string path_string() const;
  // e.g. "side-condition-failed(Weakening)"
  std::string error_string() const;
  std::string to_string() const;
};

CheckReport check_proof(const CETheory& th, const Derivation& d, ValidityOracle& oracle);

// Proof text: (RULE (conclusion (vars x:Int ..) [(free y:G ..)] LHS RHS PHI) [(subst (x:Int T) ..)] PREMISE..)
std::string serialize_proof(const Derivation& d, const CETheory& th);
Derivation parse_proof(const std::string& text, const CETheory& th);
Derivation load_proof(const std::string& path, const CETheory& th);

// Derivation for CEs whose satisfying instances differ by at most one
// calculation step. The precondition is checked by enumeration over [-box, box].
// Throws PreconditionUnverifiable.
Derivation generate_calc_proof(const CETheory& th, const ConstrainedEquation& ce, ValidityOracle& oracle,
                               int box = 8);

struct ProveBudget {
  int conversion_bound = 32;     // ground conversion with variables as constants
  int symbolic_depth = 4;        // rule steps in the symbolic search
  std::size_t max_nodes = 4000;  // symbolic search nodes per side
  int split_depth = 2;           // nested case splits on finite logical variables
  std::vector<Term> seeds;
};

// Incomplete search; every returned derivation has been accepted by check_proof.
std::optional<Derivation> prove_heuristic(const CETheory& th, const ConstrainedEquation& ce,
                                          ValidityOracle& oracle, const ProveBudget& budget = {});

// Derivation of ⟨X⟩ s ≈ t [φ] from a conversion trace of s to t, X and φ taken from `ce`.
std::optional<Derivation> derivation_from_trace(const CETheory& th, const ConstrainedEquation& ce,
                                                const ConversionTrace& trace, ValidityOracle& oracle);

}  // namespace lcre
