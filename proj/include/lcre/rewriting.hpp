#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lcre/model.hpp"
#include "lcre/validity.hpp"

namespace lcre {

// ⟨X⟩ lhs ≈ rhs [constraint]
struct ConstrainedEquation {
  VarSet logical_vars;
  Term lhs;
  Term rhs;
  Term constraint;

  // Throws IllSortedEquation / ConstraintVarsNotInX.
  void validate() const;
  std::string to_string() const;
  bool operator==(const ConstrainedEquation& o) const {
    return logical_vars == o.logical_vars && lhs == o.lhs && rhs == o.rhs &&
           constraint == o.constraint;
  }
};

struct NamedGoal {
  std::string name;
  ConstrainedEquation ce;
};

struct CETheory {
  Signature signature;
  ModelRef model;
  std::vector<ConstrainedEquation> equations;
  std::vector<NamedGoal> goals;
  // Declared variables, by name.
  std::map<std::string, Variable> variables;

  const NamedGoal* find_goal(const std::string& name) const;
};

enum class Direction { LeftToRight, RightToLeft };
enum class StepKind { Calc, Rule };

inline Direction flip(Direction d) {
  return d == Direction::LeftToRight ? Direction::RightToLeft : Direction::LeftToRight;
}

struct TraceStep {
  StepKind kind = StepKind::Rule;
  Position pos;
  Direction dir = Direction::LeftToRight;
  int equation = -1;
  Substitution witness;
  // Term after the step; mandatory for reverse calculation steps.
  std::optional<Term> result;

  std::string to_string() const;
};

struct ConversionTrace {
  Term start;
  std::vector<TraceStep> steps;

  std::size_t length() const { return steps.size(); }
  std::size_t rule_steps() const;
  Term end() const;
};

struct RuleStep {
  Position pos;
  int equation = -1;
  Direction dir = Direction::LeftToRight;
  Substitution witness;
  Term result;
  // Set when the pattern instance differs from the subterm by calculations:
  // the term with the pattern instance in place, calculating to the input.
  std::optional<Term> expanded;
};

// Candidate instantiations for variables not bound by matching.
struct StepPools {
  std::map<std::string, std::vector<Term>> values;  // per theory sort
  std::map<std::string, std::vector<Term>> terms;   // per sort, non-logical extras
  std::size_t max_combinations = 4096;

  // Integer pool [-8, 8] plus integer literals of the theory and `goal_terms`;
  // finite sorts use their carrier. Term pool: subterms of goal_terms and seeds.
  static StepPools defaults(const CETheory& th, const std::vector<Term>& goal_terms,
                            const std::vector<Term>& seeds = {},
                            const std::optional<std::vector<BigInt>>& int_pool = std::nullopt);
};

std::vector<RuleStep> rule_step_candidates(const Term& t, const CETheory& th, const StepPools& pools);

struct SearchOptions {
  int bound = 8;                    // maximal number of rule steps
  std::size_t max_nodes = 400000;   // visited-term budget per round
  // Rounds with term size capped at max(|s|, |t|) + slack, then uncapped.
  std::vector<int> size_slack = {2, 4, 8, 16};
  std::vector<Term> seeds;
  std::optional<std::vector<BigInt>> int_pool;
  bool calc_only = false;
};

std::optional<ConversionTrace> conversion_search(const Term& s, const Term& t, const CETheory& th,
                                                 const SearchOptions& opt = {});
Term replay_trace(const Term& s, const ConversionTrace& trace, const CETheory& th);

// Calc-normal forms reachable from t with at most `depth` rule steps, with the
// trace from t to each.
std::vector<std::pair<Term, ConversionTrace>> reachable(const Term& t, const CETheory& th,
                                                        const StepPools& pools, int depth,
                                                        std::size_t max_nodes);

Verdict is_trivial(const ConstrainedEquation& ce, const CETheory& th, ValidityOracle& oracle);

struct ValidityBudget {
  int bound = 8;         // per conversion search
  int box = 5;           // sample box for integer logical variables
  int rewrite_depth = 2; // rewrite-to-trivial depth per side
  std::size_t max_nodes = 200000;
  std::size_t max_samples = 20000;
  std::optional<std::vector<BigInt>> int_pool;
  std::vector<Term> seeds;
};

struct ValidityStatus {
  enum class Kind {
    ProvedGroundConversion,
    ProvedByTriviality,
    ConfirmedOnSamples,
    NoConversionWithinBound,
    Unknown
  };
  Kind kind = Kind::Unknown;
  std::optional<ConversionTrace> trace;  // ground conversion
  Term lhs_rewritten;
  Term rhs_rewritten;
  std::optional<ConversionTrace> lhs_trace;
  std::optional<ConversionTrace> rhs_trace;
  std::size_t samples = 0;
  Substitution sample;  // failing sample
  std::string note;

  bool is_proof() const {
    return kind == Kind::ProvedGroundConversion || kind == Kind::ProvedByTriviality;
  }
  std::string name() const;
};

ValidityStatus check_ce_validity(const CETheory& th, const ConstrainedEquation& ce,
                                 ValidityOracle& oracle, const ValidityBudget& budget = {});

}  // namespace lcre
