#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>

#include "lcre/model.hpp"

namespace lcre {

struct Verdict {
  enum class Kind { Valid, Invalid, Unknown };
  Kind kind = Kind::Unknown;
  Substitution witness;
  std::string reason;

  static Verdict valid() { return {Kind::Valid, {}, {}}; }
  static Verdict invalid(Substitution w) { return {Kind::Invalid, std::move(w), {}}; }
  static Verdict unknown(std::string why) { return {Kind::Unknown, {}, std::move(why)}; }
  bool is_valid() const { return kind == Kind::Valid; }
  bool is_invalid() const { return kind == Kind::Invalid; }
  bool is_unknown() const { return kind == Kind::Unknown; }
  std::string to_string() const;
};

struct OracleConfig {
  int box = 64;                      // integer refutation range [-box, box]
  std::size_t max_samples = 100000;  // evaluation budget for bounded refutation
  bool linear_prover = true;         // built-in Fourier-Motzkin prover
  std::string solver;                // external SMT-LIB solver command line, empty = none
  int timeout_ms = 5000;
};

class SolverSession;

// Answers ⊨ φ queries over one underlying model. Thread-safe; results are cached.
class ValidityOracle {
 public:
  ValidityOracle(ModelRef model, OracleConfig config = {});
  ~ValidityOracle();
  ValidityOracle(const ValidityOracle&) = delete;
  ValidityOracle& operator=(const ValidityOracle&) = delete;

  Verdict check_validity(const Term& phi);
  const UnderlyingModel& model() const { return *model_; }
  const ModelRef& model_ref() const { return model_; }
  const OracleConfig& config() const { return config_; }

 private:
  Verdict decide(const Term& phi);
  Verdict bounded_refutation(const Term& phi, const VarSet& vars);

  ModelRef model_;
  OracleConfig config_;
  std::mutex mu_;
  std::unique_ptr<SolverSession> session_;
  std::unordered_map<Term, Verdict, TermHash> cache_;
};

// Sound but incomplete: true only if φ holds for every integer valuation.
bool linear_prove_valid(const UnderlyingModel& m, const Term& phi);

}  // namespace lcre
