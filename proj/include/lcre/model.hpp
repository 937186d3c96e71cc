#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lcre/terms.hpp"

namespace lcre {

// Built-in underlying model: Bool, linear integer arithmetic, or Z/nZ.
class UnderlyingModel {
 public:
  enum class Kind { Bool, Lia, IntMod };

  static std::shared_ptr<const UnderlyingModel> boolean();
  static std::shared_ptr<const UnderlyingModel> lia();
  static std::shared_ptr<const UnderlyingModel> int_mod(int n);

  Kind kind() const { return kind_; }
  int modulus() const { return modulus_; }
  std::string name() const;
  const Signature& theory_signature() const { return sig_; }

  bool has_sort(const Sort& s) const { return sig_.find_sort(s.name) != nullptr; }
  bool is_finite(const Sort& s) const;
  // Carrier elements in ascending order; throws for the integers.
  std::vector<Value> carrier(const Sort& s) const;
  bool in_carrier(const Value& v) const;
  Value apply(const FunSymbol& f, const std::vector<Value>& args) const;

  SymbolRef symbol(const std::string& name, const std::vector<Sort>& args) const;
  SymbolRef eq_symbol(const Sort& s) const;
  SymbolRef and_symbol() const { return symbol("and", {bool_sort(), bool_sort()}); }
  SymbolRef or_symbol() const { return symbol("or", {bool_sort(), bool_sort()}); }
  SymbolRef not_symbol() const { return symbol("not", {bool_sort()}); }
  SymbolRef implies_symbol() const { return symbol("=>", {bool_sort(), bool_sort()}); }

  Term mk_eq(const Term& a, const Term& b) const;
  Term mk_and(const Term& a, const Term& b) const;
  Term mk_or(const Term& a, const Term& b) const;
  Term mk_not(const Term& a) const;
  Term mk_implies(const Term& a, const Term& b) const;
  Term conjunction(const std::vector<Term>& parts) const;

 private:
  UnderlyingModel() = default;
  void add(const std::string& name, std::vector<Sort> args, Sort result, Builtin op);

  Kind kind_ = Kind::Bool;
  int modulus_ = 0;
  Signature sig_;
};

using ModelRef = std::shared_ptr<const UnderlyingModel>;

Value interpret(const UnderlyingModel& m, const Term& t);

struct CalcStep {
  Position pos;
  Term result;
};
std::vector<CalcStep> calc_step_candidates(const UnderlyingModel& m, const Term& t);
Term calc_normalize(const UnderlyingModel& m, const Term& t);
// Leftmost-innermost forward calculation sequence ending in the normal form.
std::vector<CalcStep> calc_sequence(const UnderlyingModel& m, const Term& t);
bool eval_constraint(const UnderlyingModel& m, const Term& phi);

// Enumerates X-valued substitutions satisfying phi: carriers for finite sorts,
// [-box, box] for integers, lexicographic over variables in name order with
// ascending values. The callback returns false to stop.
void enumerate_satisfying(const UnderlyingModel& m, const VarSet& x, const Term& phi, int box,
                          const std::function<bool(const Substitution&)>& each);
std::vector<Substitution> satisfying_list(const UnderlyingModel& m, const VarSet& x,
                                          const Term& phi, int box, std::size_t limit = SIZE_MAX);

}  // namespace lcre
