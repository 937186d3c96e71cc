#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lcre/rewriting.hpp"

namespace lcre {

// One sort's carrier. Elements are indices: the model values come first (in
// ascending order), then the named extra elements.
struct Carrier {
  Sort sort;
  std::vector<Value> values;
  std::vector<std::string> extras;

  int size() const { return static_cast<int>(values.size() + extras.size()); }
  bool is_value(int e) const { return e < static_cast<int>(values.size()); }
  std::string name(int e) const;
  std::optional<int> find(const std::string& name) const;
  std::optional<int> index_of(const Value& v) const;
};

// Cell markers: not yet assigned, and a theory result that leaves a finite
// slice of an infinite carrier.
inline constexpr int kUnassigned = -1;
inline constexpr int kOutside = -2;

struct Table {
  SymbolRef symbol;
  std::vector<int> cells;  // mixed radix, first argument most significant
  std::vector<bool> fixed;  // theory cells on model arguments
};

using AlgValuation = std::map<Variable, int>;

class FiniteCEAlgebra {
 public:
  // Tables for every symbol of the theory's signature. Theory cells on model
  // arguments are filled from the model; all other cells start unassigned.
  FiniteCEAlgebra(const CETheory& th, std::vector<Carrier> carriers);
  FiniteCEAlgebra(ModelRef model, const std::vector<SymbolRef>& symbols, std::vector<Carrier> carriers);

  const UnderlyingModel& model() const { return *model_; }
  const ModelRef& model_ref() const { return model_; }
  const std::vector<Carrier>& carriers() const { return carriers_; }
  const Carrier& carrier(const Sort& s) const;
  const std::vector<Table>& tables() const { return tables_; }
  std::size_t table_index(const FunSymbol& f) const;
  const Table& table(const FunSymbol& f) const { return tables_[table_index(f)]; }

  std::size_t cell_index(const Table& t, const std::vector<int>& args) const;
  std::vector<int> cell_args(const Table& t, std::size_t cell) const;
  std::size_t cell_count(const Table& t) const;
  int cell(const FunSymbol& f, const std::vector<int>& args) const;
  // Throws InvalidArgument on fixed cells or out-of-range results.
  void set_cell(std::size_t table, std::size_t cell, int result);
  void set_cell_unchecked(std::size_t table, std::size_t cell, int result) {
    tables_[table].cells[cell] = result;
  }

  // Unassigned theory cells take the first extra argument of the result sort
  // (or the first element of the result carrier).
  void complete_theory_tables();
  // Totality, sort-correctness and the extension invariant.
  void validate() const;

  int element_of(const Value& v) const;
  std::string valuation_string(const AlgValuation& rho) const;
  std::string element_name(const Sort& s, int e) const { return carrier(s).name(e); }

  bool operator==(const FiniteCEAlgebra& o) const;

 private:
  ModelRef model_;
  std::vector<Carrier> carriers_;
  std::map<std::string, std::size_t> carrier_index_;
  std::vector<Table> tables_;
  std::map<std::string, std::size_t> table_index_;
};

// Throws UncoveredVariable when rho misses a variable of t.
int eval_in_algebra(const FiniteCEAlgebra& a, const Term& t, const AlgValuation& rho);

// Calls `each` for every valuation of `vars`: members of `x` range over model
// values, the rest over the full carrier. Returns false when stopped.
bool for_each_valuation(const FiniteCEAlgebra& a, const VarSet& vars, const VarSet& x,
                        const std::function<bool(const AlgValuation&)>& each);

struct ModelCheck {
  bool valid = true;
  int equation = -1;
  AlgValuation rho;
  std::string to_string(const FiniteCEAlgebra& a, const CETheory& th) const;
};

ModelCheck check_is_model(const FiniteCEAlgebra& a, const CETheory& th);
std::optional<AlgValuation> check_refutes(const FiniteCEAlgebra& a, const ConstrainedEquation& goal);

struct CounterModelOptions {
  int max_extra = 1;                        // fresh elements per finite theory sort
  int max_term_sort_size = 2;               // used when a sort has no explicit size
  std::map<std::string, int> term_sort_sizes;
  std::uint64_t max_nodes = 20'000'000;     // search-tree budget over all shapes
};

struct CounterModelResult {
  std::optional<FiniteCEAlgebra> algebra;
  AlgValuation refutation;
  std::uint64_t nodes = 0;
  std::uint64_t shapes = 0;
  bool budget_exhausted = false;
  std::string bounds;  // human-readable description of the searched space
};

// Requires a finite underlying model; throws InvalidArgument otherwise.
CounterModelResult search_counter_model(const CETheory& th, const ConstrainedEquation& goal,
                                        const CounterModelOptions& opt = {});

// Per sort name, a class id for every carrier element.
struct FiniteCongruence {
  std::map<std::string, std::vector<int>> classes;

  static FiniteCongruence identity(const FiniteCEAlgebra& a);
};

// Throws NotACongruence naming the violating tuple.
FiniteCEAlgebra quotient(const FiniteCEAlgebra& a, const FiniteCongruence& c);

struct ConsistencyReport {
  enum class Kind { ConsistentUpTo, InconsistentWitness };
  Kind kind = Kind::ConsistentUpTo;
  int depth = 0;
  std::optional<Value> u;
  std::optional<Value> v;
  std::optional<ConversionTrace> trace;

  bool consistent() const { return kind == Kind::ConsistentUpTo; }
  std::string to_string() const;
};

ConsistencyReport check_value_consistency(const CETheory& th, int depth, std::size_t max_nodes = 200000);

// (algebra (carrier SORT elem...)... (table f ((args...) result)...)...)
// A table head is a symbol name or (name ARGSORT...) for overloads.
FiniteCEAlgebra parse_algebra(const std::string& text, const CETheory& th);
FiniteCEAlgebra load_algebra(const std::string& path, const CETheory& th);
std::string print_algebra(const FiniteCEAlgebra& a);

}  // namespace lcre
