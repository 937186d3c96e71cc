#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lcre/error.hpp"

namespace lcre {

using BigInt = boost::multiprecision::cpp_int;

enum class SortKind : std::uint8_t { Theory, Term };

struct Sort {
  std::string name;
  SortKind kind = SortKind::Term;

  bool is_theory() const { return kind == SortKind::Theory; }
  bool operator==(const Sort& o) const { return name == o.name; }
  bool operator<(const Sort& o) const { return name < o.name; }
};

Sort bool_sort();
Sort int_sort();

// Interpretation tag for built-in theory symbols.
enum class Builtin : std::uint8_t {
  None,
  Not,
  And,
  Or,
  Implies,
  Iff,
  Eq,
  Add,
  Sub,
  Neg,
  Mul,
  Mod,
  Div,
  Lt,
  Le,
  Gt,
  Ge,
};

struct FunSymbol {
  std::string name;
  std::vector<Sort> arg_sorts;
  Sort result_sort;
  SortKind kind = SortKind::Term;
  Builtin op = Builtin::None;
  std::size_t name_hash = 0;

  bool is_theory() const { return kind == SortKind::Theory; }
  std::size_t arity() const { return arg_sorts.size(); }
  bool same_declaration(const FunSymbol& o) const {
    return name == o.name && arg_sorts == o.arg_sorts && result_sort == o.result_sort;
  }
};

using SymbolRef = std::shared_ptr<const FunSymbol>;

SymbolRef make_symbol(std::string name, std::vector<Sort> args, Sort result, SortKind kind,
                      Builtin op = Builtin::None);

struct Variable {
  std::string name;
  Sort sort;

  bool is_theory() const { return sort.is_theory(); }
  bool operator==(const Variable& o) const { return name == o.name && sort == o.sort; }
  bool operator<(const Variable& o) const {
    if (name != o.name) return name < o.name;
    return sort.name < o.sort.name;
  }
};

using VarSet = std::set<Variable>;

// A value constant: an element of a theory sort's carrier. Bool uses 0/1.
struct Value {
  Sort sort;
  BigInt num;

  bool as_bool() const { return num != 0; }
  std::string to_string() const;
  bool operator==(const Value& o) const { return sort == o.sort && num == o.num; }
  bool operator<(const Value& o) const {
    if (!(sort == o.sort)) return sort < o.sort;
    return num < o.num;
  }
};

Value bool_value(bool b);
Value int_value(BigInt n);

class Term {
 public:
  enum class Kind : std::uint8_t { Var, App, Val };

  Term() = default;
  static Term var(Variable v);
  static Term app(SymbolRef f, std::vector<Term> args);
  static Term val(Value v);
  static Term boolean(bool b) { return val(bool_value(b)); }
  static Term integer(BigInt n) { return val(int_value(std::move(n))); }

  bool valid() const { return static_cast<bool>(n_); }
  Kind kind() const;
  bool is_var() const { return kind() == Kind::Var; }
  bool is_app() const { return kind() == Kind::App; }
  bool is_value() const { return kind() == Kind::Val; }

  const Variable& variable() const;
  const FunSymbol& symbol() const;
  const SymbolRef& symbol_ref() const;
  const std::vector<Term>& args() const;
  const Term& arg(std::size_t i) const { return args()[i]; }
  const Value& value() const;
  const Sort& sort() const;

  std::size_t hash() const;
  std::size_t size() const;
  bool is_ground() const;
  // No term symbols and no term-sorted variables anywhere.
  bool is_theory_term() const;
  // Contains a subterm f(c1..cn) with f a theory symbol and all ci values.
  bool has_calc_redex() const;

  bool operator==(const Term& o) const;
  bool operator!=(const Term& o) const { return !(*this == o); }
  std::string to_string() const;

  const void* identity() const { return n_.get(); }

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> n) : n_(std::move(n)) {}
  std::shared_ptr<const Node> n_;
};

// Total structural order: size, then kind, then names, then children.
int compare_terms(const Term& a, const Term& b);
struct TermLess {
  bool operator()(const Term& a, const Term& b) const { return compare_terms(a, b) < 0; }
};
struct TermHash {
  std::size_t operator()(const Term& t) const { return t.hash(); }
};

struct Position {
  std::vector<int> path;

  bool is_root() const { return path.empty(); }
  Position child(int i) const;
  bool operator==(const Position& o) const { return path == o.path; }
  bool operator<(const Position& o) const { return path < o.path; }
  std::string to_string() const;
};

class Substitution {
 public:
  Substitution() = default;

  // Identity bindings are dropped so the domain is exactly {x | σ(x) ≠ x}.
  void bind(const Variable& x, const Term& t);
  void erase(const Variable& x) { map_.erase(x); }
  const Term* lookup(const Variable& x) const;
  Term image(const Variable& x) const;
  bool contains(const Variable& x) const { return map_.count(x) != 0; }
  VarSet domain() const;
  bool empty() const { return map_.empty(); }
  std::size_t size() const { return map_.size(); }
  const std::map<Variable, Term>& bindings() const { return map_; }
  bool operator==(const Substitution& o) const;
  std::string to_string() const;

 private:
  std::map<Variable, Term> map_;
};

VarSet vars_of(const Term& t, std::optional<SortKind> filter = std::nullopt);
void collect_vars(const Term& t, VarSet& out, std::optional<SortKind> filter = std::nullopt);
Term apply_subst(const Substitution& s, const Term& t);
std::optional<Substitution> match(const Term& pattern, const Term& subject);
// Raw variable bindings; unlike Substitution, identity bindings are kept.
using Bindings = std::map<Variable, Term>;
// Extends `b`; returns false (leaving b unspecified) on failure.
bool match_into(const Term& pattern, const Term& subject, Bindings& b);
Substitution to_substitution(const Bindings& b);
std::optional<Substitution> unify(const Term& s, const Term& t);

Term subterm_at(const Term& t, const Position& p);
Term replace_at(const Term& t, const Position& p, const Term& u);
bool valid_position(const Term& t, const Position& p);
// All positions in pre-order.
std::vector<Position> positions(const Term& t);
void for_each_subterm(const Term& t, const std::function<void(const Position&, const Term&)>& f);

// s = C[s1..sn], t = C[t1..tn] with maximal shared context. `stop(si, ti)` may
// declare a pair atomic even when roots agree.
struct Decomposition {
  std::vector<Position> holes;
  std::vector<std::pair<Term, Term>> pairs;
};
Decomposition decompose_differences(
    const Term& s, const Term& t,
    const std::function<bool(const Term&, const Term&)>& stop = nullptr);
Term plug(const Term& context_source, const std::vector<Position>& holes,
          const std::vector<Term>& fillers);

// Is t ∈ T(Fth, X)?
bool is_theory_term_over(const Term& t, const VarSet& x);

class Signature {
 public:
  void add_sort(const Sort& s);
  void add_symbol(const SymbolRef& f);
  const Sort* find_sort(const std::string& name) const;
  std::vector<SymbolRef> overloads(const std::string& name) const;
  SymbolRef resolve(const std::string& name, const std::vector<Sort>& args) const;
  bool has_symbol(const std::string& name) const { return symbols_.count(name) != 0; }
  const std::vector<Sort>& sorts() const { return sort_list_; }
  std::vector<SymbolRef> symbols() const;
  std::vector<SymbolRef> term_symbols() const;

 private:
  std::vector<Sort> sort_list_;
  std::map<std::string, std::vector<SymbolRef>> symbols_;
  std::vector<SymbolRef> order_;
};

}  // namespace lcre

template <>
struct std::hash<lcre::Term> {
  std::size_t operator()(const lcre::Term& t) const { return t.hash(); }
};
