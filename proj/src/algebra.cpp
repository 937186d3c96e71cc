#include "lcre/algebra.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <tuple>

namespace lcre {

namespace {

std::string table_key(const FunSymbol& f) {
  std::string k = f.name + "(";
  for (const auto& s : f.arg_sorts) k += s.name + ",";
  return k + ")";
}

}  // namespace

std::string Carrier::name(int e) const {
  if (is_value(e)) return values[static_cast<std::size_t>(e)].to_string();
  return extras.at(static_cast<std::size_t>(e) - values.size());
}

std::optional<int> Carrier::find(const std::string& n) const {
  for (int e = 0; e < size(); ++e)
    if (name(e) == n) return e;
  return std::nullopt;
}

std::optional<int> Carrier::index_of(const Value& v) const {
  auto it = std::lower_bound(values.begin(), values.end(), v);
  if (it == values.end() || !(*it == v)) return std::nullopt;
  return static_cast<int>(it - values.begin());
}

FiniteCEAlgebra::FiniteCEAlgebra(const CETheory& th, std::vector<Carrier> carriers)
    : FiniteCEAlgebra(th.model, th.signature.symbols(), [&] {
        // Sorts without an explicit carrier: finite theory sorts get the model carrier.
        for (const auto& s : th.signature.sorts()) {
          bool have = std::any_of(carriers.begin(), carriers.end(), [&](const Carrier& c) { return c.sort == s; });
          if (have) continue;
          if (!s.is_theory() || !th.model->is_finite(s))
            throw Error(ErrorCode::InvalidArgument, "no carrier given for sort " + s.name);
          carriers.push_back(Carrier{s, th.model->carrier(s), {}});
        }
        return std::move(carriers);
      }()) {}

FiniteCEAlgebra::FiniteCEAlgebra(ModelRef model, const std::vector<SymbolRef>& symbols,
                                 std::vector<Carrier> carriers)
    : model_(std::move(model)), carriers_(std::move(carriers)) {
  for (auto& c : carriers_) {
    std::sort(c.values.begin(), c.values.end());
    c.values.erase(std::unique(c.values.begin(), c.values.end()), c.values.end());
  }
  std::sort(carriers_.begin(), carriers_.end(), [](const Carrier& a, const Carrier& b) { return a.sort < b.sort; });
  for (std::size_t i = 0; i < carriers_.size(); ++i) {
    if (!carrier_index_.emplace(carriers_[i].sort.name, i).second)
      throw Error(ErrorCode::InvalidArgument, "duplicate carrier for sort " + carriers_[i].sort.name);
    if (carriers_[i].size() == 0) throw Error(ErrorCode::InvalidArgument, "empty carrier for " + carriers_[i].sort.name);
  }
  for (const auto& f : symbols) {
    Table t;
    t.symbol = f;
    table_index_.emplace(table_key(*f), tables_.size());
    tables_.push_back(std::move(t));
    Table& tb = tables_.back();
    std::size_t n = cell_count(tb);
    tb.cells.assign(n, kUnassigned);
    tb.fixed.assign(n, false);
    if (!f->is_theory()) continue;
    const Carrier& out = carrier(f->result_sort);
    for (std::size_t c = 0; c < n; ++c) {
      auto args = cell_args(tb, c);
      std::vector<Value> vals;
      bool on_model = true;
      for (std::size_t i = 0; i < args.size(); ++i) {
        const Carrier& ci = carrier(f->arg_sorts[i]);
        if (!ci.is_value(args[i])) {
          on_model = false;
          break;
        }
        vals.push_back(ci.values[static_cast<std::size_t>(args[i])]);
      }
      if (!on_model) continue;
      tb.fixed[c] = true;
      try {
        auto r = out.index_of(model_->apply(*f, vals));
        tb.cells[c] = r ? *r : kOutside;
      } catch (const Error&) {
        tb.cells[c] = kOutside;
      }
    }
  }
}

const Carrier& FiniteCEAlgebra::carrier(const Sort& s) const {
  auto it = carrier_index_.find(s.name);
  if (it == carrier_index_.end()) throw Error(ErrorCode::UnknownSort, "no carrier for sort " + s.name);
  return carriers_[it->second];
}

std::size_t FiniteCEAlgebra::table_index(const FunSymbol& f) const {
  auto it = table_index_.find(table_key(f));
  if (it == table_index_.end()) throw Error(ErrorCode::UnknownSymbol, "no table for " + f.name);
  return it->second;
}

std::size_t FiniteCEAlgebra::cell_count(const Table& t) const {
  std::size_t n = 1;
  for (const auto& s : t.symbol->arg_sorts) n *= static_cast<std::size_t>(carrier(s).size());
  return n;
}

std::size_t FiniteCEAlgebra::cell_index(const Table& t, const std::vector<int>& args) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < args.size(); ++i)
    idx = idx * static_cast<std::size_t>(carrier(t.symbol->arg_sorts[i]).size()) + static_cast<std::size_t>(args[i]);
  return idx;
}

std::vector<int> FiniteCEAlgebra::cell_args(const Table& t, std::size_t cell) const {
  std::vector<int> args(t.symbol->arity());
  for (std::size_t i = args.size(); i-- > 0;) {
    auto k = static_cast<std::size_t>(carrier(t.symbol->arg_sorts[i]).size());
    args[i] = static_cast<int>(cell % k);
    cell /= k;
  }
  return args;
}

int FiniteCEAlgebra::cell(const FunSymbol& f, const std::vector<int>& args) const {
  const Table& t = table(f);
  return t.cells[cell_index(t, args)];
}

void FiniteCEAlgebra::set_cell(std::size_t table, std::size_t cell, int result) {
  Table& t = tables_.at(table);
  if (t.fixed.at(cell))
    throw Error(ErrorCode::InvalidArgument, "entry of " + t.symbol->name + " on model arguments is fixed by the model");
  if (result < 0 || result >= carrier(t.symbol->result_sort).size())
    throw Error(ErrorCode::InvalidArgument, "result out of range for " + t.symbol->name);
  t.cells[cell] = result;
}

void FiniteCEAlgebra::complete_theory_tables() {
  for (auto& t : tables_) {
    if (!t.symbol->is_theory()) continue;
    const Sort& rs = t.symbol->result_sort;
    for (std::size_t c = 0; c < t.cells.size(); ++c) {
      if (t.cells[c] != kUnassigned) continue;
      auto args = cell_args(t, c);
      int pick = 0;
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (t.symbol->arg_sorts[i] == rs && !carrier(rs).is_value(args[i])) {
          pick = args[i];
          break;
        }
      }
      t.cells[c] = pick;
    }
  }
}

void FiniteCEAlgebra::validate() const {
  for (const auto& c : carriers_) {
    if (c.sort.is_theory()) {
      for (const auto& v : c.values)
        if (!model_->in_carrier(v)) throw Error(ErrorCode::InvalidArgument, v.to_string() + " is not a model value");
      if (model_->is_finite(c.sort) && c.values.size() != model_->carrier(c.sort).size())
        throw Error(ErrorCode::InvalidArgument, "carrier of " + c.sort.name + " must contain every model value");
    } else if (!c.values.empty()) {
      throw Error(ErrorCode::InvalidArgument, "term sort " + c.sort.name + " cannot contain values");
    }
    std::set<std::string> names;
    for (int e = 0; e < c.size(); ++e)
      if (!names.insert(c.name(e)).second)
        throw Error(ErrorCode::InvalidArgument, "duplicate element " + c.name(e) + " in " + c.sort.name);
  }
  for (const auto& t : tables_) {
    int n = carrier(t.symbol->result_sort).size();
    for (std::size_t c = 0; c < t.cells.size(); ++c) {
      int r = t.cells[c];
      if (r == kOutside && t.fixed[c]) continue;
      if (r < 0 || r >= n) {
        std::string args;
        for (int a : cell_args(t, c)) args += " " + std::to_string(a);
        throw Error(ErrorCode::InvalidArgument, "table of " + t.symbol->name + " has no entry for (" + args + " )");
      }
    }
  }
}

int FiniteCEAlgebra::element_of(const Value& v) const {
  auto e = carrier(v.sort).index_of(v);
  if (!e) throw Error(ErrorCode::InvalidArgument, v.to_string() + " is outside the carrier of " + v.sort.name);
  return *e;
}

std::string FiniteCEAlgebra::valuation_string(const AlgValuation& rho) const {
  std::string s = "{";
  bool first = true;
  for (const auto& [x, e] : rho) {
    if (!first) s += ", ";
    first = false;
    s += x.name + " -> " + carrier(x.sort).name(e);
  }
  return s + "}";
}

bool FiniteCEAlgebra::operator==(const FiniteCEAlgebra& o) const {
  if (carriers_.size() != o.carriers_.size() || tables_.size() != o.tables_.size()) return false;
  for (std::size_t i = 0; i < carriers_.size(); ++i) {
    const auto& a = carriers_[i];
    const auto& b = o.carriers_[i];
    if (!(a.sort == b.sort) || a.values != b.values || a.extras != b.extras) return false;
  }
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    if (!tables_[i].symbol->same_declaration(*o.tables_[i].symbol) || tables_[i].cells != o.tables_[i].cells)
      return false;
  }
  return true;
}

namespace {

// kUnassigned when the value depends on an unassigned cell.
int eval_partial(const FiniteCEAlgebra& a, const Term& t, const AlgValuation& rho) {
  switch (t.kind()) {
    case Term::Kind::Var: {
      auto it = rho.find(t.variable());
      if (it == rho.end()) throw Error(ErrorCode::UncoveredVariable, "valuation does not cover " + t.variable().name);
      return it->second;
    }
    case Term::Kind::Val:
      return a.element_of(t.value());
    case Term::Kind::App: {
      std::vector<int> args;
      args.reserve(t.args().size());
      for (const auto& u : t.args()) {
        int e = eval_partial(a, u, rho);
        if (e == kUnassigned) return kUnassigned;
        args.push_back(e);
      }
      int r = a.cell(t.symbol(), args);
      if (r == kOutside)
        throw Error(ErrorCode::InvalidArgument, t.symbol().name + " leaves the carrier slice of " + t.sort().name);
      return r;
    }
  }
  return kUnassigned;
}

bool enumerate_vals(const FiniteCEAlgebra& a, const std::vector<Variable>& vars, const VarSet& x,
                    std::size_t i, AlgValuation& rho, const std::function<bool(const AlgValuation&)>& each) {
  if (i == vars.size()) return each(rho);
  const Variable& v = vars[i];
  const Carrier& c = a.carrier(v.sort);
  int n = x.count(v) ? static_cast<int>(c.values.size()) : c.size();
  for (int e = 0; e < n; ++e) {
    rho[v] = e;
    if (!enumerate_vals(a, vars, x, i + 1, rho, each)) return false;
  }
  rho.erase(v);
  return true;
}

VarSet ce_vars(const ConstrainedEquation& ce) {
  VarSet vs = ce.logical_vars;
  collect_vars(ce.lhs, vs);
  collect_vars(ce.rhs, vs);
  collect_vars(ce.constraint, vs);
  return vs;
}

bool holds(const FiniteCEAlgebra& a, const Term& phi, const AlgValuation& rho) {
  return eval_in_algebra(a, phi, rho) == a.element_of(bool_value(true));
}

}  // namespace

int eval_in_algebra(const FiniteCEAlgebra& a, const Term& t, const AlgValuation& rho) {
  int r = eval_partial(a, t, rho);
  if (r == kUnassigned) throw Error(ErrorCode::InvalidArgument, "table entry missing while evaluating " + t.to_string());
  return r;
}

bool for_each_valuation(const FiniteCEAlgebra& a, const VarSet& vars, const VarSet& x,
                        const std::function<bool(const AlgValuation&)>& each) {
  std::vector<Variable> vs(vars.begin(), vars.end());
  AlgValuation rho;
  return enumerate_vals(a, vs, x, 0, rho, each);
}

std::string ModelCheck::to_string(const FiniteCEAlgebra& a, const CETheory& th) const {
  if (valid) return "model";
  return "equation " + std::to_string(equation + 1) + " " +
         th.equations[static_cast<std::size_t>(equation)].to_string() + " fails under " + a.valuation_string(rho);
}

ModelCheck check_is_model(const FiniteCEAlgebra& a, const CETheory& th) {
  ModelCheck out;
  for (std::size_t i = 0; i < th.equations.size() && out.valid; ++i) {
    const auto& e = th.equations[i];
    for_each_valuation(a, ce_vars(e), e.logical_vars, [&](const AlgValuation& rho) {
      if (!holds(a, e.constraint, rho)) return true;
      if (eval_in_algebra(a, e.lhs, rho) == eval_in_algebra(a, e.rhs, rho)) return true;
      out.valid = false;
      out.equation = static_cast<int>(i);
      out.rho = rho;
      return false;
    });
  }
  return out;
}

std::optional<AlgValuation> check_refutes(const FiniteCEAlgebra& a, const ConstrainedEquation& goal) {
  std::optional<AlgValuation> out;
  for_each_valuation(a, ce_vars(goal), goal.logical_vars, [&](const AlgValuation& rho) {
    if (!holds(a, goal.constraint, rho)) return true;
    if (eval_in_algebra(a, goal.lhs, rho) == eval_in_algebra(a, goal.rhs, rho)) return true;
    out = rho;
    return false;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Counter-model search

namespace {

struct Instance {
  Term lhs;
  Term rhs;
  AlgValuation rho;
};

struct Cell {
  std::size_t table;
  std::size_t index;
  std::vector<int> args;
  std::vector<std::size_t> arg_carriers;
  std::size_t result_carrier;
  int rank;
};

void symbols_in(const Term& t, std::set<std::string>& out) {
  if (!t.is_app()) return;
  out.insert(table_key(t.symbol()));
  for (const auto& u : t.args()) symbols_in(u, out);
}

class ShapeSearch {
 public:
  ShapeSearch(FiniteCEAlgebra& a, std::vector<Cell> cells, std::vector<Instance> eqs, std::vector<Instance> goal,
              std::uint64_t& nodes, std::uint64_t budget)
      : a_(a), cells_(std::move(cells)), eqs_(std::move(eqs)), goal_(std::move(goal)), nodes_(nodes), budget_(budget) {
    for (const auto& c : a_.carriers()) used_.emplace_back(static_cast<std::size_t>(c.size()), 0);
    settled_.assign(eqs_.size(), -1);
  }

  bool run() { return dfs(0); }
  bool exhausted() const { return exhausted_; }
  const AlgValuation& refutation() const { return refutation_; }

 private:
  bool symmetric(std::size_t carrier, int e) const { return !a_.carriers()[carrier].is_value(e); }

  // An instance settled at an ancestor stays settled below it.
  bool consistent(int depth) {
    for (std::size_t i = 0; i < eqs_.size(); ++i) {
      if (settled_[i] >= 0 && settled_[i] < depth) continue;
      settled_[i] = -1;
      const auto& in = eqs_[i];
      int l = eval_partial(a_, in.lhs, in.rho);
      if (l == kUnassigned) continue;
      int r = eval_partial(a_, in.rhs, in.rho);
      if (r == kUnassigned) continue;
      if (l != r) return false;
      settled_[i] = depth;
    }
    return true;
  }

  bool refutes() {
    for (const auto& in : goal_) {
      if (eval_partial(a_, in.lhs, in.rho) != eval_partial(a_, in.rhs, in.rho)) {
        refutation_ = in.rho;
        return true;
      }
    }
    return false;
  }

  // Values of the result sort worth trying: model values, symmetric elements
  // already in use or among the arguments, and one unused representative.
  std::vector<int> candidates(const Cell& c) const {
    const Carrier& out = a_.carriers()[c.result_carrier];
    const auto& used = used_[c.result_carrier];
    std::vector<int> vals;
    bool fresh_taken = false;
    for (int e = 0; e < out.size(); ++e) {
      if (!symmetric(c.result_carrier, e) || used[static_cast<std::size_t>(e)] > 0) {
        vals.push_back(e);
        continue;
      }
      bool in_args = false;
      for (std::size_t i = 0; i < c.args.size(); ++i)
        if (c.arg_carriers[i] == c.result_carrier && c.args[i] == e) in_args = true;
      if (in_args) {
        vals.push_back(e);
      } else if (!fresh_taken) {
        fresh_taken = true;
        vals.push_back(e);
      }
    }
    return vals;
  }

  void mark(std::size_t carrier, int e, int delta) {
    if (symmetric(carrier, e)) used_[carrier][static_cast<std::size_t>(e)] += delta;
  }

  bool dfs(std::size_t k) {
    if (k == cells_.size()) return refutes();
    const Cell& c = cells_[k];
    for (std::size_t i = 0; i < c.args.size(); ++i) mark(c.arg_carriers[i], c.args[i], 1);
    bool found = false;
    for (int v : candidates(c)) {
      if (++nodes_ > budget_) {
        exhausted_ = true;
        break;
      }
      a_.set_cell_unchecked(c.table, c.index, v);
      mark(c.result_carrier, v, 1);
      if (consistent(static_cast<int>(k)) && dfs(k + 1)) found = true;
      mark(c.result_carrier, v, -1);
      if (found || exhausted_) break;
    }
    if (!found) a_.set_cell_unchecked(c.table, c.index, kUnassigned);
    for (std::size_t i = 0; i < c.args.size(); ++i) mark(c.arg_carriers[i], c.args[i], -1);
    return found;
  }

  FiniteCEAlgebra& a_;
  std::vector<Cell> cells_;
  std::vector<Instance> eqs_;
  std::vector<Instance> goal_;
  std::uint64_t& nodes_;
  std::uint64_t budget_;
  std::vector<std::vector<int>> used_;
  std::vector<int> settled_;
  bool exhausted_ = false;
  AlgValuation refutation_;
};

std::string fresh_name(const Sort& s, int i) {
  std::string p(1, static_cast<char>(std::tolower(static_cast<unsigned char>(s.name.empty() ? 'e' : s.name[0]))));
  return "#" + p + std::to_string(i + 1);
}

}  // namespace

CounterModelResult search_counter_model(const CETheory& th, const ConstrainedEquation& goal,
                                        const CounterModelOptions& opt) {
  const UnderlyingModel& m = *th.model;
  std::vector<Sort> theory_sorts;
  std::vector<Sort> term_sorts;
  for (const auto& s : th.signature.sorts()) {
    if (s.is_theory()) {
      if (!m.is_finite(s))
        throw Error(ErrorCode::InvalidArgument,
                    "counter-model search needs a finite underlying model; " + m.name() + " has infinite sort " + s.name);
      theory_sorts.push_back(s);
    } else {
      term_sorts.push_back(s);
    }
  }
  goal.validate();

  std::set<std::string> relevant;
  for (const auto& e : th.equations) {
    symbols_in(e.lhs, relevant);
    symbols_in(e.rhs, relevant);
  }
  symbols_in(goal.lhs, relevant);
  symbols_in(goal.rhs, relevant);

  // Shapes: extra counts per theory sort, then sizes per term sort.
  std::vector<int> lo;
  std::vector<int> hi;
  for (std::size_t i = 0; i < theory_sorts.size(); ++i) {
    lo.push_back(0);
    hi.push_back(std::max(0, opt.max_extra));
  }
  for (const auto& s : term_sorts) {
    auto it = opt.term_sort_sizes.find(s.name);
    int fixed = it == opt.term_sort_sizes.end() ? 0 : it->second;
    lo.push_back(fixed > 0 ? fixed : 1);
    hi.push_back(fixed > 0 ? fixed : std::max(1, opt.max_term_sort_size));
  }
  std::vector<std::vector<int>> shapes;
  std::vector<int> cur = lo;
  while (true) {
    shapes.push_back(cur);
    std::size_t i = 0;
    while (i < cur.size() && cur[i] == hi[i]) cur[i] = lo[i], ++i;
    if (i == cur.size()) break;
    ++cur[i];
  }
  std::stable_sort(shapes.begin(), shapes.end(), [](const std::vector<int>& a, const std::vector<int>& b) {
    return std::accumulate(a.begin(), a.end(), 0) < std::accumulate(b.begin(), b.end(), 0);
  });

  CounterModelResult res;
  {
    std::ostringstream b;
    b << "extra elements per theory sort <= " << std::max(0, opt.max_extra);
    for (std::size_t i = 0; i < term_sorts.size(); ++i)
      b << ", |" << term_sorts[i].name << "| in [" << lo[theory_sorts.size() + i] << ", "
        << hi[theory_sorts.size() + i] << "]";
    res.bounds = b.str();
  }

  for (const auto& shape : shapes) {
    std::vector<Carrier> carriers;
    for (std::size_t i = 0; i < theory_sorts.size(); ++i) {
      Carrier c{theory_sorts[i], m.carrier(theory_sorts[i]), {}};
      for (int k = 0; k < shape[i]; ++k) c.extras.push_back(fresh_name(theory_sorts[i], k));
      carriers.push_back(std::move(c));
    }
    for (std::size_t i = 0; i < term_sorts.size(); ++i) {
      Carrier c{term_sorts[i], {}, {}};
      for (int k = 0; k < shape[theory_sorts.size() + i]; ++k) c.extras.push_back(fresh_name(term_sorts[i], k));
      carriers.push_back(std::move(c));
    }
    FiniteCEAlgebra a(th, carriers);
    ++res.shapes;

    std::vector<Instance> eqs;
    for (const auto& e : th.equations) {
      for_each_valuation(a, ce_vars(e), e.logical_vars, [&](const AlgValuation& rho) {
        if (holds(a, e.constraint, rho) && e.lhs != e.rhs) eqs.push_back({e.lhs, e.rhs, rho});
        return true;
      });
    }
    std::vector<Instance> goal_inst;
    for_each_valuation(a, ce_vars(goal), goal.logical_vars, [&](const AlgValuation& rho) {
      if (holds(a, goal.constraint, rho)) goal_inst.push_back({goal.lhs, goal.rhs, rho});
      return true;
    });
    if (goal_inst.empty() || goal.lhs == goal.rhs) continue;

    std::vector<std::size_t> carrier_of;
    auto carrier_pos = [&](const Sort& s) {
      for (std::size_t i = 0; i < a.carriers().size(); ++i)
        if (a.carriers()[i].sort == s) return i;
      return std::size_t{0};
    };
    std::vector<Cell> cells;
    for (std::size_t ti = 0; ti < a.tables().size(); ++ti) {
      const Table& t = a.tables()[ti];
      if (!relevant.count(table_key(*t.symbol))) continue;
      for (std::size_t ci = 0; ci < t.cells.size(); ++ci) {
        if (t.cells[ci] != kUnassigned) continue;
        Cell c;
        c.table = ti;
        c.index = ci;
        c.args = a.cell_args(t, ci);
        c.result_carrier = carrier_pos(t.symbol->result_sort);
        c.rank = -1;
        for (std::size_t i = 0; i < c.args.size(); ++i) {
          std::size_t cp = carrier_pos(t.symbol->arg_sorts[i]);
          c.arg_carriers.push_back(cp);
          const Carrier& car = a.carriers()[cp];
          if (!car.is_value(c.args[i]))
            c.rank = std::max(c.rank, c.args[i] - static_cast<int>(car.values.size()));
        }
        cells.push_back(std::move(c));
      }
    }
    std::stable_sort(cells.begin(), cells.end(), [](const Cell& x, const Cell& y) { return x.rank < y.rank; });

    ShapeSearch search(a, std::move(cells), std::move(eqs), std::move(goal_inst), res.nodes, opt.max_nodes);
    bool found = search.run();
    if (found) {
      // Irrelevant tables: term symbols map to the first element, theory
      // symbols follow the default completion.
      for (std::size_t ti = 0; ti < a.tables().size(); ++ti) {
        const Table& t = a.tables()[ti];
        if (t.symbol->is_theory()) continue;
        for (std::size_t ci = 0; ci < t.cells.size(); ++ci)
          if (t.cells[ci] == kUnassigned) a.set_cell_unchecked(ti, ci, 0);
      }
      a.complete_theory_tables();
      a.validate();
      res.refutation = search.refutation();
      res.algebra = std::move(a);
      return res;
    }
    if (search.exhausted()) {
      res.budget_exhausted = true;
      return res;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Congruences and quotients

FiniteCongruence FiniteCongruence::identity(const FiniteCEAlgebra& a) {
  FiniteCongruence c;
  for (const auto& car : a.carriers()) {
    std::vector<int> ids(static_cast<std::size_t>(car.size()));
    std::iota(ids.begin(), ids.end(), 0);
    c.classes[car.sort.name] = ids;
  }
  return c;
}

FiniteCEAlgebra quotient(const FiniteCEAlgebra& a, const FiniteCongruence& c) {
  // Canonical class numbering: classes in order of their least element.
  std::map<std::string, std::vector<int>> canon;
  std::vector<Carrier> carriers;
  for (const auto& car : a.carriers()) {
    auto it = c.classes.find(car.sort.name);
    if (it == c.classes.end() || it->second.size() != static_cast<std::size_t>(car.size()))
      throw Error(ErrorCode::InvalidArgument, "congruence does not cover the carrier of " + car.sort.name);
    const auto& ids = it->second;
    std::map<int, int> renum;
    std::vector<int> out(ids.size());
    Carrier q{car.sort, {}, {}};
    for (int e = 0; e < car.size(); ++e) {
      auto [pos, fresh] = renum.emplace(ids[static_cast<std::size_t>(e)], static_cast<int>(renum.size()));
      out[static_cast<std::size_t>(e)] = pos->second;
      if (!fresh) {
        if (car.is_value(e))
          throw Error(ErrorCode::NotACongruence, "merges model values " + car.name(pos->second) + " and " +
                                                     car.name(e) + " of sort " + car.sort.name);
        continue;
      }
      if (car.is_value(e)) {
        q.values.push_back(car.values[static_cast<std::size_t>(e)]);
      } else {
        q.extras.push_back(car.name(e));
      }
    }
    canon[car.sort.name] = std::move(out);
    carriers.push_back(std::move(q));
  }
  std::vector<SymbolRef> symbols;
  for (const auto& t : a.tables()) symbols.push_back(t.symbol);
  FiniteCEAlgebra q(a.model_ref(), symbols, carriers);
  for (std::size_t ti = 0; ti < a.tables().size(); ++ti) {
    const Table& t = a.tables()[ti];
    const FunSymbol& f = *t.symbol;
    const auto& rmap = canon[f.result_sort.name];
    const Table& qt = q.tables()[ti];
    std::vector<int> seen(qt.cells.size(), kUnassigned);
    std::vector<std::size_t> witness(qt.cells.size(), 0);
    for (std::size_t ci = 0; ci < t.cells.size(); ++ci) {
      auto args = a.cell_args(t, ci);
      std::vector<int> qargs;
      for (std::size_t i = 0; i < args.size(); ++i)
        qargs.push_back(canon[f.arg_sorts[i].name][static_cast<std::size_t>(args[i])]);
      std::size_t qc = q.cell_index(qt, qargs);
      int r = t.cells[ci];
      int qr = r < 0 ? r : rmap[static_cast<std::size_t>(r)];
      if (seen[qc] == kUnassigned) {
        seen[qc] = qr;
        witness[qc] = ci;
        continue;
      }
      if (seen[qc] != qr) {
        auto show = [&](std::size_t cell) {
          std::string s = f.name + "(";
          auto as = a.cell_args(t, cell);
          for (std::size_t i = 0; i < as.size(); ++i)
            s += (i ? ", " : "") + a.carrier(f.arg_sorts[i]).name(as[i]);
          return s + ")";
        };
        throw Error(ErrorCode::NotACongruence,
                    show(witness[qc]) + " and " + show(ci) + " have related arguments but unrelated results");
      }
    }
    for (std::size_t qc = 0; qc < seen.size(); ++qc) {
      if (qt.fixed[qc]) {
        if (seen[qc] != qt.cells[qc])
          throw Error(ErrorCode::NotACongruence, "quotient table of " + f.name + " disagrees with the model");
        continue;
      }
      q.set_cell_unchecked(ti, qc, seen[qc]);
    }
  }
  q.validate();
  return q;
}

// ---------------------------------------------------------------------------
// Value consistency

std::string ConsistencyReport::to_string() const {
  if (consistent()) return "ConsistentUpTo(" + std::to_string(depth) + ")";
  return "InconsistentWitness(" + u->to_string() + ", " + v->to_string() + ")";
}

ConsistencyReport check_value_consistency(const CETheory& th, int depth, std::size_t max_nodes) {
  std::set<Value> starts;
  std::function<void(const Term&)> collect = [&](const Term& t) {
    if (t.is_value()) starts.insert(t.value());
    if (t.is_app())
      for (const auto& u : t.args()) collect(u);
  };
  for (const auto& e : th.equations) {
    collect(e.lhs);
    collect(e.rhs);
    collect(e.constraint);
  }
  StepPools pools = StepPools::defaults(th, {});
  for (const auto& [sort, vals] : pools.values)
    for (const auto& v : vals)
      if (v.is_value()) starts.insert(v.value());

  ConsistencyReport rep;
  rep.depth = depth;
  for (const auto& u : starts) {
    for (auto& [w, trace] : reachable(Term::val(u), th, pools, depth, max_nodes)) {
      if (w.is_value() && !(w.value() == u)) {
        rep.kind = ConsistencyReport::Kind::InconsistentWitness;
        rep.u = u;
        rep.v = w.value();
        rep.trace = std::move(trace);
        return rep;
      }
    }
  }
  return rep;
}

}  // namespace lcre
