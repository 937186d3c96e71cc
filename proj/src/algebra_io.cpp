#include <sstream>

#include "lcre/algebra.hpp"
#include "lcre/syntax.hpp"

namespace lcre {

namespace {

Value value_atom(const SExpr& e, const Sort& s) {
  if (s == bool_sort()) {
    if (e.is_atom("true")) return bool_value(true);
    if (e.is_atom("false")) return bool_value(false);
  } else if (e.is_atom() && !e.atom.empty()) {
    std::size_t i = e.atom[0] == '-' ? 1 : 0;
    bool digits = i < e.atom.size();
    for (std::size_t k = i; k < e.atom.size(); ++k) digits = digits && std::isdigit(static_cast<unsigned char>(e.atom[k]));
    if (digits) return Value{s, BigInt(e.atom)};
  }
  fail_at(e, "expected a value of sort " + s.name + " or a #-prefixed element");
}

int element_atom(const SExpr& e, const Carrier& c) {
  if (!e.is_atom()) fail_at(e, "expected an element of " + c.sort.name);
  if (auto k = c.find(e.atom)) return *k;
  fail_at(e, e.atom + " is not an element of " + c.sort.name);
}

SymbolRef table_symbol(const SExpr& head, const CETheory& th) {
  if (head.is_atom()) {
    auto all = th.signature.overloads(head.atom);
    if (all.empty()) fail_at(head, "unknown symbol " + head.atom);
    if (all.size() > 1) fail_at(head, head.atom + " is overloaded; write (" + head.atom + " ARGSORT...)");
    return all[0];
  }
  if (head.list.empty() || !head.list[0].is_atom()) fail_at(head, "expected a symbol");
  std::vector<Sort> args;
  for (std::size_t i = 1; i < head.list.size(); ++i) {
    const Sort* s = head.list[i].is_atom() ? th.signature.find_sort(head.list[i].atom) : nullptr;
    if (!s) fail_at(head.list[i], "unknown sort");
    args.push_back(*s);
  }
  SymbolRef f = th.signature.resolve(head.list[0].atom, args);
  if (!f) fail_at(head, "no symbol " + head.list[0].atom + " with these argument sorts");
  return f;
}

}  // namespace

FiniteCEAlgebra parse_algebra(const std::string& text, const CETheory& th) {
  SExpr root = parse_sexpr(text);
  if (!root.is_form("algebra")) fail_at(root, "expected (algebra ...)");
  std::vector<Carrier> carriers;
  std::vector<const SExpr*> tables;
  for (std::size_t i = 1; i < root.list.size(); ++i) {
    const SExpr& e = root.list[i];
    if (e.is_form("carrier")) {
      if (e.list.size() < 3 || !e.list[1].is_atom()) fail_at(e, "expected (carrier SORT elem...)");
      const Sort* s = th.signature.find_sort(e.list[1].atom);
      if (!s) fail_at(e.list[1], "unknown sort " + e.list[1].atom);
      for (const auto& c : carriers)
        if (c.sort == *s) fail_at(e, "second carrier for " + s->name);
      Carrier c{*s, {}, {}};
      for (std::size_t k = 2; k < e.list.size(); ++k) {
        const SExpr& a = e.list[k];
        if (!a.is_atom()) fail_at(a, "expected an element");
        if (!s->is_theory()) {
          c.extras.push_back(a.atom);
        } else if (a.atom.rfind('#', 0) == 0) {
          c.extras.push_back(a.atom);
        } else {
          Value v = value_atom(a, *s);
          if (!th.model->in_carrier(v)) fail_at(a, a.atom + " is not a model value");
          c.values.push_back(v);
        }
      }
      carriers.push_back(std::move(c));
    } else if (e.is_form("table")) {
      tables.push_back(&e);
    } else {
      fail_at(e, "expected (carrier ...) or (table ...)");
    }
  }
  FiniteCEAlgebra a = [&] {
    try {
      return FiniteCEAlgebra(th, carriers);
    } catch (const Error& err) {
      fail_at(root, err.what());
    }
  }();
  for (const SExpr* tp : tables) {
    const SExpr& e = *tp;
    if (e.list.size() < 2) fail_at(e, "expected (table f ((args...) result)...)");
    SymbolRef f = table_symbol(e.list[1], th);
    std::size_t ti = a.table_index(*f);
    const Carrier& out = a.carrier(f->result_sort);
    for (std::size_t k = 2; k < e.list.size(); ++k) {
      const SExpr& row = e.list[k];
      if (!row.is_list() || row.list.size() != 2 || !row.list[0].is_list())
        fail_at(row, "expected ((args...) result)");
      const auto& as = row.list[0].list;
      if (as.size() != f->arity()) fail_at(row, "wrong number of arguments for " + f->name);
      std::vector<int> args;
      for (std::size_t i = 0; i < as.size(); ++i) args.push_back(element_atom(as[i], a.carrier(f->arg_sorts[i])));
      std::size_t cell = a.cell_index(a.tables()[ti], args);
      if (a.tables()[ti].cells[cell] != kUnassigned && !a.tables()[ti].fixed[cell])
        fail_at(row, "duplicate entry for " + f->name);
      int r = element_atom(row.list[1], out);
      if (a.tables()[ti].fixed[cell]) {
        if (a.tables()[ti].cells[cell] != r) fail_at(row, "entry of " + f->name + " on model values is fixed by the model");
        continue;
      }
      a.set_cell(ti, cell, r);
    }
  }
  a.complete_theory_tables();
  try {
    a.validate();
  } catch (const Error& err) {
    fail_at(root, err.what());
  }
  return a;
}

FiniteCEAlgebra load_algebra(const std::string& path, const CETheory& th) { return parse_algebra(read_file(path), th); }

std::string print_algebra(const FiniteCEAlgebra& a) {
  std::ostringstream out;
  out << "(algebra";
  for (const auto& c : a.carriers()) {
    out << "\n  (carrier " << c.sort.name;
    for (int e = 0; e < c.size(); ++e) out << " " << c.name(e);
    out << ")";
  }
  std::map<std::string, int> arity_count;
  for (const auto& t : a.tables()) ++arity_count[t.symbol->name];
  for (const auto& t : a.tables()) {
    const FunSymbol& f = *t.symbol;
    std::vector<std::size_t> rows;
    for (std::size_t c = 0; c < t.cells.size(); ++c)
      if (!t.fixed[c]) rows.push_back(c);
    if (rows.empty()) continue;
    out << "\n  (table ";
    if (arity_count[f.name] > 1) {
      out << "(" << f.name;
      for (const auto& s : f.arg_sorts) out << " " << s.name;
      out << ")";
    } else {
      out << f.name;
    }
    for (std::size_t c : rows) {
      auto args = a.cell_args(t, c);
      out << " ((";
      for (std::size_t i = 0; i < args.size(); ++i) out << (i ? " " : "") << a.carrier(f.arg_sorts[i]).name(args[i]);
      out << ") " << a.carrier(f.result_sort).name(t.cells[c]) << ")";
    }
    out << ")";
  }
  out << ")\n";
  return out.str();
}

}  // namespace lcre
