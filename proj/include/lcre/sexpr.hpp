#pragma once

#include <string>
#include <vector>

#include "lcre/error.hpp"

namespace lcre {

struct SExpr {
  std::string atom;
  std::vector<SExpr> list;
  bool list_node = false;
  int line = 0;
  int column = 0;

  bool is_list() const { return list_node; }
  bool is_atom() const { return !list_node; }
  bool is_atom(const std::string& s) const { return !list_node && atom == s; }
  // List whose first element is the given atom.
  bool is_form(const std::string& head) const {
    return list_node && !list.empty() && list[0].is_atom(head);
  }
  std::string to_string() const;
};

// Comments run from ';' to end of line.
std::vector<SExpr> parse_sexprs(const std::string& text);
SExpr parse_sexpr(const std::string& text);

[[noreturn]] void fail_at(const SExpr& e, const std::string& what);

}  // namespace lcre
