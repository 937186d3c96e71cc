#include "lcre/sexpr.hpp"

#include <cctype>

namespace lcre {

namespace {

class Reader {
 public:
  explicit Reader(const std::string& s) : s_(s) {}

  void skip() {
    while (pos_ < s_.size()) {
      char c = s_[pos_];
      if (c == ';') {
        while (pos_ < s_.size() && s_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  bool done() {
    skip();
    return pos_ >= s_.size();
  }

  SExpr read() {
    skip();
    if (pos_ >= s_.size()) throw ParseError(line_, col_, "unexpected end of input");
    SExpr e;
    e.line = line_;
    e.column = col_;
    char c = s_[pos_];
    if (c == ')') throw ParseError(line_, col_, "unexpected ')'");
    if (c == '(') {
      advance();
      e.list_node = true;
      while (true) {
        skip();
        if (pos_ >= s_.size()) throw ParseError(e.line, e.column, "unclosed '('");
        if (s_[pos_] == ')') {
          advance();
          break;
        }
        e.list.push_back(read());
      }
      return e;
    }
    std::size_t start = pos_;
    while (pos_ < s_.size()) {
      char d = s_[pos_];
      if (std::isspace(static_cast<unsigned char>(d)) || d == '(' || d == ')' || d == ';') break;
      advance();
    }
    e.atom = s_.substr(start, pos_ - start);
    return e;
  }

 private:
  void advance() {
    if (s_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else if ((static_cast<unsigned char>(s_[pos_]) & 0xC0) != 0x80) {
      ++col_;
    }
    ++pos_;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::string SExpr::to_string() const {
  if (!list_node) return atom;
  std::string out = "(";
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i) out += " ";
    out += list[i].to_string();
  }
  return out + ")";
}

std::vector<SExpr> parse_sexprs(const std::string& text) {
  Reader r(text);
  std::vector<SExpr> out;
  while (!r.done()) out.push_back(r.read());
  return out;
}

SExpr parse_sexpr(const std::string& text) {
  Reader r(text);
  SExpr e = r.read();
  if (!r.done()) throw ParseError(1, 1, "trailing input after expression");
  return e;
}

void fail_at(const SExpr& e, const std::string& what) { throw ParseError(e.line, e.column, what); }

}  // namespace lcre
