#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lcre {

enum class ErrorCode {
  ParseError,
  UnknownSort,
  UnknownSymbol,
  IllSortedEquation,
  ConstraintVarsNotInX,
  SortMismatch,
  InvalidPosition,
  NonGroundInput,
  NonTheorySymbol,
  OracleFailure,
  IllegalStep,
  NotACongruence,
  UncoveredVariable,
  PreconditionUnverifiable,
  InvalidArgument,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Parse errors carry a 1-based line/column.
class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& what)
      : Error(ErrorCode::ParseError,
              std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace lcre
