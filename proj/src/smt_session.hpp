#pragma once

#include <string>
#include <sys/types.h>

#include "lcre/validity.hpp"

namespace lcre {

// An SMT-LIB v2 solver running as a child process; one query at a time.
class SolverSession {
 public:
  SolverSession(std::string command, int timeout_ms);
  ~SolverSession();
  SolverSession(const SolverSession&) = delete;
  SolverSession& operator=(const SolverSession&) = delete;

  Verdict check_validity(const UnderlyingModel& m, const Term& phi);

 private:
  void start();
  void stop();
  void send(const std::string& text);
  // Reads one complete s-expression or atom; throws on timeout or EOF.
  std::string read_response(int timeout_ms);

  std::string command_;
  int timeout_ms_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

std::string to_smtlib(const Term& t);

}  // namespace lcre
