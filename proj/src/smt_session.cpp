#include "smt_session.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <sstream>

#include "lcre/sexpr.hpp"

namespace lcre {

namespace {

std::string quote(const std::string& name) { return "|" + name + "|"; }

std::vector<std::string> split_command(const std::string& cmd) {
  std::istringstream in(cmd);
  std::vector<std::string> out;
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

}  // namespace

std::string to_smtlib(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Var: return quote(t.variable().name);
    case Term::Kind::Val: {
      if (t.sort().name == "Bool") return t.value().as_bool() ? "true" : "false";
      const BigInt& n = t.value().num;
      if (n < 0) return "(- " + BigInt(-n).str() + ")";
      return n.str();
    }
    case Term::Kind::App: break;
  }
  const FunSymbol& f = t.symbol();
  auto args = [&] {
    std::string s;
    for (const auto& a : t.args()) s += " " + to_smtlib(a);
    return s;
  };
  switch (f.op) {
    case Builtin::Div:
      return "(ite (= " + to_smtlib(t.arg(1)) + " 0) 0 (div" + args() + "))";
    case Builtin::Mod:
      return "(ite (= " + to_smtlib(t.arg(1)) + " 0) " + to_smtlib(t.arg(0)) + " (mod" + args() + "))";
    case Builtin::Iff: return "(=" + args() + ")";
    case Builtin::None:
      throw Error(ErrorCode::NonTheorySymbol, "term symbol " + f.name + " in a constraint");
    default: return "(" + f.name + args() + ")";
  }
}

SolverSession::SolverSession(std::string command, int timeout_ms)
    : command_(std::move(command)), timeout_ms_(timeout_ms) {}

SolverSession::~SolverSession() { stop(); }

void SolverSession::start() {
  auto argv_s = split_command(command_);
  if (argv_s.empty()) throw Error(ErrorCode::OracleFailure, "empty solver command");
  int in_pipe[2];
  int out_pipe[2];
  if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0)
    throw Error(ErrorCode::OracleFailure, "cannot create pipes for solver");
  pid_t pid = fork();
  if (pid < 0) throw Error(ErrorCode::OracleFailure, "cannot fork solver");
  if (pid == 0) {
    dup2(in_pipe[0], 0);
    dup2(out_pipe[1], 1);
    int devnull = open("/dev/null", O_WRONLY);
    if (devnull >= 0) dup2(devnull, 2);
    close(in_pipe[1]);
    close(out_pipe[0]);
    std::vector<char*> argv;
    for (auto& a : argv_s) argv.push_back(a.data());
    argv.push_back(nullptr);
    execvp(argv[0], argv.data());
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);
  signal(SIGPIPE, SIG_IGN);
  pid_ = pid;
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  buffer_.clear();
  send("(set-option :print-success false)\n(set-option :produce-models true)\n(set-logic QF_LIA)\n");
}

void SolverSession::stop() {
  if (pid_ <= 0) return;
  close(to_child_);
  close(from_child_);
  kill(pid_, SIGKILL);
  waitpid(pid_, nullptr, 0);
  pid_ = -1;
}

void SolverSession::send(const std::string& text) {
  std::size_t off = 0;
  while (off < text.size()) {
    ssize_t n = write(to_child_, text.data() + off, text.size() - off);
    if (n <= 0) {
      if (errno == EINTR) continue;
      stop();
      throw Error(ErrorCode::OracleFailure, "solver closed its input");
    }
    off += static_cast<std::size_t>(n);
  }
}

std::string SolverSession::read_response(int timeout_ms) {
  auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms);
  while (true) {
    // Try to cut one complete response from the buffer.
    std::size_t i = 0;
    while (i < buffer_.size() && std::isspace(static_cast<unsigned char>(buffer_[i]))) ++i;
    if (i < buffer_.size()) {
      if (buffer_[i] == '(') {
        int depth = 0;
        bool in_str = false;
        for (std::size_t j = i; j < buffer_.size(); ++j) {
          char c = buffer_[j];
          if (in_str) {
            if (c == '"') in_str = false;
            continue;
          }
          if (c == '"') in_str = true;
          else if (c == '(') ++depth;
          else if (c == ')' && --depth == 0) {
            std::string out = buffer_.substr(i, j + 1 - i);
            buffer_.erase(0, j + 1);
            return out;
          }
        }
      } else {
        auto nl = buffer_.find('\n', i);
        if (nl != std::string::npos) {
          std::string out = buffer_.substr(i, nl - i);
          buffer_.erase(0, nl + 1);
          while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) out.pop_back();
          return out;
        }
      }
    }
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
                    deadline - std::chrono::steady_clock::now())
                    .count();
    if (left <= 0) {
      stop();
      throw Error(ErrorCode::InvalidArgument, "timeout");
    }
    pollfd p{from_child_, POLLIN, 0};
    int r = poll(&p, 1, static_cast<int>(left));
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) continue;
    char chunk[4096];
    ssize_t n = read(from_child_, chunk, sizeof chunk);
    if (n <= 0) {
      stop();
      throw Error(ErrorCode::OracleFailure, "solver terminated unexpectedly");
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

Verdict SolverSession::check_validity(const UnderlyingModel& m, const Term& phi) {
  if (pid_ <= 0) start();
  VarSet vars = vars_of(phi);
  std::string q = "(push 1)\n";
  for (const auto& v : vars)
    q += "(declare-const " + quote(v.name) + " " + v.sort.name + ")\n";
  q += "(assert (not " + to_smtlib(phi) + "))\n(check-sat)\n";
  std::string answer;
  try {
    send(q);
    answer = read_response(timeout_ms_ + 1000);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) return Verdict::unknown("solver timeout");
    throw;
  }
  if (answer == "unsat") {
    send("(pop 1)\n");
    return Verdict::valid();
  }
  if (answer == "unknown" || answer == "timeout") {
    send("(pop 1)\n");
    return Verdict::unknown("solver answered unknown");
  }
  if (answer.rfind("(error", 0) == 0) {
    send("(pop 1)\n");
    return Verdict::unknown("solver error: " + answer);
  }
  if (answer != "sat") {
    stop();
    throw Error(ErrorCode::OracleFailure, "unexpected solver output: " + answer);
  }
  send("(get-model)\n");
  std::string model_text = read_response(timeout_ms_ + 1000);
  send("(pop 1)\n");
  Substitution w;
  try {
    SExpr model = parse_sexpr(model_text);
    for (const auto& def : model.list) {
      // (define-fun NAME () SORT VALUE)
      if (!def.is_list() || def.list.size() != 5 || def.list[0].atom != "define-fun") continue;
      std::string name = def.list[1].atom;
      if (name.size() >= 2 && name.front() == '|') name = name.substr(1, name.size() - 2);
      const SExpr& val = def.list[4];
      for (const auto& v : vars) {
        if (v.name != name) continue;
        if (v.sort.name == "Bool") {
          w.bind(v, Term::boolean(val.atom == "true"));
        } else if (val.is_list() && val.list.size() == 2 && val.list[0].atom == "-") {
          w.bind(v, Term::integer(-BigInt(val.list[1].atom)));
        } else {
          w.bind(v, Term::integer(BigInt(val.atom)));
        }
      }
    }
  } catch (const std::exception& e) {
    throw Error(ErrorCode::OracleFailure, std::string("unreadable solver model: ") + e.what());
  }
  for (const auto& v : vars)
    if (!w.contains(v))
      w.bind(v, v.sort.name == "Bool" ? Term::boolean(false) : Term::integer(0));
  if (eval_constraint(m, apply_subst(w, phi)))
    throw Error(ErrorCode::OracleFailure, "solver model does not refute the constraint");
  return Verdict::invalid(w);
}

}  // namespace lcre
