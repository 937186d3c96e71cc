#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lcre {

// Bounds left unset fall back to per-command defaults (see README).
struct RunConfig {
  std::optional<int> bound;    // conversion bound
  int box = 5;                 // sample box for integer logical variables
  int pool = 8;                // integer value pool [-pool, pool]
  int depth = 8;               // consistency depth
  int extra = 1;               // counter-model fresh elements per theory sort
  int term_size = 2;           // counter-model term sort size limit
  std::string solver;          // falls back to $LCRE_SOLVER
  int timeout_ms = 5000;
  bool json = false;
  std::uint32_t seed = 20240611;
};

struct CommandArgs {
  std::string theory;
  std::string goal;        // named goal of the theory
  std::string lhs;
  std::string rhs;
  std::string vars;        // X, e.g. "x y"
  std::string constraint;  // defaults to true
  std::string term;        // rewrite input
  std::string strategy = "innermost";
  int steps = 100;
  std::string proof;       // check
  std::string algebra;     // model-check
  std::string output;      // prove, refute: write the object here
};

struct CommandResult {
  int exit_code = 0;
  std::string verdict;
  std::string text;
  std::string json;

  const std::string& rendered(const RunConfig& c) const { return c.json ? json : text; }
};

// 0 affirmative, 1 negative or witness, 2 unknown or bound exhausted,
// 3 input error, 4 oracle failure.
int exit_code_for(const std::string& command, const std::string& verdict);
const std::vector<std::string>& command_names();

CommandResult run_command(const RunConfig& config, const std::string& command, const CommandArgs& args);

}  // namespace lcre
