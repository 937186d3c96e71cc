#include <iostream>

#include "CLI11.hpp"
#include "lcre/cli.hpp"

int main(int argc, char** argv) {
  lcre::RunConfig cfg;
  lcre::CommandArgs args;
  int bound = 0;
  std::string format = "text";

  CLI::App app{"Logically constrained equational reasoning"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--bound", bound, "conversion bound (rule steps)");
  app.add_option("--box", cfg.box, "sample box for integer logical variables")->capture_default_str();
  app.add_option("--pool", cfg.pool, "integer value pool [-N, N]")->capture_default_str();
  app.add_option("--depth", cfg.depth, "consistency search depth")->capture_default_str();
  app.add_option("--extra", cfg.extra, "fresh elements per theory sort in counter-model search")
      ->capture_default_str();
  app.add_option("--term-size", cfg.term_size, "largest term sort carrier in counter-model search")
      ->capture_default_str();
  app.add_option("--solver", cfg.solver, "SMT-LIB solver command (default $LCRE_SOLVER)");
  app.add_option("--timeout", cfg.timeout_ms, "solver timeout in ms")->capture_default_str();
  app.add_option("--format", format, "output format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
  app.add_option("--seed", cfg.seed, "random seed")->capture_default_str();

  auto sub = [&](const std::string& name, const std::string& help) {
    CLI::App* s = app.add_subcommand(name, help);
    s->add_option("theory", args.theory, "theory file")->required();
    return s;
  };
  auto goal_opts = [&](CLI::App* s) {
    s->add_option("-g,--goal", args.goal, "named goal of the theory");
    s->add_option("-l,--lhs", args.lhs, "left-hand side");
    s->add_option("-r,--rhs", args.rhs, "right-hand side");
    s->add_option("-x,--vars", args.vars, "logical variables, e.g. \"x y\"");
    s->add_option("-c,--constraint", args.constraint, "constraint (default true)");
  };

  sub("parse", "check a theory file");
  auto* rw = sub("rewrite", "rewrite a term left to right");
  rw->add_option("-t,--term", args.term, "term")->required();
  rw->add_option("-s,--strategy", args.strategy, "innermost | outermost")->capture_default_str();
  rw->add_option("-n,--steps", args.steps, "rule step limit")->capture_default_str();
  auto* cv = sub("convert", "search a conversion between two terms");
  cv->add_option("-l,--lhs", args.lhs, "source term")->required();
  cv->add_option("-r,--rhs", args.rhs, "target term")->required();
  goal_opts(sub("validate", "decide or sample validity of a constrained equation"));
  auto* ck = sub("check", "check a derivation");
  ck->add_option("-p,--proof", args.proof, "proof file")->required();
  ck->add_option("-g,--goal", args.goal, "require the conclusion to be this goal");
  auto* pv = sub("prove", "search a derivation");
  goal_opts(pv);
  pv->add_option("-o,--output", args.output, "write the proof here");
  sub("consistent", "search a conversion between distinct values");
  auto* rf = sub("refute", "search a finite counter-model");
  goal_opts(rf);
  rf->add_option("-o,--output", args.output, "write the algebra here");
  auto* mc = sub("model-check", "check a finite algebra against the theory");
  mc->add_option("-a,--algebra", args.algebra, "algebra file")->required();
  goal_opts(mc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }
  if (bound > 0 || app.count("--bound")) cfg.bound = bound;
  cfg.json = format == "json";
  const std::string command = app.get_subcommands().front()->get_name();
  lcre::CommandResult r = lcre::run_command(cfg, command, args);
  std::cout << r.rendered(cfg);
  return r.exit_code;
}
