#include "lcre/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "lcre/algebra.hpp"
#include "lcre/proof.hpp"
#include "lcre/syntax.hpp"

namespace lcre {

using json = nlohmann::json;

namespace {

constexpr const char* kSchema = "lcre-report/1";

const std::map<std::string, std::map<std::string, int>>& verdict_table() {
  static const std::map<std::string, std::map<std::string, int>> t = {
      {"parse", {{"well-formed", 0}}},
      {"rewrite", {{"normal-form", 0}, {"step-limit", 2}}},
      {"convert", {{"converts", 0}, {"no-conversion-within-bound", 2}}},
      {"validate",
       {{"ProvedGroundConversion", 0},
        {"ProvedByTriviality", 0},
        {"ConfirmedOnSamples", 0},
        {"NoConversionWithinBound", 1},
        {"Unknown", 2}}},
      {"check", {{"Accepted", 0}, {"Rejected", 1}, {"OracleUnknown", 2}}},
      {"prove", {{"proved", 0}, {"no-proof", 2}}},
      {"consistent", {{"ConsistentUpTo", 0}, {"InconsistentWitness", 1}}},
      {"refute", {{"counter-model", 1}, {"no-counter-model", 2}, {"budget-exhausted", 2}}},
      {"model-check", {{"model", 0}, {"not-a-model", 1}}},
  };
  return t;
}

struct Ctx {
  const RunConfig& cfg;
  const CommandArgs& args;
  std::ostringstream text;
  json data = json::object();
  std::string verdict;
};

OracleConfig oracle_config(const RunConfig& c) {
  OracleConfig oc;
  oc.solver = c.solver;
  if (oc.solver.empty())
    if (const char* env = std::getenv("LCRE_SOLVER")) oc.solver = env;
  oc.timeout_ms = c.timeout_ms;
  return oc;
}

std::vector<BigInt> int_pool(const RunConfig& c) {
  std::vector<BigInt> out;
  for (int i = -c.pool; i <= c.pool; ++i) out.emplace_back(i);
  return out;
}

CETheory theory_of(const CommandArgs& a) {
  if (a.theory.empty()) throw Error(ErrorCode::InvalidArgument, "no theory file given");
  return load_theory(a.theory);
}

ConstrainedEquation goal_of(const CETheory& th, const CommandArgs& a) {
  if (!a.goal.empty()) {
    const NamedGoal* g = th.find_goal(a.goal);
    if (!g) throw Error(ErrorCode::InvalidArgument, "no goal named " + a.goal);
    return g->ce;
  }
  if (a.lhs.empty() || a.rhs.empty()) throw Error(ErrorCode::InvalidArgument, "give a goal name or both sides");
  VarScope sc = theory_scope(th);
  ConstrainedEquation ce{parse_var_list(a.vars, sc), parse_term(a.lhs, th), parse_term(a.rhs, th),
                         parse_term(a.constraint.empty() ? "true" : a.constraint, th, {}, bool_sort())};
  ce.validate();
  return ce;
}

json trace_json(const ConversionTrace& tr, const CETheory& th) {
  json steps = json::array();
  Term cur = tr.start;
  for (const auto& st : tr.steps) {
    cur = replay_trace(cur, ConversionTrace{cur, {st}}, th);
    json s = {{"kind", st.kind == StepKind::Calc ? "calc" : "rule"},
              {"position", st.pos.to_string()},
              {"direction", st.dir == Direction::LeftToRight ? "->" : "<-"},
              {"term", cur.to_string()}};
    if (st.kind == StepKind::Rule) {
      s["equation"] = st.equation + 1;
      s["substitution"] = st.witness.to_string();
    }
    steps.push_back(std::move(s));
  }
  return {{"start", tr.start.to_string()}, {"length", tr.length()}, {"rule_steps", tr.rule_steps()}, {"steps", steps}};
}

void trace_text(std::ostream& out, const ConversionTrace& tr, const CETheory& th) {
  out << "  " << tr.start.to_string() << "\n";
  Term cur = tr.start;
  for (const auto& st : tr.steps) {
    cur = replay_trace(cur, ConversionTrace{cur, {st}}, th);
    std::string how = st.kind == StepKind::Calc ? "calc" : "eq " + std::to_string(st.equation + 1);
    out << "  " << (st.dir == Direction::LeftToRight ? "->" : "<-") << " " << cur.to_string() << "   [" << how
        << " @" << st.pos.to_string();
    if (st.kind == StepKind::Rule && !st.witness.empty()) out << " " << st.witness.to_string();
    out << "]\n";
  }
}

void write_output(const std::string& path, const std::string& content) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  f << content;
}

// ------------------------------------------------------------------ commands

void cmd_parse(Ctx& c) {
  CETheory th = theory_of(c.args);
  c.verdict = "well-formed";
  std::size_t term_sorts = 0;
  for (const auto& s : th.signature.sorts()) term_sorts += !s.is_theory();
  c.data["model"] = th.model->name();
  c.data["equations"] = th.equations.size();
  c.data["term_symbols"] = th.signature.term_symbols().size();
  c.data["term_sorts"] = term_sorts;
  c.data["goals"] = th.goals.size();
  c.text << "well-formed: " << th.equations.size() << " equations, " << th.goals.size() << " goals over "
         << th.model->name() << "\n";
  for (std::size_t i = 0; i < th.equations.size(); ++i)
    c.text << "  " << i + 1 << ". " << th.equations[i].to_string() << "\n";
}

bool innermost_before(const Position& p, const Position& q) {
  const auto& a = p.path;
  const auto& b = q.path;
  std::size_t n = std::min(a.size(), b.size());
  if (std::equal(a.begin(), a.begin() + static_cast<long>(n), b.begin())) return a.size() > b.size();
  return a < b;
}

void cmd_rewrite(Ctx& c) {
  CETheory th = theory_of(c.args);
  const UnderlyingModel& m = *th.model;
  if (c.args.term.empty()) throw Error(ErrorCode::InvalidArgument, "no term given");
  if (c.args.strategy != "innermost" && c.args.strategy != "outermost")
    throw Error(ErrorCode::InvalidArgument, "unknown strategy " + c.args.strategy);
  Term start = parse_term(c.args.term, th);
  ConversionTrace tr{start, {}};
  auto calc = [&](const Term& from) {
    Term cur = from;
    for (const auto& cs : calc_sequence(m, from)) {
      TraceStep s;
      s.kind = StepKind::Calc;
      s.pos = cs.pos;
      s.result = cs.result;
      tr.steps.push_back(std::move(s));
      cur = cs.result;
    }
    return cur;
  };
  Term cur = calc(start);
  auto pool = int_pool(c.cfg);
  StepPools pools = StepPools::defaults(th, {start}, {}, pool);
  int rule_steps = 0;
  bool normal = false;
  while (true) {
    std::vector<RuleStep> cands;
    for (auto& rs : rule_step_candidates(cur, th, pools))
      if (rs.dir == Direction::LeftToRight && !rs.expanded) cands.push_back(std::move(rs));
    if (cands.empty()) {
      normal = true;
      break;
    }
    if (rule_steps >= c.args.steps) break;
    auto best = std::min_element(cands.begin(), cands.end(), [&](const RuleStep& a, const RuleStep& b) {
      if (a.pos == b.pos) return false;
      return c.args.strategy == "innermost" ? innermost_before(a.pos, b.pos) : a.pos < b.pos;
    });
    TraceStep s;
    s.kind = StepKind::Rule;
    s.pos = best->pos;
    s.equation = best->equation;
    s.witness = best->witness;
    s.result = best->result;
    tr.steps.push_back(std::move(s));
    ++rule_steps;
    cur = calc(best->result);
  }
  c.verdict = normal ? "normal-form" : "step-limit";
  c.data["result"] = cur.to_string();
  c.data["strategy"] = c.args.strategy;
  c.data["trace"] = trace_json(tr, th);
  c.text << (normal ? "normal form" : "step limit reached") << " after " << rule_steps << " rule steps: "
         << cur.to_string() << "\n";
  trace_text(c.text, tr, th);
}

void cmd_convert(Ctx& c) {
  CETheory th = theory_of(c.args);
  if (c.args.lhs.empty() || c.args.rhs.empty()) throw Error(ErrorCode::InvalidArgument, "convert needs -l and -r");
  Term s = parse_term(c.args.lhs, th);
  Term t = parse_term(c.args.rhs, th);
  SearchOptions opt;
  opt.bound = c.cfg.bound.value_or(8);
  auto tr = conversion_search(s, t, th, opt);
  c.data["bound"] = opt.bound;
  if (!tr) {
    c.verdict = "no-conversion-within-bound";
    c.text << "no conversion within " << opt.bound << " rule steps\n";
    return;
  }
  c.verdict = "converts";
  c.data["trace"] = trace_json(*tr, th);
  c.text << "converts in " << tr->length() << " steps (" << tr->rule_steps() << " rule steps)\n";
  trace_text(c.text, *tr, th);
}

void cmd_validate(Ctx& c) {
  CETheory th = theory_of(c.args);
  ConstrainedEquation ce = goal_of(th, c.args);
  ValidityOracle oracle(th.model, oracle_config(c.cfg));
  ValidityBudget b;
  b.bound = c.cfg.bound.value_or(8);
  b.box = c.cfg.box;
  b.int_pool = int_pool(c.cfg);
  ValidityStatus st = check_ce_validity(th, ce, oracle, b);
  c.verdict = st.name();
  c.data["goal"] = ce.to_string();
  c.data["samples"] = st.samples;
  if (!st.note.empty()) c.data["note"] = st.note;
  c.text << st.name() << ": " << ce.to_string() << "\n";
  if (st.kind == ValidityStatus::Kind::NoConversionWithinBound) {
    c.data["sample"] = st.sample.to_string();
    c.text << "  no conversion at sample " << st.sample.to_string() << "\n";
  }
  if (st.kind == ValidityStatus::Kind::ConfirmedOnSamples) c.text << "  " << st.samples << " samples\n";
  if (st.trace) {
    c.data["trace"] = trace_json(*st.trace, th);
    trace_text(c.text, *st.trace, th);
  }
  if (!st.note.empty()) c.text << "  " << st.note << "\n";
}

void cmd_check(Ctx& c) {
  CETheory th = theory_of(c.args);
  if (c.args.proof.empty()) throw Error(ErrorCode::InvalidArgument, "check needs -p PROOF");
  Derivation d = load_proof(c.args.proof, th);
  ValidityOracle oracle(th.model, oracle_config(c.cfg));
  CheckReport r = check_proof(th, d, oracle);
  c.verdict = r.verdict == CheckReport::Verdict::Accepted   ? "Accepted"
              : r.verdict == CheckReport::Verdict::Rejected ? "Rejected"
                                                            : "OracleUnknown";
  c.data["conclusion"] = d.conclusion.to_string();
  c.data["nodes"] = d.node_count();
  if (!r.accepted()) {
    c.data["path"] = r.path_string();
    c.data["error"] = r.error_string();
    c.data["detail"] = r.detail;
  }
  if (!c.args.goal.empty()) {
    bool same = d.conclusion == goal_of(th, c.args);
    c.data["proves_goal"] = same;
    if (!same && r.accepted()) {
      c.verdict = "Rejected";
      c.data["error"] = "conclusion differs from goal " + c.args.goal;
    }
  }
  c.text << c.verdict << ": " << d.conclusion.to_string() << " (" << d.node_count() << " nodes)\n";
  if (!r.accepted()) c.text << "  " << r.to_string() << "\n";
  if (c.data.contains("proves_goal") && !c.data["proves_goal"].get<bool>())
    c.text << "  conclusion differs from goal " << c.args.goal << "\n";
}

void cmd_prove(Ctx& c) {
  CETheory th = theory_of(c.args);
  ConstrainedEquation ce = goal_of(th, c.args);
  ValidityOracle oracle(th.model, oracle_config(c.cfg));
  std::optional<Derivation> d;
  std::string method;
  try {
    d = generate_calc_proof(th, ce, oracle, c.cfg.box);
    method = "calculation";
  } catch (const Error& e) {
    if (e.code() != ErrorCode::PreconditionUnverifiable) throw;
  }
  if (!d) {
    ProveBudget b;
    if (c.cfg.bound) b.conversion_bound = *c.cfg.bound;
    d = prove_heuristic(th, ce, oracle, b);
    method = "search";
  }
  c.data["goal"] = ce.to_string();
  if (!d) {
    c.verdict = "no-proof";
    c.text << "no proof found for " << ce.to_string() << "\n";
    return;
  }
  c.verdict = "proved";
  std::string text = serialize_proof(*d, th);
  c.data["method"] = method;
  c.data["nodes"] = d->node_count();
  c.data["proof"] = text;
  if (!c.args.output.empty()) write_output(c.args.output, text);
  c.text << "proved by " << method << " (" << d->node_count() << " nodes)\n" << text;
  if (text.empty() || text.back() != '\n') c.text << "\n";
}

void cmd_consistent(Ctx& c) {
  CETheory th = theory_of(c.args);
  ConsistencyReport r = check_value_consistency(th, c.cfg.depth);
  c.verdict = r.consistent() ? "ConsistentUpTo" : "InconsistentWitness";
  c.data["depth"] = c.cfg.depth;
  c.text << r.to_string() << "\n";
  if (!r.consistent()) {
    c.data["u"] = r.u->to_string();
    c.data["v"] = r.v->to_string();
    c.data["trace"] = trace_json(*r.trace, th);
    trace_text(c.text, *r.trace, th);
  }
}

void cmd_refute(Ctx& c) {
  CETheory th = theory_of(c.args);
  ConstrainedEquation ce = goal_of(th, c.args);
  CounterModelOptions opt;
  opt.max_extra = c.cfg.extra;
  opt.max_term_sort_size = c.cfg.term_size;
  CounterModelResult r = search_counter_model(th, ce, opt);
  c.data["goal"] = ce.to_string();
  c.data["bounds"] = r.bounds;
  c.data["nodes"] = r.nodes;
  if (!r.algebra) {
    c.verdict = r.budget_exhausted ? "budget-exhausted" : "no-counter-model";
    c.text << (r.budget_exhausted ? "search budget exhausted" : "no counter-model") << " (" << r.bounds << ", "
           << r.nodes << " nodes)\n";
    return;
  }
  c.verdict = "counter-model";
  std::string alg = print_algebra(*r.algebra);
  c.data["algebra"] = alg;
  c.data["valuation"] = r.algebra->valuation_string(r.refutation);
  if (!c.args.output.empty()) write_output(c.args.output, alg);
  c.text << "counter-model refuting " << ce.to_string() << " at " << r.algebra->valuation_string(r.refutation)
         << "\n" << alg;
}

void cmd_model_check(Ctx& c) {
  CETheory th = theory_of(c.args);
  if (c.args.algebra.empty()) throw Error(ErrorCode::InvalidArgument, "model-check needs -a ALGEBRA");
  FiniteCEAlgebra a = load_algebra(c.args.algebra, th);
  ModelCheck mc = check_is_model(a, th);
  c.verdict = mc.valid ? "model" : "not-a-model";
  c.text << (mc.valid ? "model of the theory" : "not a model: " + mc.to_string(a, th)) << "\n";
  if (!mc.valid) {
    c.data["equation"] = mc.equation + 1;
    c.data["valuation"] = a.valuation_string(mc.rho);
    return;
  }
  if (!c.args.goal.empty() || !c.args.lhs.empty()) {
    ConstrainedEquation ce = goal_of(th, c.args);
    auto r = check_refutes(a, ce);
    c.data["goal"] = ce.to_string();
    c.data["refutes"] = r.has_value();
    if (r) c.data["valuation"] = a.valuation_string(*r);
    c.text << (r ? "refutes " : "does not refute ") << ce.to_string();
    if (r) c.text << " at " << a.valuation_string(*r);
    c.text << "\n";
  }
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"parse", "rewrite",    "convert", "validate",   "check",
                                                 "prove", "consistent", "refute",  "model-check"};
  return names;
}

int exit_code_for(const std::string& command, const std::string& verdict) {
  if (verdict == "input-error") return 3;
  if (verdict == "oracle-failure") return 4;
  auto it = verdict_table().find(command);
  if (it == verdict_table().end()) throw Error(ErrorCode::InvalidArgument, "unknown command " + command);
  auto jt = it->second.find(verdict);
  if (jt == it->second.end()) throw Error(ErrorCode::InvalidArgument, "unknown verdict " + verdict + " for " + command);
  return jt->second;
}

CommandResult run_command(const RunConfig& config, const std::string& command, const CommandArgs& args) {
  auto t0 = std::chrono::steady_clock::now();
  Ctx c{config, args, {}, json::object(), {}};
  std::string error;
  try {
    if (config.bound && *config.bound <= 0) throw Error(ErrorCode::InvalidArgument, "--bound must be positive");
    if (config.box <= 0 || config.pool <= 0 || config.depth <= 0 || config.extra < 0 || config.term_size <= 0)
      throw Error(ErrorCode::InvalidArgument, "bounds must be positive");
    if (command == "parse") cmd_parse(c);
    else if (command == "rewrite") cmd_rewrite(c);
    else if (command == "convert") cmd_convert(c);
    else if (command == "validate") cmd_validate(c);
    else if (command == "check") cmd_check(c);
    else if (command == "prove") cmd_prove(c);
    else if (command == "consistent") cmd_consistent(c);
    else if (command == "refute") cmd_refute(c);
    else if (command == "model-check") cmd_model_check(c);
    else throw Error(ErrorCode::InvalidArgument, "unknown command " + command);
  } catch (const Error& e) {
    c.verdict = e.code() == ErrorCode::OracleFailure ? "oracle-failure" : "input-error";
    error = std::string(error_code_name(e.code())) + ": " + e.what();
  } catch (const std::exception& e) {
    c.verdict = "input-error";
    error = e.what();
  }
  CommandResult r;
  r.verdict = c.verdict;
  r.exit_code = exit_code_for(command, c.verdict);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  json doc = {{"schema", kSchema}, {"command", command}, {"verdict", r.verdict}, {"exit_code", r.exit_code},
              {"seconds", secs},   {"seed", config.seed}, {"data", c.data}};
  if (!error.empty()) doc["error"] = error;
  r.json = doc.dump(2) + "\n";
  r.text = error.empty() ? c.text.str() : "error: " + error + "\n";
  return r;
}

}  // namespace lcre
