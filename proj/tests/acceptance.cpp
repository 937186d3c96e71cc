// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "lcre/algebra.hpp"
#include "lcre/cli.hpp"
#include "lcre/proof.hpp"
#include "lcre/syntax.hpp"
#include "suites/suites.hpp"

using namespace lcre;
using nlohmann::json;

namespace {

std::string fx(const std::string& name) { return std::string(LCRE_FIXTURES) + "/" + name; }

double since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream note;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) note << "failed: " << what << "; ";
    pass = pass && ok;
  }
};

json run(const std::string& cmd, CommandArgs a, RunConfig c = {}) {
  return json::parse(run_command(c, cmd, a).json);
}

void c1(Outcome& o) {
  auto t0 = std::chrono::steady_clock::now();
  CommandArgs a;
  a.theory = fx("mod12.th");
  a.lhs = "cong(+(7, 31))";
  a.rhs = "cong(14)";
  RunConfig c;
  c.bound = 3;
  json r = run("convert", a, c);
  double s = since(t0);
  o.require(r["exit_code"] == 0, "convert exit 0");
  o.require(r["data"]["trace"]["length"] == 2, "trace of 2 steps");
  o.require(s < 1.0, "under 1 s");
  o.note << "2 steps in " << s << " s";
}

void c2(Outcome& o) {
  auto t0 = std::chrono::steady_clock::now();
  CommandArgs a;
  a.theory = fx("group.th");
  a.lhs = "exp(x, -1)";
  a.rhs = "inv(x)";
  RunConfig c;
  c.bound = 12;
  json r = run("convert", a, c);
  double s = since(t0);
  o.require(r["exit_code"] == 0, "convert exit 0");
  o.require(s < 30.0, "under 30 s");
  if (r["exit_code"] == 0) o.note << r["data"]["trace"]["rule_steps"].get<int>() << " rule steps in " << s << " s";
}

void c3(Outcome& o) {
  RunConfig c;
  c.bound = 8;
  c.box = 5;
  CommandArgs a;
  a.theory = fx("absmax.th");
  for (const char* g : {"abs-neg", "max-comm", "abs-max"}) {
    a.goal = g;
    json r = run("validate", a, c);
    o.require(r["verdict"] == "ConfirmedOnSamples", std::string(g) + " confirmed");
    o.note << g << ": " << r["data"]["samples"].get<int>() << " samples; ";
  }
  a.goal = "abs-neg-open";
  json r = run("validate", a, c);
  o.require(r["verdict"] == "NoConversionWithinBound", "open variant has no conversion");
  if (r["data"].contains("sample")) o.note << "open variant fails at " << r["data"]["sample"].get<std::string>();
}

void c4(Outcome& o) {
  auto proof_file = (std::filesystem::temp_directory_path() / "lcre_acceptance_nneg.prf").string();
  CETheory th = load_theory(fx("nneg.th"));
  for (int n = 0; n <= 20; ++n) {
    CommandArgs a;
    a.theory = fx("nneg.th");
    a.lhs = "nneg(" + std::to_string(n) + ")";
    a.rhs = "true";
    a.output = proof_file;
    json p = run("prove", a);
    if (p["exit_code"] != 0) {
      o.require(false, "prove nneg(" + std::to_string(n) + ")");
      continue;
    }
    CommandArgs k;
    k.theory = a.theory;
    k.proof = proof_file;
    o.require(run("check", k)["exit_code"] == 0, "check nneg(" + std::to_string(n) + ")");
    Derivation d = load_proof(proof_file, th);
    o.require(d.count(ProofRule::Trans) == static_cast<std::size_t>(n), "n Trans steps");
    o.require(d.count(ProofRule::TheoryInstance) == static_cast<std::size_t>(n + 1), "n + 1 instance steps");
  }
  CommandArgs all;
  all.theory = fx("nneg.th");
  all.goal = "nneg-all";
  o.require(run("prove", all)["exit_code"] == 2, "parameterized goal exits 2");
  o.note << "n = 0..20 proved and checked; nneg-all unproved";
}

void suite(Outcome& o, const suites::SuiteResult& r, int min_cases, double max_seconds = 1e9) {
  o.require(r.ok(min_cases), "suite");
  o.require(r.seconds < max_seconds, "time limit");
  o.note << r.summary();
}

void c7(Outcome& o) {
  int n = 0;
  std::set<ProofRule> roots;
  for (const auto& e : std::filesystem::directory_iterator(fx("mutants"))) {
    std::string text = read_file(e.path().string());
    auto field = [&](const std::string& key) {
      auto at = text.find("; " + key + ":");
      auto end = text.find('\n', at);
      std::string v = text.substr(at + key.size() + 3, end - at - key.size() - 3);
      v.erase(0, v.find_first_not_of(' '));
      return v;
    };
    CommandArgs a;
    a.theory = fx(field("theory"));
    a.proof = e.path().string();
    json r = run("check", a);
    o.require(r["verdict"] == "Rejected", e.path().filename().string() + " rejected");
    o.require(r["data"].value("error", "") == field("expect"), e.path().filename().string() + " code");
    roots.insert(parse_proof(text, load_theory(a.theory)).rule);
    ++n;
  }
  o.require(n == 12 && roots.size() == 12, "one mutant per rule");
  o.note << n << " mutants rejected, " << roots.size() << " distinct root rules";
}

void c8(Outcome& o) {
  CommandArgs a;
  a.theory = fx("inconsistent.th");
  RunConfig c2;
  c2.depth = 2;
  json r = run("consistent", a, c2);
  o.require(r["verdict"] == "InconsistentWitness", "witness");
  o.require(r["data"]["u"] == "0" && r["data"]["v"] == "1", "values 0 and 1");
  o.require(r["data"]["trace"]["length"] == 2, "trace of length 2");
  RunConfig c8;
  c8.depth = 8;
  for (const char* t : {"empty.th", "group.th"}) {
    a.theory = fx(t);
    o.require(run("consistent", a, c8)["verdict"] == "ConsistentUpTo", std::string(t) + " consistent");
  }
  o.note << "witness 0 <-> 1 in 2 steps; empty and group ConsistentUpTo(8)";
}

void c9(Outcome& o) {
  auto t0 = std::chrono::steady_clock::now();
  CommandArgs a;
  a.theory = fx("boolfg.th");
  a.goal = "gf";
  RunConfig c;
  c.extra = 1;
  json r = run("refute", a, c);
  o.require(r["verdict"] == "counter-model", "counter-model found");
  a.algebra = fx("boolfg.alg");
  json m = run("model-check", a);
  o.require(m["verdict"] == "model", "shipped algebra is a model");
  o.require(m["data"].value("refutes", false), "shipped algebra refutes the goal");
  double s = since(t0);
  o.require(s < 10.0, "under 10 s");
  o.note << "refuted at " << r["data"].value("valuation", "?") << " in " << s << " s";
}

void c10(Outcome& o, std::uint32_t seed) {
  using F = std::function<suites::SuiteResult(std::uint32_t, int)>;
  const std::pair<const char*, F> all[] = {{"congruence", suites::congruence_suite},
                                           {"stability", suites::stability_suite},
                                           {"general stability", suites::general_stability_suite},
                                           {"model consequence", suites::model_consequence_suite},
                                           {"symmetry/closure", suites::symmetry_closure_suite}};
  for (const auto& [name, f] : all) {
    auto r = f(seed, 100);
    o.require(r.ok(100), name);
    o.note << name << " " << r.cases << "/" << r.violations << "; ";
  }
}

}  // namespace

int main() {
  std::uint32_t seed = suites::seed_from_env();
  std::cout << "seed " << seed << "\n";
  const std::pair<const char*, std::function<void(Outcome&)>> criteria[] = {
      {"modular conversion", c1},
      {"group conversion", c2},
      {"validity sampling", c3},
      {"nneg family", c4},
      {"checker soundness", [&](Outcome& o) { suite(o, suites::soundness_suite(seed, 200), 200); }},
      {"calculation completeness", [&](Outcome& o) { suite(o, suites::calc_completeness_suite(seed, 100), 100, 60); }},
      {"mutation rejection", c7},
      {"value consistency", c8},
      {"counter-model", c9},
      {"lemma suites", [&](Outcome& o) { c10(o, seed); }},
      {"no contradiction", [&](Outcome& o) { suite(o, suites::contradiction_suite(seed, 50), 50); }},
  };
  int failed = 0;
  int i = 0;
  for (const auto& [name, f] : criteria) {
    ++i;
    Outcome o;
    try {
      f(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception ") + e.what());
    }
    failed += !o.pass;
    std::cout << "criterion " << i << " [" << name << "]: " << (o.pass ? "PASS" : "FAIL") << " (" << o.note.str()
              << ")" << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria pass")) << "\n";
  return failed ? 1 : 0;
}
