#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lcre/algebra.hpp"
#include "lcre/cli.hpp"
#include "lcre/error.hpp"
#include "lcre/proof.hpp"
#include "lcre/syntax.hpp"

namespace py = pybind11;
using namespace lcre;

namespace {

CommandArgs args_from(const py::kwargs& kw, RunConfig& cfg) {
  CommandArgs a;
  for (auto [k, v] : kw) {
    auto key = k.cast<std::string>();
    if (key == "goal") a.goal = v.cast<std::string>();
    else if (key == "lhs") a.lhs = v.cast<std::string>();
    else if (key == "rhs") a.rhs = v.cast<std::string>();
    else if (key == "vars") a.vars = v.cast<std::string>();
    else if (key == "constraint") a.constraint = v.cast<std::string>();
    else if (key == "term") a.term = v.cast<std::string>();
    else if (key == "strategy") a.strategy = v.cast<std::string>();
    else if (key == "steps") a.steps = v.cast<int>();
    else if (key == "proof") a.proof = v.cast<std::string>();
    else if (key == "algebra") a.algebra = v.cast<std::string>();
    else if (key == "output") a.output = v.cast<std::string>();
    else if (key == "bound") cfg.bound = v.cast<int>();
    else if (key == "box") cfg.box = v.cast<int>();
    else if (key == "pool") cfg.pool = v.cast<int>();
    else if (key == "depth") cfg.depth = v.cast<int>();
    else if (key == "extra") cfg.extra = v.cast<int>();
    else if (key == "term_size") cfg.term_size = v.cast<int>();
    else if (key == "solver") cfg.solver = v.cast<std::string>();
    else if (key == "timeout_ms") cfg.timeout_ms = v.cast<int>();
    else if (key == "seed") cfg.seed = v.cast<std::uint32_t>();
    else throw py::type_error("unknown option: " + key);
  }
  return a;
}

}  // namespace

PYBIND11_MODULE(_lcre, m) {
  m.doc() = "Constrained equational reasoning over LCTRS theories";

  // Parse failures surface as ParseError whichever layer raised them.
  static py::exception<Error> parse_exc(m, "ParseError", PyExc_ValueError);
  static py::exception<Error> lcre_exc(m, "LcreError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ParseError) parse_exc(e.what());
      else lcre_exc(e.what());
    }
  });

  py::class_<CETheory>(m, "Theory")
      .def_static("parse", &parse_theory, py::arg("text"))
      .def_static("load", &load_theory, py::arg("path"))
      .def("__str__", [](const CETheory& th) { return print_theory(th); })
      .def_property_readonly("goals",
                             [](const CETheory& th) {
                               std::vector<std::string> names;
                               for (const auto& g : th.goals) names.push_back(g.name);
                               return names;
                             })
      .def_property_readonly("equations", [](const CETheory& th) {
        std::vector<std::string> out;
        for (const auto& e : th.equations) out.push_back(e.to_string());
        return out;
      });

  m.def(
      "check_proof",
      [](const CETheory& th, const std::string& text) {
        Derivation d = parse_proof(text, th);
        ValidityOracle oracle(th.model);
        CheckReport r = check_proof(th, d, oracle);
        return py::make_tuple(r.accepted(), r.to_string());
      },
      py::arg("theory"), py::arg("proof_text"),
      "Returns (accepted, report).");

  m.def(
      "consistency",
      [](const CETheory& th, int depth) { return check_value_consistency(th, depth).to_string(); },
      py::arg("theory"), py::arg("depth") = 8);

  m.def(
      "refute",
      [](const CETheory& th, const std::string& goal, int extra) -> std::optional<std::string> {
        const NamedGoal* g = th.find_goal(goal);
        if (!g) throw Error(ErrorCode::InvalidArgument, "no goal named " + goal);
        CounterModelOptions opt;
        opt.max_extra = extra;
        auto res = search_counter_model(th, g->ce, opt);
        if (!res.algebra) return std::nullopt;
        return print_algebra(*res.algebra);
      },
      py::arg("theory"), py::arg("goal"), py::arg("extra") = 1,
      "Printed counter-model algebra, or None.");

  m.def(
      "run",
      [](const std::string& command, const std::string& theory, const py::kwargs& kw) {
        RunConfig cfg;
        CommandArgs a = args_from(kw, cfg);
        a.theory = theory;
        CommandResult r;
        {
          py::gil_scoped_release release;
          r = run_command(cfg, command, a);
        }
        return py::make_tuple(r.exit_code, r.verdict, r.json);
      },
      py::arg("command"), py::arg("theory"),
      "Runs a CLI command; returns (exit_code, verdict, json_report).");
}
