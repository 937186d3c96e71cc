#include "lcre/validity.hpp"

#include "smt_session.hpp"

namespace lcre {

std::string Verdict::to_string() const {
  switch (kind) {
    case Kind::Valid: return "Valid";
    case Kind::Invalid: return "Invalid(" + witness.to_string() + ")";
    case Kind::Unknown: return "Unknown(" + reason + ")";
  }
  return "";
}

ValidityOracle::ValidityOracle(ModelRef model, OracleConfig config)
    : model_(std::move(model)), config_(std::move(config)) {}

ValidityOracle::~ValidityOracle() = default;

Verdict ValidityOracle::check_validity(const Term& phi) {
  if (!(phi.sort() == bool_sort()))
    throw Error(ErrorCode::SortMismatch, "constraint " + phi.to_string() + " is not of sort Bool");
  if (!phi.is_theory_term())
    throw Error(ErrorCode::NonTheorySymbol, "constraint " + phi.to_string() + " is not a theory term");
  std::lock_guard<std::mutex> lock(mu_);
  auto it = cache_.find(phi);
  if (it != cache_.end()) return it->second;
  Verdict v = decide(phi);
  if (v.is_invalid() && eval_constraint(*model_, apply_subst(v.witness, phi)))
    throw Error(ErrorCode::OracleFailure, "witness does not refute " + phi.to_string());
  cache_.emplace(phi, v);
  return v;
}

Verdict ValidityOracle::decide(const Term& phi) {
  const UnderlyingModel& m = *model_;
  Term body = calc_normalize(m, phi);
  if (body.is_value()) return body.value().as_bool() ? Verdict::valid() : Verdict::invalid({});
  VarSet vars = vars_of(body);
  bool finite = true;
  for (const auto& v : vars) finite = finite && m.is_finite(v.sort);
  if (finite) {
    std::optional<Substitution> cex;
    enumerate_satisfying(m, vars, m.mk_not(body), 0, [&](const Substitution& s) {
      cex = s;
      return false;
    });
    return cex ? Verdict::invalid(*cex) : Verdict::valid();
  }
  if (config_.linear_prover && linear_prove_valid(m, body)) return Verdict::valid();
  Verdict b = bounded_refutation(body, vars);
  if (!b.is_unknown()) return b;
  if (!config_.solver.empty()) {
    if (!session_) session_ = std::make_unique<SolverSession>(config_.solver, config_.timeout_ms);
    Verdict s = session_->check_validity(m, body);
    if (!s.is_unknown()) return s;
    return Verdict::unknown(b.reason + "; " + s.reason);
  }
  return b;
}

Verdict ValidityOracle::bounded_refutation(const Term& phi, const VarSet& vars) {
  const UnderlyingModel& m = *model_;
  std::vector<Variable> fin;
  std::vector<Variable> ints;
  for (const auto& v : vars) (m.is_finite(v.sort) ? fin : ints).push_back(v);
  std::vector<std::vector<Value>> fin_dom;
  for (const auto& v : fin) fin_dom.push_back(m.carrier(v.sort));
  // value order 0, 1, -1, 2, -2, ...
  auto nth_value = [](long i) -> long { return (i % 2 == 1) ? (i + 1) / 2 : -(i / 2); };
  std::size_t evaluations = 0;
  const long max_index = 2L * config_.box;
  const std::size_t k = ints.size();
  std::optional<Substitution> found;

  auto try_tuple = [&](const std::vector<long>& idx) {
    Substitution base;
    for (std::size_t i = 0; i < k; ++i) base.bind(ints[i], Term::integer(nth_value(idx[i])));
    std::vector<std::size_t> f(fin.size(), 0);
    while (true) {
      Substitution s = base;
      for (std::size_t i = 0; i < fin.size(); ++i) s.bind(fin[i], Term::val(fin_dom[i][f[i]]));
      ++evaluations;
      if (!eval_constraint(m, apply_subst(s, phi))) {
        found = s;
        return;
      }
      std::size_t i = fin.size();
      bool carry = true;
      while (carry && i > 0) {
        --i;
        if (++f[i] < fin_dom[i].size()) carry = false;
        else f[i] = 0;
      }
      if (carry) return;
    }
  };

  for (long shell = 0; shell <= max_index && !found; ++shell) {
    if (k == 0) {
      try_tuple({});
      break;
    }
    // tuples with max index == shell; j is the first coordinate equal to shell
    for (std::size_t j = 0; j < k && !found; ++j) {
      std::vector<long> idx(k, 0);
      idx[j] = shell;
      while (!found) {
        try_tuple(idx);
        if (found || evaluations >= config_.max_samples) break;
        std::size_t i = k;
        bool carry = true;
        while (carry && i > 0) {
          --i;
          if (i == j) continue;
          long limit = i < j ? shell - 1 : shell;
          if (++idx[i] <= limit) carry = false;
          else idx[i] = 0;
        }
        if (carry) break;
        if (j > 0 && shell == 0) break;
      }
      if (shell == 0) break;
    }
    if (evaluations >= config_.max_samples) break;
  }
  if (found) return Verdict::invalid(*found);
  return Verdict::unknown("no counterexample in [-" + std::to_string(config_.box) + ", " +
                          std::to_string(config_.box) + "]");
}

}  // namespace lcre
