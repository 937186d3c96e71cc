#include <random>

#include "doctest.h"
#include "lcre/model.hpp"
#include "lcre/validity.hpp"

using namespace lcre;

namespace {

struct Lia {
  ModelRef m = UnderlyingModel::lia();
  Sort I = int_sort();
  Term x = Term::var({"x", int_sort()});
  Term y = Term::var({"y", int_sort()});
  Term n = Term::var({"n", int_sort()});
  Term num(long v) const { return Term::integer(v); }
  Term op(const std::string& f, Term a, Term b) const {
    return Term::app(m->symbol(f, {a.sort(), b.sort()}), {a, b});
  }
  Term neg(Term a) const { return Term::app(m->symbol("-", {I}), {a}); }
};

Term random_ground(std::mt19937& rng, const UnderlyingModel& m, int depth) {
  Sort I = int_sort();
  if (depth == 0 || rng() % 3 == 0) {
    int bound = m.kind() == UnderlyingModel::Kind::IntMod ? m.modulus() : 20;
    int v = static_cast<int>(rng() % bound);
    if (m.kind() == UnderlyingModel::Kind::Lia) v -= 10;
    return Term::integer(v);
  }
  static const char* ops[] = {"+", "-", "*", "mod", "div"};
  int limit = m.kind() == UnderlyingModel::Kind::Lia ? 5 : 3;
  std::string f = ops[rng() % limit];
  return Term::app(m.symbol(f, {I, I}), {random_ground(rng, m, depth - 1), random_ground(rng, m, depth - 1)});
}

}  // namespace

TEST_CASE("interpretation examples") {
  Lia L;
  CHECK(interpret(*L.m, L.op("+", L.num(7), L.num(31))) == int_value(38));
  CHECK(interpret(*L.m, L.num(38)) == int_value(38));
  CHECK(interpret(*L.m, L.op("+", L.num(1), L.num(-1))) == int_value(0));
  CHECK_THROWS_AS(interpret(*L.m, L.x), Error);
}

TEST_CASE("euclidean mod/div and totalization") {
  Lia L;
  CHECK(interpret(*L.m, L.op("mod", L.num(-7), L.num(3))) == int_value(2));
  CHECK(interpret(*L.m, L.op("div", L.num(-7), L.num(3))) == int_value(-3));
  CHECK(interpret(*L.m, L.op("mod", L.num(7), L.num(-3))) == int_value(1));
  CHECK(interpret(*L.m, L.op("div", L.num(7), L.num(-3))) == int_value(-2));
  CHECK(interpret(*L.m, L.op("div", L.num(5), L.num(0))) == int_value(0));
  CHECK(interpret(*L.m, L.op("mod", L.num(5), L.num(0))) == int_value(5));
}

TEST_CASE("calc candidates and normalization") {
  Lia L;
  Term t = L.op("+", L.op("+", L.num(1), L.num(2)), L.op("+", L.num(3), L.num(4)));
  auto c = calc_step_candidates(*L.m, t);
  REQUIRE(c.size() == 2);
  CHECK(c[0].pos == Position{{1}});
  CHECK(c[1].pos == Position{{2}});
  CHECK(calc_normalize(*L.m, t) == L.num(10));
  Term open = L.op("+", L.x, L.y);
  CHECK(calc_normalize(*L.m, open) == open);
  CHECK(calc_step_candidates(*L.m, L.num(38)).empty());
}

TEST_CASE("constraint evaluation") {
  Lia L;
  Term phi = L.op("=", L.op("mod", L.num(38), L.num(12)), L.op("mod", L.num(14), L.num(12)));
  CHECK(eval_constraint(*L.m, phi));
  CHECK_FALSE(eval_constraint(*L.m, L.op("=", L.num(1), L.num(0))));
  Term c = L.op("and", L.op("=", L.op("+", L.num(2), L.num(2)), L.num(4)),
                L.m->mk_not(L.op("<", L.num(1), L.num(0))));
  CHECK(eval_constraint(*L.m, c));
}

TEST_CASE("validity examples") {
  Lia L;
  ValidityOracle o(L.m);
  CHECK(o.check_validity(L.op("or", L.op(">=", L.x, L.num(0)), L.op("<", L.x, L.num(0)))).is_valid());
  Verdict v = o.check_validity(L.op(">=", L.x, L.num(0)));
  REQUIRE(v.is_invalid());
  CHECK(v.witness.image({"x", int_sort()}) == L.num(-1));
  CHECK(o.check_validity(L.op("=", L.op("-", L.op("+", L.n, L.num(1)), L.num(1)), L.n)).is_valid());
  // mod with constant divisor
  CHECK(o.check_validity(L.op("<", L.op("mod", L.x, L.num(12)), L.num(12))).is_valid());
  CHECK(o.check_validity(L.op("=>", L.op("=", L.x, L.op("*", L.num(2), L.y)),
                              L.op("=", L.op("mod", L.x, L.num(2)), L.num(0))))
            .is_valid());
  // x*y = y*x is handled by monomial normalization
  CHECK(o.check_validity(L.op("=", L.op("*", L.x, L.y), L.op("*", L.y, L.x))).is_valid());
  // out of reach of both the prover and the box: Unknown
  ValidityOracle small(L.m, OracleConfig{2, 1000, false, "", 1000});
  CHECK(small.check_validity(L.op("<", L.x, L.num(100))).is_unknown());
}

TEST_CASE("enumerate_satisfying box order") {
  Lia L;
  Variable x{"x", int_sort()};
  auto s = satisfying_list(*L.m, {x}, L.op(">=", L.x, L.num(0)), 3);
  REQUIRE(s.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(s[i].image(x) == L.num(i));
  auto one = satisfying_list(*L.m, {x}, L.op("=", L.x, L.num(1)), 8);
  REQUIRE(one.size() == 1);
  auto empty = satisfying_list(*L.m, {}, Term::boolean(true), 8);
  REQUIRE(empty.size() == 1);
  CHECK(empty[0].empty());
}

TEST_CASE("property: calculation steps agree with interpretation and are confluent") {
  std::mt19937 rng(7);
  for (auto m : {UnderlyingModel::lia(), UnderlyingModel::int_mod(5)}) {
    for (int i = 0; i < 200; ++i) {
      Term t = random_ground(rng, *m, 5);
      Value expected = interpret(*m, t);
      // random redex selection order
      Term cur = t;
      while (true) {
        auto c = calc_step_candidates(*m, cur);
        if (c.empty()) break;
        cur = c[rng() % c.size()].result;
      }
      REQUIRE(cur.is_value());
      CHECK(cur.value() == expected);
      CHECK(calc_normalize(*m, t) == cur);
      CHECK(calc_normalize(*m, cur) == cur);
      auto seq = calc_sequence(*m, t);
      if (!seq.empty()) CHECK(seq.back().result == cur);
    }
  }
}

TEST_CASE("property: exhaustive backend is a decision procedure on finite models") {
  auto m = UnderlyingModel::int_mod(3);
  ValidityOracle o(m);
  Sort I = int_sort();
  Term x = Term::var({"x", I});
  Term y = Term::var({"y", I});
  std::mt19937 rng(11);
  std::vector<std::string> rels = {"=", "<", "<=", ">", ">="};
  auto atom = [&]() {
    Term a = (rng() % 2) ? x : Term::integer(rng() % 3);
    Term b = (rng() % 2) ? y : Term::app(m->symbol("+", {I, I}), {x, Term::integer(rng() % 3)});
    return Term::app(m->symbol(rels[rng() % rels.size()], {I, I}), {a, b});
  };
  for (int i = 0; i < 150; ++i) {
    Term phi = (rng() % 2) ? m->mk_or(atom(), atom()) : m->mk_implies(atom(), atom());
    Verdict v = o.check_validity(phi);
    Verdict nv = o.check_validity(m->mk_not(phi));
    CHECK_FALSE(v.is_unknown());
    CHECK_FALSE((v.is_valid() && nv.is_valid()));
    bool none = satisfying_list(*m, vars_of(phi), m->mk_not(phi), 0, 1).empty();
    CHECK(v.is_valid() == none);
    if (v.is_invalid()) CHECK_FALSE(eval_constraint(*m, apply_subst(v.witness, phi)));
  }
}

TEST_CASE("property: linear prover never claims an invalid formula") {
  Lia L;
  ValidityOracle o(L.m, OracleConfig{12, 100000, false, "", 1000});
  std::mt19937 rng(3);
  std::vector<std::string> rels = {"=", "<", "<=", ">", ">="};
  auto lin = [&]() {
    Term t = L.num(static_cast<long>(rng() % 7) - 3);
    if (rng() % 2) t = L.op("+", t, L.op("*", L.num(static_cast<long>(rng() % 5) - 2), L.x));
    if (rng() % 2) t = L.op("-", t, L.op("*", L.num(static_cast<long>(rng() % 5) - 2), L.y));
    if (rng() % 4 == 0) t = L.op("mod", t, L.num(static_cast<long>(rng() % 3) + 2));
    return t;
  };
  auto atom = [&]() { return L.op(rels[rng() % rels.size()], lin(), lin()); };
  int proved = 0;
  for (int i = 0; i < 300; ++i) {
    Term phi = (rng() % 2) ? L.m->mk_or(atom(), atom()) : L.m->mk_implies(atom(), atom());
    if (linear_prove_valid(*L.m, phi)) {
      ++proved;
      // the box search must not find a counterexample
      CHECK_FALSE(o.check_validity(phi).is_invalid());
    }
  }
  CHECK(proved > 5);
}
