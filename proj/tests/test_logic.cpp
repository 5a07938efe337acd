#include <doctest.h>

#include <random>

#include "eoilp/logic.hpp"
#include "oracles.hpp"

using namespace eoilp::logic;

namespace {

Wcdpi example(FactSet ctx, FactSet inc, FactSet exc = {}) {
  Wcdpi e;
  e.ctx.facts = std::move(ctx);
  e.pi.inc = std::move(inc);
  e.pi.exc = std::move(exc);
  return e;
}

std::vector<NormalRule> rules_of(std::string_view text) {
  std::vector<NormalRule> out;
  for (auto& r : parse_program(text)) out.push_back(std::move(r.rule));
  return out;
}

}  // namespace

TEST_CASE("evaluate computes the least model of stratified programs") {
  const FactSet ab{Atom("a"), Atom("b")};
  CHECK(evaluate({}, ab) == ab);

  const auto p = rules_of("h :- a, not c.");
  CHECK(evaluate(p, FactSet{Atom("a")}) == FactSet{Atom("a"), Atom("h")});
  CHECK(evaluate(p, FactSet{Atom("a"), Atom("c")}) == FactSet{Atom("a"), Atom("c")});

  // Negation reads a stratum that is itself derived.
  const auto q = rules_of("c :- b. h :- a, not c.");
  CHECK(evaluate(q, FactSet{Atom("a"), Atom("b")}) == FactSet{Atom("a"), Atom("b"), Atom("c")});
}

TEST_CASE("evaluate rejects cycles through negation") {
  const auto p = rules_of("a :- not b. b :- not a.");
  CHECK_THROWS_AS(evaluate(p, FactSet{}), StratificationError);
  try {
    evaluate(p, FactSet{});
  } catch (const StratificationError& e) {
    CHECK(e.cycle().size() >= 2);
  }
}

TEST_CASE("extends checks inclusions and exclusions") {
  CHECK(extends(FactSet{Atom("f")}, {FactSet{Atom("f")}, FactSet{Atom("g")}}));
  CHECK_FALSE(extends(FactSet{Atom("f"), Atom("g")}, {FactSet{Atom("f")}, FactSet{Atom("g")}}));
  CHECK(extends(FactSet{}, {}));
}

TEST_CASE("accepts uses the context") {
  CHECK(accepts(rules_of("h :- a."), example({Atom("a")}, {Atom("h")})));
  CHECK_FALSE(accepts({}, example({Atom("a")}, {Atom("h")})));
}

TEST_CASE("comparisons bind captured integers") {
  const auto p = rules_of("h :- a(V), V >= 5.");
  CHECK(accepts(p, example({Atom("a", {Term::integer(7)})}, {Atom("h")})));
  CHECK_FALSE(accepts(p, example({Atom("a", {Term::integer(4)})}, {Atom("h")})));
  // A symbol in the captured slot never satisfies a comparison.
  CHECK_FALSE(accepts(p, example({Atom("a", {Term::symbol("low")})}, {Atom("h")})));
  const auto both = rules_of("h :- a(V), V >= 5, V <= 6.");
  CHECK(accepts(both, example({Atom("a", {Term::integer(4)}), Atom("a", {Term::integer(6)})}, {Atom("h")})));
}

TEST_CASE("unsafe rules are rejected") {
  CHECK_FALSE(is_safe(parse_rule("h(X) :- a.").rule));
  CHECK_FALSE(is_safe(parse_rule("h :- not a(X).").rule));
  CHECK_FALSE(is_safe(parse_rule("h :- a, X >= 3.").rule));
  CHECK(is_safe(parse_rule("h(X) :- a(X), X <= 2.").rule));
  CHECK_THROWS_AS(check_safety(parse_rule("h(X) :- a.").rule), UnsafeRuleError);
}

TEST_CASE("rule text round-trips") {
  const std::string text = "0.7: failure(source,missingEthylene) :- m1_pv_up(T), T >= 3, not unchanged(m2_pv).";
  const auto r = parse_rule(text);
  REQUIRE(r.phi);
  CHECK(*r.phi == doctest::Approx(0.7));
  CHECK(to_string(r) == text);
  CHECK(to_string(parse_rule(to_string(r))) == text);
  CHECK(to_string(parse_rule("f.")) == "f.");
  CHECK(parse_program("% comment\n a :- b.\n\n c.").size() == 2);
  CHECK_THROWS_AS(parse_rule("a :- "), ParseError);
  CHECK_THROWS_AS(parse_program("a.\nb :- c,"), ParseError);
}

TEST_CASE("accepts agrees with brute-force answer sets on random programs") {
  std::mt19937_64 rng(20240611);
  for (int trial = 0; trial < 300; ++trial) {
    const auto p = oracle::random_stratified_program(rng, 10);
    const auto sets = oracle::answer_sets(p.rules, p.facts, p.n_atoms);
    REQUIRE(sets.size() == 1);
    FactSet model;
    for (const auto& a : sets.front()) model.insert(a);
    CHECK(evaluate(p.rules, p.facts) == model);
    Wcdpi e;
    e.ctx.facts = p.facts;
    e.pi = p.pi;
    CHECK(accepts(p.rules, e) == extends(model, p.pi));
  }
}
