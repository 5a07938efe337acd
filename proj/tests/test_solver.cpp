#include <doctest.h>

#include <cmath>
#include <random>

#include "eoilp/solver.hpp"
#include "oracles.hpp"

using namespace eoilp;
using eoilp::logic::Atom;
using eoilp::logic::FactSet;

namespace {

hyp::ScoredRule scored(const std::string& text) {
  const auto pr = logic::parse_rule(text);
  return {pr.rule, pr.phi.value_or(1.0), hyp::prior(pr.rule), hyp::rule_cost(pr.rule)};
}

logic::Context ctx(FactSet f) { return {std::move(f), {}}; }

logic::Wcdpi labelled(const std::string& id, FactSet facts, const Atom& ev, bool positive, int penalty = 100) {
  logic::Wcdpi w;
  w.id = id;
  w.penalty = penalty;
  w.ctx.facts = std::move(facts);
  (positive ? w.pi.inc : w.pi.exc).insert(ev);
  return w;
}

solver::DisplasTask ab_task() {
  solver::DisplasTask t;
  t.bias.heads.push_back({Atom("ev")});
  for (const char* n : {"a", "b"}) {
    hyp::BodyDecl d;
    d.atom = Atom(n);
    t.bias.bodies.push_back(d);
  }
  return t;
}

}  // namespace

TEST_CASE("predicted probability takes the largest firing phi") {
  const Atom ev("ev");
  auto h = oracle::make_hypothesis({scored("0.7: ev :- a.")});
  CHECK(solver::predicted_probability(h, {}, ctx({Atom("a")}), ev) == doctest::Approx(0.7));
  h = oracle::make_hypothesis({scored("0.4: ev :- a."), scored("0.7: ev :- b.")});
  CHECK(solver::predicted_probability(h, {}, ctx({Atom("a"), Atom("b")}), ev) == doctest::Approx(0.7));
  CHECK(solver::predicted_probability(oracle::make_hypothesis({}), {}, ctx({Atom("z")}), ev) ==
        doctest::Approx(solver::kEpsilon));
}

TEST_CASE("log posterior") {
  const Atom ev("ev");
  auto t = ab_task();
  t.positives.push_back(labelled("p1", {Atom("a")}, ev, true));
  auto s = solver::log_posterior(oracle::make_hypothesis({}), t, ev);
  CHECK(s.log_likelihood == doctest::Approx(std::log(0.05)));
  CHECK(s.log_prior_odds == 0.0);

  t.positives.push_back(labelled("p2", {Atom("a")}, ev, true));
  t.positives.push_back(labelled("p3", {Atom("a"), Atom("b")}, ev, true));
  const auto one = oracle::make_hypothesis({scored("1: ev :- a.")});
  s = solver::log_posterior(one, t, ev);
  CHECK(s.log_likelihood == doctest::Approx(3 * std::log(0.95)));
  const double p = hyp::prior(logic::parse_rule("ev :- a.").rule);
  CHECK(s.log_prior_odds == doctest::Approx(std::log(p / (1 - p))));
  CHECK(s.total == doctest::Approx(s.log_likelihood + s.log_prior_odds));

  // A penalty-225 example weighs 2.25 times a penalty-100 one.
  solver::DisplasTask w100 = ab_task(), w225 = ab_task();
  w100.positives.push_back(labelled("n", {Atom("b")}, ev, false, 100));
  w225.positives.push_back(labelled("n", {Atom("b")}, ev, false, 225));
  const auto fires = oracle::make_hypothesis({scored("0.6: ev :- b.")});
  CHECK(solver::log_posterior(fires, w225, ev).log_likelihood ==
        doctest::Approx(2.25 * solver::log_posterior(fires, w100, ev).log_likelihood));
}

TEST_CASE("a separating rule is found at phi 1") {
  const Atom ev("ev");
  auto t = ab_task();
  for (int i = 0; i < 6; ++i) t.positives.push_back(labelled("p" + std::to_string(i), {Atom("a")}, ev, true));
  for (int i = 0; i < 6; ++i) t.positives.push_back(labelled("n" + std::to_string(i), {Atom("b")}, ev, false));
  const auto h = solver::solve_event(t, ev);
  REQUIRE(h.rules.size() == 1);
  CHECK(logic::to_string(h.rules[0].as_prob_rule()) == "1: ev :- a.");
  CHECK(solver::log_posterior(h, t, ev).total ==
        doctest::Approx(oracle::exhaustive_two_rule_optimum(t, ev, {})));
}

TEST_CASE("indistinguishable examples give a bodiless rule near one half") {
  const Atom ev("ev");
  auto t = ab_task();
  for (int i = 0; i < 20; ++i) t.positives.push_back(labelled("p" + std::to_string(i), {Atom("a")}, ev, i % 2 == 0));
  const auto h = solver::solve_event(t, ev);
  REQUIRE(h.rules.size() == 1);
  CHECK(h.rules[0].rule.body.empty());
  CHECK(h.rules[0].phi == doctest::Approx(0.5));
}

TEST_CASE("events without evidence and tasks without events") {
  const Atom ev("ev");
  auto t = ab_task();
  t.positives.push_back(labelled("p", {Atom("a")}, Atom("other"), true));
  CHECK(solver::solve_event(t, ev).rules.empty());

  solver::DisplasTask none;
  CHECK(solver::solve(none).rules.empty());
}

TEST_CASE("independent events each get their separating rule") {
  solver::DisplasTask t = ab_task();
  t.bias.heads.push_back({Atom("ev2")});
  const Atom e1("ev"), e2("ev2");
  for (int i = 0; i < 8; ++i) {
    const bool a = i % 2 == 0;
    logic::Wcdpi w;
    w.id = "x" + std::to_string(i);
    w.ctx.facts.insert(Atom(a ? "a" : "b"));
    w.pi.inc.insert(a ? e1 : e2);
    w.pi.exc.insert(a ? e2 : e1);
    t.positives.push_back(w);
  }
  const auto h = solver::solve(t);
  CHECK(h.rules.size() == 2);
  CHECK(solver::format_hypothesis(h) == "1: ev :- a.\n1: ev2 :- b.\n");
  const auto back = solver::parse_hypothesis(solver::format_hypothesis(h));
  CHECK(solver::format_hypothesis(back) == solver::format_hypothesis(h));

  const auto pr = solver::predict(h, t, ctx({Atom("a")}));
  CHECK(pr.at("ev") == doctest::Approx(1.0));
  CHECK(pr.at("ev2") == doctest::Approx(solver::kEpsilon));
  const auto empty = solver::predict(oracle::make_hypothesis({}), t, ctx({Atom("a")}));
  for (const auto& [k, v] : empty) CHECK(v == doctest::Approx(solver::kEpsilon));
}

TEST_CASE("greedy search is never worse than the best pair on random tasks") {
  std::mt19937_64 rng(99);
  solver::SearchBudget budget;
  budget.max_body_len = 2;
  int equal = 0;
  const int trials = 25;
  for (int i = 0; i < trials; ++i) {
    const auto t = oracle::random_single_event_task(rng);
    const Atom ev("ev");
    const auto h = solver::solve_event(t, ev, budget);
    const double got = solver::log_posterior(h, t, ev).total;
    const double best = oracle::exhaustive_two_rule_optimum(t, ev, budget);
    if (h.rules.size() <= 2) CHECK(got >= best - 1e-9);
    if (std::abs(got - best) < 1e-9 || got > best) ++equal;
  }
  CHECK(equal >= trials * 95 / 100);
}

TEST_CASE("solving is independent of the worker count") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 5; ++i) {
    const auto t = oracle::random_single_event_task(rng);
    solver::SearchBudget one, many;
    many.workers = 8;
    CHECK(solver::format_hypothesis(solver::solve(t, one)) == solver::format_hypothesis(solver::solve(t, many)));
  }
}

TEST_CASE("score report is JSON with one entry per event") {
  auto t = ab_task();
  t.positives.push_back(labelled("p", {Atom("a")}, Atom("ev"), true));
  const auto h = solver::solve(t);
  const auto json = solver::score_report_json(h, t);
  CHECK(json.find("\"ev\"") != std::string::npos);
  CHECK(json.find("log_likelihood") != std::string::npos);
}
