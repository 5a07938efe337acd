#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "eoilp/hypothesis_space.hpp"

using namespace eoilp;
using eoilp::logic::Atom;

namespace {

hyp::ModeBias tiny_bias(std::vector<double> phi) {
  hyp::ModeBias b;
  b.heads.push_back({Atom("f")});
  hyp::BodyDecl a;
  a.atom = Atom("a");
  b.bodies.push_back(a);
  b.phi = std::move(phi);
  return b;
}

std::multiset<std::string> texts(const std::vector<hyp::ScoredRule>& rs) {
  std::multiset<std::string> out;
  for (const auto& r : rs) out.insert(logic::to_string(r.as_prob_rule()));
  return out;
}

// Octile-style oracle: all floor midpoints plus extremes, then evenly spaced order statistics.
std::vector<std::int64_t> threshold_oracle(std::vector<std::int64_t> v, std::size_t cap) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  std::vector<std::int64_t> all{v.front()};
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const auto lo = v[i], hi = v[i + 1];
    all.push_back(lo + (hi - lo) / 2);
  }
  all.push_back(v.back());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all.size() <= cap ? all : std::vector<std::int64_t>{};
}

}  // namespace

TEST_CASE("threshold candidates") {
  CHECK(hyp::threshold_candidates({5}, 8) == std::vector<std::int64_t>{5});
  CHECK(hyp::threshold_candidates({9, 2, 4, 4}, 8) == std::vector<std::int64_t>{2, 3, 6, 9});
  CHECK(hyp::threshold_candidates({-3, -1}, 8) == std::vector<std::int64_t>{-3, -2, -1});

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::int64_t> v(std::uniform_int_distribution<int>(1, 12)(rng));
    for (auto& x : v) x = std::uniform_int_distribution<std::int64_t>(-50, 50)(rng);
    const auto expect = threshold_oracle(v, 64);
    CHECK(hyp::threshold_candidates(v, 64) == expect);
  }

  std::vector<std::int64_t> big(1000);
  for (auto& x : big) x = std::uniform_int_distribution<std::int64_t>(0, 10000)(rng);
  const auto t = hyp::threshold_candidates(big, 8);
  CHECK(t.size() == 8);
  CHECK(std::is_sorted(t.begin(), t.end()));
  CHECK(t.front() == *std::min_element(big.begin(), big.end()));
  CHECK(t.back() == *std::max_element(big.begin(), big.end()));
  // Interior cuts sit near the octiles of a uniform sample.
  for (std::size_t i = 1; i + 1 < t.size(); ++i)
    CHECK(std::abs(static_cast<double>(t[i]) - 10000.0 * static_cast<double>(i) / 7.0) < 700.0);
}

TEST_CASE("enumeration of a one-atom bias") {
  const auto rs = hyp::enumerate_rules(tiny_bias({0.5, 1.0}), 1, {});
  CHECK(texts(rs) == std::multiset<std::string>{"0.5: f :- a.", "1: f :- a.", "0.5: f.", "1: f."});

  auto forbid = tiny_bias({0.5, 1.0});
  forbid.bodies[0].nominal = true;
  forbid.constraints.push_back(hyp::BiasConstraint::forbid_all_nominal());
  CHECK(texts(hyp::enumerate_rules(forbid, 1, {})) == std::multiset<std::string>{"0.5: f.", "1: f."});

  auto empty = tiny_bias({1.0});
  empty.bodies.clear();
  const auto only_facts = hyp::enumerate_rules(empty, 2, {});
  REQUIRE(only_facts.size() == 1);
  CHECK(only_facts[0].rule.body.empty());
}

TEST_CASE("enumeration covers captures, negation and constraints") {
  hyp::ModeBias b;
  b.heads.push_back({Atom("f")});
  hyp::BodyDecl g;
  g.atom = Atom("g");
  g.negatable = true;
  b.bodies.push_back(g);
  hyp::BodyDecl x;
  x.atom = Atom("x", {logic::Term::variable("_")});
  x.capture = true;
  x.numeric_var = "x";
  x.var_name = "X";
  x.min_comparisons = 1;
  b.bodies.push_back(x);
  b.numeric_vars.push_back({"x", 0, 10, 1.0});
  b.phi = {1.0};
  const hyp::ThresholdMap th{{"x", {2, 7}}};
  const auto rs = texts(hyp::enumerate_rules(b, 3, th));
  CHECK(rs.contains("1: f :- not g."));
  CHECK(rs.contains("1: f :- x(X), X >= 2, X <= 7."));
  CHECK(rs.contains("1: f :- g, x(X), X <= 2."));
  CHECK_FALSE(rs.contains("1: f :- x(X)."));
  CHECK_FALSE(rs.contains("1: f :- x(X), X >= 7, X <= 2."));
  CHECK(rs.size() == hyp::count_candidates(b, 3, th));
  for (const auto& r : hyp::enumerate_rules(b, 3, th)) CHECK(logic::is_safe(r.rule));

  b.constraints.push_back(hyp::BiasConstraint::max_length(1));
  for (const auto& r : hyp::enumerate_rules(b, 3, th)) CHECK(r.rule.body.size() <= 1);
  b.constraints.back() = hyp::BiasConstraint::forbid_pair("g", "x");
  for (const auto& r : hyp::enumerate_rules(b, 3, th)) {
    const auto s = logic::to_string(r.rule);
    CHECK_FALSE((s.find(" g") != std::string::npos && s.find("x(") != std::string::npos));
  }
}

TEST_CASE("enumeration order is deterministic") {
  auto b = tiny_bias(hyp::default_phi_grid());
  hyp::BodyDecl c;
  c.atom = Atom("c");
  b.bodies.push_back(c);
  const auto r1 = hyp::enumerate_rules(b, 2, {});
  const auto r2 = hyp::enumerate_rules(b, 2, {});
  REQUIRE(r1.size() == r2.size());
  for (std::size_t i = 0; i < r1.size(); ++i) CHECK(r1[i].rule == r2[i].rule);
}

TEST_CASE("prior and cost") {
  const auto fact = logic::parse_rule("f.").rule;
  CHECK(hyp::rule_cost(fact) == 2);
  CHECK(hyp::prior(fact) == doctest::Approx(0.25));
  const auto one = logic::parse_rule("f :- a.").rule;
  CHECK(hyp::prior(one) == doctest::Approx(hyp::prior(fact) * 0.5));
  const auto cmp = logic::parse_rule("f :- a(X), X >= 3.").rule;
  CHECK(hyp::rule_cost(cmp) == 4);
  CHECK(hyp::prior(logic::parse_rule("g :- b.").rule) == hyp::prior(one));
}

TEST_CASE("budget cap names the dominating schema") {
  hyp::ModeBias b;
  b.heads.push_back({Atom("f")});
  for (const char* name : {"small", "wide"}) {
    hyp::BodyDecl x;
    x.atom = Atom(name, {logic::Term::variable("_")});
    x.capture = true;
    x.numeric_var = name;
    x.var_name = "X";
    b.bodies.push_back(x);
    b.numeric_vars.push_back({name, 0, 1000, 1.0});
  }
  hyp::ThresholdMap th{{"small", {1}}, {"wide", {}}};
  for (int i = 0; i < 60; ++i) th["wide"].push_back(i);
  CHECK_NOTHROW(hyp::check_budget(b, 2, th, hyp::kDefaultCandidateCap));
  try {
    hyp::enumerate_rules(b, 2, th, 100);
    FAIL("expected BudgetExceeded");
  } catch (const hyp::BudgetExceeded& e) {
    CHECK(e.dominating_schema().find("wide") != std::string::npos);
  }
}

TEST_CASE("mode bias text round-trips") {
  const std::string text =
      "phi 0.5 1\n"
      "head failure(source,lowPressure)\n"
      "body failure(none,null) nominal\n"
      "body g negatable\n"
      "body srcr1_p(#) numeric=srcr1_p var=P min_cmp=1\n"
      "numeric srcr1_p 160 205 100\n"
      "constraint forbid_all_nominal\n"
      "constraint max_body_length 2\n";
  const auto b = hyp::parse_mode_bias(text);
  CHECK(b.heads.size() == 1);
  CHECK(b.bodies.size() == 3);
  CHECK(b.bodies[2].capture);
  CHECK(b.bodies[2].min_comparisons == 1);
  CHECK(b.numeric_vars[0].multiplier == 100);
  const auto again = hyp::parse_mode_bias(hyp::print_mode_bias(b));
  CHECK(hyp::print_mode_bias(again) == hyp::print_mode_bias(b));
  CHECK_THROWS(hyp::parse_mode_bias("head f\nbody x(#)\n"));
}
