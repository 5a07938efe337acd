// Independent reference implementations shared by the unit tests and the acceptance runner.
#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "eoilp/hypothesis_space.hpp"
#include "eoilp/logic.hpp"
#include "eoilp/solver.hpp"

namespace oracle {

using eoilp::logic::Atom;
using eoilp::logic::FactSet;
using eoilp::logic::Literal;
using eoilp::logic::NormalRule;

inline Atom prop(int i) { return Atom("p" + std::to_string(i)); }

/// Every answer set of a ground propositional program plus facts, by checking each
/// subset of the atom universe against the least model of its reduct.
inline std::vector<std::set<Atom>> answer_sets(const std::vector<NormalRule>& rules, const FactSet& facts,
                                               int n_atoms) {
  std::vector<std::set<Atom>> out;
  for (std::uint32_t mask = 0; mask < (1u << n_atoms); ++mask) {
    auto in = [&](const Atom& a) {
      const int i = std::stoi(a.predicate.substr(1));
      return (mask >> i) & 1u;
    };
    // Reduct: drop rules whose negative literal is contradicted by the candidate, strip the rest.
    std::vector<std::pair<Atom, std::vector<Atom>>> reduct;
    for (const auto& r : rules) {
      bool blocked = false;
      std::vector<Atom> pos;
      for (const auto& l : r.body) {
        if (l.kind == Literal::Kind::Negative && in(l.atom)) blocked = true;
        if (l.kind == Literal::Kind::Positive) pos.push_back(l.atom);
      }
      if (!blocked) reduct.emplace_back(r.head, pos);
    }
    std::set<Atom> model;
    for (const auto& f : facts.sorted()) model.insert(f);
    for (bool grew = true; grew;) {
      grew = false;
      for (const auto& [h, pos] : reduct)
        if (!model.contains(h) && std::all_of(pos.begin(), pos.end(), [&](const Atom& a) { return model.contains(a); }))
          grew = model.insert(h).second;
    }
    bool equal = true;
    for (int i = 0; i < n_atoms && equal; ++i) equal = model.contains(prop(i)) == bool((mask >> i) & 1u);
    if (equal) out.push_back(model);
  }
  return out;
}

/// Random stratified program: atoms get levels, negation only reaches strictly lower levels.
struct RandomProgram {
  std::vector<NormalRule> rules;
  FactSet facts;
  eoilp::logic::PartialInterpretation pi;
  int n_atoms = 0;
};

inline RandomProgram random_stratified_program(std::mt19937_64& rng, int max_atoms = 12) {
  RandomProgram p;
  p.n_atoms = std::uniform_int_distribution<int>(1, max_atoms)(rng);
  std::vector<int> level(p.n_atoms);
  for (auto& l : level) l = std::uniform_int_distribution<int>(0, 3)(rng);
  const int n_rules = std::uniform_int_distribution<int>(0, 2 * p.n_atoms)(rng);
  std::uniform_int_distribution<int> pick(0, p.n_atoms - 1);
  for (int r = 0; r < n_rules; ++r) {
    NormalRule rule{prop(pick(rng)), {}};
    const int h = std::stoi(rule.head.predicate.substr(1));
    const int len = std::uniform_int_distribution<int>(0, 3)(rng);
    for (int k = 0; k < len; ++k) {
      const int b = pick(rng);
      const bool neg = std::bernoulli_distribution(0.4)(rng);
      if (neg && level[b] < level[h]) rule.body.push_back(Literal::neg(prop(b)));
      else if (level[b] <= level[h]) rule.body.push_back(Literal::pos(prop(b)));
    }
    p.rules.push_back(std::move(rule));
  }
  for (int i = 0; i < p.n_atoms; ++i) {
    if (std::bernoulli_distribution(0.25)(rng)) p.facts.insert(prop(i));
    const int role = std::uniform_int_distribution<int>(0, 5)(rng);
    if (role == 0) p.pi.inc.insert(prop(i));
    if (role == 1) p.pi.exc.insert(prop(i));
  }
  return p;
}

/// Mann-Whitney pair count with ties counted one half.
inline double pair_count_auc(const std::vector<std::pair<double, bool>>& s) {
  double wins = 0;
  std::size_t pairs = 0;
  for (const auto& a : s)
    for (const auto& b : s)
      if (a.second && !b.second) {
        ++pairs;
        wins += a.first > b.first ? 1.0 : a.first == b.first ? 0.5 : 0.0;
      }
  return wins / static_cast<double>(pairs);
}

inline eoilp::solver::Hypothesis make_hypothesis(const std::vector<eoilp::hyp::ScoredRule>& rules) {
  eoilp::solver::Hypothesis h;
  for (const auto& r : rules) {
    h.per_event_index[eoilp::logic::to_string(r.rule.head)].push_back(h.rules.size());
    h.rules.push_back(r);
  }
  return h;
}

/// Best log-posterior over every hypothesis of at most two candidate rules for `event`.
inline double exhaustive_two_rule_optimum(const eoilp::solver::DisplasTask& task, const Atom& event,
                                          const eoilp::solver::SearchBudget& budget) {
  namespace sv = eoilp::solver;
  const auto th = sv::derive_thresholds(task, budget.max_thresholds, &event);
  std::vector<eoilp::hyp::ScoredRule> cands;
  for (auto& c : eoilp::hyp::enumerate_rules(task.bias, budget.max_body_len, th, budget.candidate_cap, task.weights))
    if (c.rule.head == event) cands.push_back(std::move(c));
  double best = sv::log_posterior(make_hypothesis({}), task, event).total;
  for (std::size_t i = 0; i < cands.size(); ++i) {
    best = std::max(best, sv::log_posterior(make_hypothesis({cands[i]}), task, event).total);
    for (std::size_t j = i + 1; j < cands.size(); ++j)
      best = std::max(best, sv::log_posterior(make_hypothesis({cands[i], cands[j]}), task, event).total);
  }
  return best;
}

/// Random single-event task over ground body atoms and one integer capture.
inline eoilp::solver::DisplasTask random_single_event_task(std::mt19937_64& rng) {
  using namespace eoilp;
  solver::DisplasTask t;
  const Atom ev("ev");
  t.bias.heads.push_back({ev});
  const int n_ground = std::uniform_int_distribution<int>(2, 4)(rng);
  for (int i = 0; i < n_ground; ++i) {
    hyp::BodyDecl d;
    d.atom = Atom(std::string(1, char('a' + i)));
    t.bias.bodies.push_back(d);
  }
  hyp::BodyDecl x;
  x.atom = Atom("x", {logic::Term::variable("_")});
  x.capture = true;
  x.numeric_var = "x";
  x.var_name = "X";
  x.min_comparisons = 1;
  t.bias.bodies.push_back(x);
  t.bias.numeric_vars.push_back({"x", 0, 20, 1.0});
  t.bias.phi = {0.2, 0.4, 0.6, 0.8, 1.0};
  // A hidden concept over a couple of atoms and the capture, with label noise.
  const int c1 = std::uniform_int_distribution<int>(0, n_ground - 1)(rng);
  const int c2 = std::uniform_int_distribution<int>(0, n_ground - 1)(rng);
  const std::int64_t cut = std::uniform_int_distribution<std::int64_t>(3, 17)(rng);
  const double noise = std::uniform_real_distribution<double>(0.0, 0.3)(rng);
  const int n = std::uniform_int_distribution<int>(8, 40)(rng);
  for (int e = 0; e < n; ++e) {
    logic::Wcdpi w;
    w.id = "e" + std::to_string(e);
    std::vector<bool> on(n_ground);
    for (int i = 0; i < n_ground; ++i) {
      on[i] = std::bernoulli_distribution(0.5)(rng);
      if (on[i]) w.ctx.facts.insert(Atom(std::string(1, char('a' + i))));
    }
    const std::int64_t v = std::uniform_int_distribution<std::int64_t>(0, 20)(rng);
    w.ctx.facts.insert(Atom("x", {logic::Term::integer(v)}));
    bool label = (on[c1] && v >= cut) || (on[c2] && v <= 2);
    if (std::bernoulli_distribution(noise)(rng)) label = !label;
    w.penalty = std::bernoulli_distribution(0.2)(rng) ? 225 : 100;
    if (label) {
      w.pi.inc.insert(ev);
      t.positives.push_back(std::move(w));
    } else {
      w.pi.exc.insert(ev);
      t.positives.push_back(std::move(w));
    }
  }
  return t;
}

}  // namespace oracle
