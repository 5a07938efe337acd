#include "eoilp/hypothesis_space.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace eoilp::hyp {

using logic::Atom;
using logic::CompareOp;
using logic::Literal;
using logic::NormalRule;
using logic::Term;

std::vector<double> default_phi_grid() {
  std::vector<double> g;
  for (int k = 1; k <= 10; ++k) g.push_back(k / 10.0);
  return g;
}

Atom BodyDecl::pattern(const std::string& var) const {
  Atom a = atom;
  if (capture) {
    if (a.args.empty()) a.args.push_back(Term::variable(var));
    else a.args.back() = Term::variable(var);
  }
  return a;
}

void ModeBias::validate() const {
  std::map<std::string, std::size_t> arity;
  auto see = [&](const Atom& a) {
    if (a.predicate.empty()) throw std::invalid_argument("mode declaration with empty predicate");
    auto [it, inserted] = arity.try_emplace(a.predicate, a.args.size());
    if (!inserted && it->second != a.args.size())
      throw std::invalid_argument("predicate '" + a.predicate + "' declared with two arities");
  };
  for (const auto& h : heads) {
    see(h.atom);
    if (!h.atom.is_ground()) throw std::invalid_argument("head schema must be ground: " + to_string(h.atom));
  }
  for (const auto& b : bodies) {
    see(b.atom);
    if (b.capture && b.atom.args.empty())
      throw std::invalid_argument("capture schema needs an argument slot: " + b.atom.predicate);
    if (b.min_comparisons < 0 || b.min_comparisons > 2)
      throw std::invalid_argument("min_comparisons must be in [0,2]");
  }
  for (const auto& n : numeric_vars) {
    if (n.min > n.max) throw std::invalid_argument("numeric range min > max for " + n.variable);
    const double e = std::log10(n.multiplier);
    if (std::abs(e - std::round(e)) > 1e-9 || e < -2.0 - 1e-9 || e > 3.0 + 1e-9)
      throw std::invalid_argument("multiplier for " + n.variable + " is not a power of 10 in [1e-2, 1e3]");
  }
  for (const auto& c : constraints)
    if (c.kind == BiasConstraint::Kind::MaxBodyLength && c.max_body_length < 1)
      throw std::invalid_argument("max-body-length constraint must be >= 1");
  for (double p : phi)
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("phi values must lie in (0,1]");
}

int rule_cost(const NormalRule& rule, const PriorWeights& w) {
  int cost = w.head;
  for (const auto& l : rule.body) cost += l.kind == Literal::Kind::Compare ? w.comparison : w.atom;
  return cost;
}

double prior(const NormalRule& rule, const PriorWeights& w) {
  return std::pow(w.base, rule_cost(rule, w));
}

namespace {

std::int64_t floor_mid(std::int64_t a, std::int64_t b) {
  const std::int64_t s = a + b;
  return s >= 0 ? s / 2 : -((-s + 1) / 2);
}

}  // namespace

std::vector<std::int64_t> threshold_candidates(std::vector<std::int64_t> values, std::size_t max_count) {
  if (values.empty()) throw std::invalid_argument("threshold_candidates: empty value list");
  std::sort(values.begin(), values.end());
  std::vector<std::int64_t> distinct = values;
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  std::vector<std::int64_t> all{distinct.front()};
  for (std::size_t i = 0; i + 1 < distinct.size(); ++i) all.push_back(floor_mid(distinct[i], distinct[i + 1]));
  if (distinct.size() > 1) all.push_back(distinct.back());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  if (all.size() <= max_count || max_count == 0) return max_count == 0 ? std::vector<std::int64_t>{} : all;
  if (max_count == 1) return {distinct.front()};

  std::set<std::int64_t> picked{distinct.front(), distinct.back()};
  const std::size_t n = values.size();
  for (std::size_t i = 1; i + 1 < max_count; ++i) {
    const double q = static_cast<double>(i) / static_cast<double>(max_count - 1);
    const auto pos = static_cast<std::size_t>(std::floor(q * static_cast<double>(n - 1)));
    const auto it = std::upper_bound(distinct.begin(), distinct.end(), values[pos]);
    if (it == distinct.end()) continue;
    picked.insert(floor_mid(*(it - 1), *it));
  }
  return {picked.begin(), picked.end()};
}

std::vector<Literal> LiteralGroup::literals(const BodyDecl& d) const {
  std::vector<Literal> out;
  const bool has_cmp = ge || le;
  const Atom a = d.pattern(has_cmp ? d.var_name : "_");
  out.push_back(negated ? Literal::neg(a) : Literal::pos(a));
  if (ge) out.push_back(Literal::compare(d.var_name, CompareOp::GreaterEq, *ge));
  if (le) out.push_back(Literal::compare(d.var_name, CompareOp::LessEq, *le));
  return out;
}

std::vector<std::vector<LiteralGroup>> literal_groups(const ModeBias& bias, const ThresholdMap& thresholds) {
  std::vector<std::vector<LiteralGroup>> out(bias.bodies.size());
  for (std::size_t d = 0; d < bias.bodies.size(); ++d) {
    const BodyDecl& decl = bias.bodies[d];
    auto& groups = out[d];
    if (!decl.capture) {
      groups.push_back({d, false, {}, {}});
      if (decl.negatable) groups.push_back({d, true, {}, {}});
      continue;
    }
    std::vector<std::int64_t> ts;
    if (auto it = thresholds.find(decl.numeric_var); it != thresholds.end()) ts = it->second;
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    if (decl.min_comparisons <= 0) groups.push_back({d, false, {}, {}});
    if (decl.min_comparisons <= 1) {
      for (auto t : ts) {
        groups.push_back({d, false, t, {}});
        groups.push_back({d, false, {}, t});
      }
    }
    for (std::size_t i = 0; i < ts.size(); ++i)
      for (std::size_t j = i + 1; j < ts.size(); ++j) groups.push_back({d, false, ts[i], ts[j]});
  }
  return out;
}

namespace {

int effective_max_len(const ModeBias& bias, int max_body_len) {
  int m = max_body_len;
  for (const auto& c : bias.constraints)
    if (c.kind == BiasConstraint::Kind::MaxBodyLength) m = std::min(m, c.max_body_length);
  return m;
}

bool forbid_all_nominal(const ModeBias& bias) {
  return std::any_of(bias.constraints.begin(), bias.constraints.end(), [](const BiasConstraint& c) {
    return c.kind == BiasConstraint::Kind::ForbidAllNominalBody;
  });
}

struct BodyWalker {
  const ModeBias& bias;
  const std::vector<std::vector<LiteralGroup>>& groups;
  int max_len;
  bool no_all_nominal;
  std::vector<std::pair<std::string, std::string>> pairs;
  const std::function<void(const Body&)>& visit;
  Body current;

  bool pair_conflict(std::size_t decl) const {
    const auto& p = bias.bodies[decl].atom.predicate;
    for (const auto& g : current) {
      const auto& q = bias.bodies[g.decl].atom.predicate;
      for (const auto& [a, b] : pairs)
        if ((a == p && b == q) || (a == q && b == p)) return true;
    }
    return false;
  }

  void emit() const {
    if (no_all_nominal && !current.empty() &&
        std::all_of(current.begin(), current.end(), [&](const LiteralGroup& g) { return bias.bodies[g.decl].nominal; }))
      return;
    visit(current);
  }

  void walk(std::size_t from, int len) {
    emit();
    for (std::size_t d = from; d < groups.size(); ++d) {
      if (pair_conflict(d)) continue;
      for (const auto& g : groups[d]) {
        if (len + g.length() > max_len) continue;
        current.push_back(g);
        walk(d + 1, len + g.length());
        current.pop_back();
      }
    }
  }
};

}  // namespace

void for_each_body(const ModeBias& bias, int max_body_len, const ThresholdMap& thresholds,
                   const std::function<void(const Body&)>& visit) {
  if (max_body_len < 0) throw std::invalid_argument("max_body_len must be non-negative");
  const auto groups = literal_groups(bias, thresholds);
  BodyWalker w{bias, groups, effective_max_len(bias, max_body_len), forbid_all_nominal(bias), {}, visit, {}};
  for (const auto& c : bias.constraints)
    if (c.kind == BiasConstraint::Kind::ForbidPredicatePair) w.pairs.emplace_back(c.first, c.second);
  w.walk(0, 0);
}

NormalRule make_rule(const ModeBias& bias, const Atom& head, const Body& body) {
  NormalRule r{head, {}};
  std::set<std::string> used;
  for (const auto& g : body) {
    BodyDecl d = bias.bodies[g.decl];
    if (d.capture && (g.ge || g.le)) {
      std::string name = d.var_name;
      for (int k = 2; used.contains(name); ++k) name = d.var_name + std::to_string(k);
      used.insert(name);
      d.var_name = name;
    }
    for (auto& l : g.literals(d)) r.body.push_back(std::move(l));
  }
  return r;
}

bool violates_constraints(const ModeBias& bias, const NormalRule& rule) {
  auto is_nominal = [&](const Atom& a) {
    for (const auto& d : bias.bodies) {
      if (!d.nominal || d.atom.predicate != a.predicate || d.atom.args.size() != a.args.size()) continue;
      if (d.capture || d.atom == a) return true;
    }
    return false;
  };
  bool any_atom = false, all_nominal = true;
  std::set<std::string> preds;
  for (const auto& l : rule.body) {
    if (l.kind == Literal::Kind::Compare) continue;
    any_atom = true;
    all_nominal = all_nominal && is_nominal(l.atom);
    preds.insert(l.atom.predicate);
  }
  for (const auto& c : bias.constraints) {
    switch (c.kind) {
      case BiasConstraint::Kind::MaxBodyLength:
        if (static_cast<int>(rule.body.size()) > c.max_body_length) return true;
        break;
      case BiasConstraint::Kind::ForbidPredicatePair:
        if (preds.contains(c.first) && preds.contains(c.second)) return true;
        break;
      case BiasConstraint::Kind::ForbidAllNominalBody:
        if (any_atom && all_nominal) return true;
        break;
    }
  }
  return false;
}

std::size_t count_candidates(const ModeBias& bias, int max_body_len, const ThresholdMap& thresholds) {
  // Upper bound by dynamic programming over body length; exact count only when needed.
  const auto groups = literal_groups(bias, thresholds);
  const int max_len = std::max(0, effective_max_len(bias, max_body_len));
  std::vector<double> ways(max_len + 1, 0.0);
  ways[0] = 1.0;
  for (const auto& gs : groups) {
    std::vector<double> next = ways;
    for (const auto& g : gs)
      for (int l = 0; l + g.length() <= max_len; ++l) next[l + g.length()] += ways[l];
    ways = std::move(next);
  }
  double bound = 0.0;
  for (double w : ways) bound += w;
  const double per_body = static_cast<double>(bias.heads.size() * bias.phi.size());
  if (bound * per_body < 1e18) {
    std::size_t bodies = 0;
    if (bound * per_body > static_cast<double>(kDefaultCandidateCap) * 4) {
      return static_cast<std::size_t>(bound * per_body);
    }
    for_each_body(bias, max_body_len, thresholds, [&](const Body&) { ++bodies; });
    return bodies * bias.heads.size() * bias.phi.size();
  }
  return static_cast<std::size_t>(-1);
}

void check_budget(const ModeBias& bias, int max_body_len, const ThresholdMap& thresholds, std::size_t cap) {
  const std::size_t n = count_candidates(bias, max_body_len, thresholds);
  if (n <= cap) return;
  const auto groups = literal_groups(bias, thresholds);
  std::size_t worst = 0;
  for (std::size_t d = 1; d < groups.size(); ++d)
    if (groups[d].size() > groups[worst].size()) worst = d;
  const std::string schema = groups.empty() ? "<none>" : to_string(bias.bodies[worst].pattern("#"));
  throw BudgetExceeded("hypothesis space has " + std::to_string(n) + " candidates (cap " + std::to_string(cap) +
                           "); dominated by schema " + schema,
                       schema);
}

void enumerate_rules(const ModeBias& bias, int max_body_len, const ThresholdMap& thresholds,
                     const std::function<void(const ScoredRule&)>& visit, std::size_t cap,
                     const PriorWeights& w) {
  if (max_body_len < 1) throw std::invalid_argument("max_body_len must be >= 1");
  check_budget(bias, max_body_len, thresholds, cap);
  std::vector<Body> bodies;
  for_each_body(bias, max_body_len, thresholds, [&](const Body& b) { bodies.push_back(b); });
  for (const auto& h : bias.heads) {
    for (const auto& b : bodies) {
      ScoredRule sr;
      sr.rule = make_rule(bias, h.atom, b);
      sr.cost = rule_cost(sr.rule, w);
      sr.prior = std::pow(w.base, sr.cost);
      for (double phi : bias.phi) {
        sr.phi = phi;
        visit(sr);
      }
    }
  }
}

std::vector<ScoredRule> enumerate_rules(const ModeBias& bias, int max_body_len, const ThresholdMap& thresholds,
                                        std::size_t cap, const PriorWeights& w) {
  std::vector<ScoredRule> out;
  enumerate_rules(bias, max_body_len, thresholds, [&](const ScoredRule& r) { out.push_back(r); }, cap, w);
  return out;
}

}  // namespace eoilp::hyp
